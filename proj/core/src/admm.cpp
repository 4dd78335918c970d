#include "cvxseg/admm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cvxseg/convexity.hpp"
#include "cvxseg/errors.hpp"

namespace cvxseg {

namespace {

// In-place LU factorization with partial pivoting of a K x K row-major
// matrix; pivots record the row swaps.
void lu_factor(std::vector<double>& a, std::vector<int>& piv, int K) {
    piv.resize(K);
    for (int col = 0; col < K; ++col) {
        int best = col;
        double best_abs = std::abs(a[static_cast<std::size_t>(col) * K + col]);
        for (int r = col + 1; r < K; ++r) {
            const double v = std::abs(a[static_cast<std::size_t>(r) * K + col]);
            if (v > best_abs) {
                best = r;
                best_abs = v;
            }
        }
        if (best_abs == 0.0) throw std::runtime_error("landmark system is singular");
        piv[col] = best;
        if (best != col)
            for (int c = 0; c < K; ++c)
                std::swap(a[static_cast<std::size_t>(col) * K + c],
                          a[static_cast<std::size_t>(best) * K + c]);
        const double d = a[static_cast<std::size_t>(col) * K + col];
        for (int r = col + 1; r < K; ++r) {
            const double factor = a[static_cast<std::size_t>(r) * K + col] / d;
            a[static_cast<std::size_t>(r) * K + col] = factor;
            for (int c = col + 1; c < K; ++c)
                a[static_cast<std::size_t>(r) * K + c] -=
                    factor * a[static_cast<std::size_t>(col) * K + c];
        }
    }
}

void lu_solve(const std::vector<double>& a, const std::vector<int>& piv, int K,
              std::vector<double>& b) {
    for (int col = 0; col < K; ++col)
        if (piv[col] != col) std::swap(b[col], b[piv[col]]);
    for (int r = 1; r < K; ++r)
        for (int c = 0; c < r; ++c) b[r] -= a[static_cast<std::size_t>(r) * K + c] * b[c];
    for (int r = K - 1; r >= 0; --r) {
        for (int c = r + 1; c < K; ++c) b[r] -= a[static_cast<std::size_t>(r) * K + c] * b[c];
        b[r] /= a[static_cast<std::size_t>(r) * K + r];
    }
}

double segmentation_energy(const ScalarField& phi, const ScalarField& f,
                           const ScalarField& g, double eps,
                           const std::vector<PixelCoord>& landmarks, double theta) {
    double acc = 0.0;
    auto vp = phi.values();
    auto vf = f.values();
    auto vg = g.values();
    for (std::size_t i = 0; i < vp.size(); ++i) {
        const HeavisideValue hv = regularized_heaviside(vp[i], eps);
        acc += vg[i] * hv.delta + vf[i] * hv.h;
    }
    for (const PixelCoord& p : landmarks) {
        const double v = phi(p.m, p.n);
        acc += 0.5 * theta * v * v;
    }
    return acc;
}

}  // namespace

bool model_uses_landmarks(Model model) noexcept {
    return model == Model::gmml || model == Model::gmmlc;
}

bool model_uses_scribbles(Model model) noexcept {
    return model == Model::rp || model == Model::rpc;
}

bool model_has_convex_prior(Model model) noexcept {
    return model == Model::gmmc || model == Model::gmmlc || model == Model::rpc;
}

std::string to_string(Model model) {
    switch (model) {
        case Model::gmm: return "gmm";
        case Model::gmmc: return "gmmc";
        case Model::gmml: return "gmml";
        case Model::gmmlc: return "gmmlc";
        case Model::rp: return "rp";
        case Model::rpc: return "rpc";
    }
    return "?";
}

std::optional<Model> model_from_string(const std::string& name) {
    if (name == "gmm") return Model::gmm;
    if (name == "gmmc") return Model::gmmc;
    if (name == "gmml") return Model::gmml;
    if (name == "gmmlc") return Model::gmmlc;
    if (name == "rp") return Model::rp;
    if (name == "rpc") return Model::rpc;
    return std::nullopt;
}

double AdmmConfig::rho2() const noexcept { return 2.0 * std::sqrt(rho0 * rho1); }

void AdmmConfig::validate() const {
    if (rho0 <= 0.0 || rho1 <= 0.0) throw ConfigError("AdmmConfig: rho0 and rho1 must be positive");
    if (num_iters < 1) throw ConfigError("AdmmConfig: num_iters must be at least 1");
    if (inner_steps < 1) throw ConfigError("AdmmConfig: inner_steps must be at least 1");
    if (model_uses_landmarks(model) && theta <= 0.0)
        throw ConfigError("AdmmConfig: landmark models need theta > 0");
    if (early_stop_residual <= 0.0 || early_stop_stable < 1)
        throw ConfigError("AdmmConfig: invalid early-stopping parameters");
}

ScalarField update_zeta(const AdmmState& state, const AdmmConfig& cfg,
                        const Region& omega1) {
    ScalarField zeta = laplacian(state.phi);
    const double inv_rho1 = 1.0 / cfg.rho1;
    for (int n = 0; n < zeta.height(); ++n)
        for (int m = 0; m < zeta.width(); ++m) {
            double v = zeta(m, n) + state.gamma1(m, n) * inv_rho1;
            if (cfg.convex_prior() && omega1.contains(m, n)) v = std::max(0.0, v);
            zeta(m, n) = v;
        }
    return zeta;
}

VectorField update_xi(const AdmmState& state, const AdmmConfig& cfg,
                      const Region& omega1) {
    VectorField xi = forward_gradient(state.phi);
    const double inv_rho2 = 1.0 / cfg.rho2();
    for (int n = 0; n < xi.height(); ++n)
        for (int m = 0; m < xi.width(); ++m) {
            double u = xi.x(m, n) + state.gamma2.x(m, n) * inv_rho2;
            double v = xi.y(m, n) + state.gamma2.y(m, n) * inv_rho2;
            if (omega1.contains(m, n)) {
                const double len = std::hypot(u, v);
                if (len == 0.0) {
                    u = 1.0;
                    v = 0.0;
                } else {
                    u /= len;
                    v /= len;
                }
            }
            xi.x(m, n) = u;
            xi.y(m, n) = v;
        }
    return xi;
}

ScalarField compute_rhd(const AdmmState& state, const AdmmConfig& cfg) {
    const int M = state.phi.width(), N = state.phi.height();
    const double rho2 = cfg.rho2();

    ScalarField lap_arg(M, N);
    for (int n = 0; n < N; ++n)
        for (int m = 0; m < M; ++m)
            lap_arg(m, n) = state.gamma1(m, n) - cfg.rho1 * state.zeta(m, n);

    VectorField div_arg(M, N);
    for (int n = 0; n < N; ++n)
        for (int m = 0; m < M; ++m) {
            div_arg.x(m, n) = state.gamma2.x(m, n) - rho2 * state.xi.x(m, n);
            div_arg.y(m, n) = state.gamma2.y(m, n) - rho2 * state.xi.y(m, n);
        }

    const ScalarField lap = laplacian(lap_arg);
    const ScalarField div = divergence_adjoint(div_arg);
    ScalarField rhd(M, N);
    for (int n = 0; n < N; ++n)
        for (int m = 0; m < M; ++m)
            rhd(m, n) = cfg.rho0 * state.phi(m, n) - lap(m, n) - div(m, n);
    return rhd;
}

PhiSolver::PhiSolver(int width, int height, double rho0, double rho1)
    : spectral_(width, height, rho1, rho0) {}

PhiSolver::PhiSolver(int width, int height, double rho0, double rho1,
                     const std::vector<PixelCoord>& landmarks, double theta)
    : spectral_(width, height, rho1, rho0), landmarks_(landmarks), theta_(theta) {
    if (theta <= 0.0) throw ConfigError("PhiSolver: theta must be positive");
    const int K = static_cast<int>(landmarks_.size());
    greens_.reserve(K);
    ScalarField impulse(width, height, 0.0);
    for (const PixelCoord& p : landmarks_) {
        if (p.m < 0 || p.m >= width || p.n < 0 || p.n >= height)
            throw ConfigError("PhiSolver: landmark outside the grid");
        impulse(p.m, p.n) = 1.0;
        greens_.push_back(spectral_.biharmonic(impulse));
        impulse(p.m, p.n) = 0.0;
    }
    correction_.assign(static_cast<std::size_t>(K) * K, 0.0);
    for (int j = 0; j < K; ++j)
        for (int k = 0; k < K; ++k)
            correction_[static_cast<std::size_t>(j) * K + k] =
                greens_[k](landmarks_[j].m, landmarks_[j].n) + (j == k ? 1.0 / theta_ : 0.0);
    lu_factor(correction_, pivot_, K);
}

ScalarField PhiSolver::solve(const ScalarField& rhs) const {
    ScalarField y = spectral_.biharmonic(rhs);
    if (landmarks_.empty()) return y;
    const int K = static_cast<int>(landmarks_.size());
    std::vector<double> c(K);
    for (int k = 0; k < K; ++k) c[k] = y(landmarks_[k].m, landmarks_[k].n);
    lu_solve(correction_, pivot_, K, c);
    for (int k = 0; k < K; ++k) {
        auto vy = y.values();
        auto vg = greens_[k].values();
        for (std::size_t i = 0; i < vy.size(); ++i) vy[i] -= c[k] * vg[i];
    }
    return y;
}

ScalarField update_phi(const AdmmState& state, const ScalarField& rhd,
                       const ScalarField& f, const ScalarField& g, double eps,
                       const AdmmConfig& cfg, const PhiSolver& solver) {
    ScalarField phi = state.phi;
    for (int j = 0; j < cfg.inner_steps; ++j) {
        ScalarField rhs = rhd;
        rhs -= f_prime(phi, f, g, eps);
        phi = solver.solve(rhs);
    }
    return phi;
}

void update_multipliers(AdmmState& state, const AdmmConfig& cfg) {
    const ScalarField lap = laplacian(state.phi);
    const VectorField grad = forward_gradient(state.phi);
    const double rho2 = cfg.rho2();
    for (int n = 0; n < state.phi.height(); ++n)
        for (int m = 0; m < state.phi.width(); ++m) {
            state.gamma1(m, n) += cfg.rho1 * (lap(m, n) - state.zeta(m, n));
            state.gamma2.x(m, n) += rho2 * (grad.x(m, n) - state.xi.x(m, n));
            state.gamma2.y(m, n) += rho2 * (grad.y(m, n) - state.xi.y(m, n));
        }
}

SegmentationResult run_segmentation(const Image& img, const BinaryMask& init,
                                    const LabelSet& labels, const AdmmConfig& cfg,
                                    const ForceConfig& fcfg,
                                    const BinaryMask* reference) {
    cfg.validate();
    fcfg.validate();
    const int M = img.width(), N = img.height();
    if (init.width != M || init.height != N)
        throw ConfigError("run_segmentation: image and init mask shapes differ");
    if (reference && (reference->width != M || reference->height != N))
        throw ConfigError("run_segmentation: reference mask shape differs");
    if (model_uses_landmarks(cfg.model) && labels.landmarks.empty())
        throw ConfigError("run_segmentation: model " + to_string(cfg.model) +
                          " requires landmarks");
    if (model_uses_scribbles(cfg.model) &&
        (labels.object.empty() || labels.background.empty()))
        throw ConfigError("run_segmentation: model " + to_string(cfg.model) +
                          " requires object and background scribbles");

    const Region omega1 = Region::interior(M, N);
    const ScalarField g = edge_detector(img, fcfg.alpha, fcfg.beta);

    SegmentationResult result;
    ScalarField f;
    if (model_uses_scribbles(cfg.model)) {
        const ScalarField p1 = prior_probability(img, labels, fcfg);
        f = region_force(clamp_probability(p1), fcfg.w0, fcfg.w1);
    }

    AdmmState state(M, N);
    state.phi = sdf_from_mask(init);
    if (!model_uses_scribbles(cfg.model)) {
        result.gmm = gmm_update_params(img, state.phi, fcfg.eps, fcfg.lambda);
        f = region_force(gmm_posterior(img, result.gmm), fcfg.w0, fcfg.w1);
    }

    const std::vector<PixelCoord> no_landmarks;
    const std::vector<PixelCoord>& landmarks =
        model_uses_landmarks(cfg.model) ? labels.landmarks : no_landmarks;
    const PhiSolver solver =
        landmarks.empty() ? PhiSolver(M, N, cfg.rho0, cfg.rho1)
                          : PhiSolver(M, N, cfg.rho0, cfg.rho1, landmarks, cfg.theta);

    BinaryMask prev_mask = mask_from_sdf(state.phi);
    int stable = 0;
    for (int t = 0; t < cfg.num_iters; ++t) {
        state.iter = t;
        state.zeta = update_zeta(state, cfg, omega1);
        state.xi = update_xi(state, cfg, omega1);
        const ScalarField rhd = compute_rhd(state, cfg);
        state.phi = update_phi(state, rhd, f, g, fcfg.eps, cfg, solver);
        update_multipliers(state, cfg);

        if (!state.phi.all_finite() || !state.zeta.all_finite() || !state.xi.all_finite() ||
            !state.gamma1.all_finite() || !state.gamma2.all_finite())
            throw NonFiniteStateError("run_segmentation: non-finite iterate at iteration " +
                                          std::to_string(t),
                                      t);

        if (!model_uses_scribbles(cfg.model)) {
            result.gmm = gmm_update_params(img, state.phi, fcfg.eps, fcfg.lambda);
            f = region_force(gmm_posterior(img, result.gmm), fcfg.w0, fcfg.w1);
        }

        IterationStats stats;
        stats.iter = t;
        {
            const ScalarField lap = laplacian(state.phi);
            const VectorField grad = forward_gradient(state.phi);
            double rz = 0.0, rx = 0.0;
            for (int n = 0; n < N; ++n)
                for (int m = 0; m < M; ++m) {
                    rz = std::max(rz, std::abs(lap(m, n) - state.zeta(m, n)));
                    rx = std::max(rx, std::hypot(grad.x(m, n) - state.xi.x(m, n),
                                                 grad.y(m, n) - state.xi.y(m, n)));
                }
            stats.res_zeta = rz;
            stats.res_xi = rx;
        }
        stats.convexity_violation = laplacian_violation(state.phi, omega1);
        stats.energy = segmentation_energy(state.phi, f, g, fcfg.eps, landmarks, cfg.theta);

        const BinaryMask mask = mask_from_sdf(state.phi);
        if (reference) stats.dice = dice_coefficient(mask, *reference);
        result.history.push_back(stats);
        result.iterations = t + 1;

        stable = (mask == prev_mask) ? stable + 1 : 0;
        prev_mask = mask;
        if (stable >= cfg.early_stop_stable &&
            stats.res_zeta < cfg.early_stop_residual &&
            stats.res_xi < cfg.early_stop_residual) {
            result.early_stopped = true;
            break;
        }
    }

    result.phi = state.phi;
    result.mask = prev_mask;
    return result;
}

}  // namespace cvxseg
