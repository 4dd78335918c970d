#include "doctest.h"

#include <cmath>

#include "cvxseg/admm.hpp"
#include "cvxseg/errors.hpp"
#include "cvxseg/synth.hpp"
#include "oracles.hpp"

using namespace cvxseg;

namespace {

AdmmState random_state(int M, int N, int seed) {
    AdmmState s(M, N);
    s.phi = oracle::random_field(M, N, seed);
    s.zeta = oracle::random_field(M, N, seed + 1);
    s.xi.x = oracle::random_field(M, N, seed + 2);
    s.xi.y = oracle::random_field(M, N, seed + 3);
    s.gamma1 = oracle::random_field(M, N, seed + 4);
    s.gamma2.x = oracle::random_field(M, N, seed + 5);
    s.gamma2.y = oracle::random_field(M, N, seed + 6);
    return s;
}

ScalarField apply_biharmonic(const ScalarField& phi, double rho0, double rho1) {
    const double s0 = std::sqrt(rho0), s1 = std::sqrt(rho1);
    auto once = [&](const ScalarField& f) {
        ScalarField out = laplacian(f);
        out *= s1;
        ScalarField shift = f;
        shift *= s0;
        out -= shift;
        return out;
    };
    return once(once(phi));
}

}  // namespace

TEST_SUITE("admm") {

TEST_CASE("model helpers and config validation") {
    CHECK(model_has_convex_prior(Model::gmmc));
    CHECK(model_has_convex_prior(Model::rpc));
    CHECK_FALSE(model_has_convex_prior(Model::gmm));
    CHECK(model_uses_landmarks(Model::gmmlc));
    CHECK(model_uses_scribbles(Model::rp));
    CHECK(model_from_string("gmmlc") == Model::gmmlc);
    CHECK_FALSE(model_from_string("nope").has_value());
    CHECK(to_string(Model::rpc) == "rpc");

    AdmmConfig cfg;
    CHECK(cfg.rho2() == doctest::Approx(2.0 * std::sqrt(10.0)).epsilon(1e-15));
    CHECK_NOTHROW(cfg.validate());
    cfg.rho1 = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("zeta update projects only inside omega1 and only with the convex prior") {
    AdmmConfig cfg;
    cfg.model = Model::gmmc;
    const Region omega1 = Region::interior(3, 3);

    AdmmState s(3, 3);
    s.phi(1, 1) = 1.0;  // Laplacian at the center is -4, at edges nonnegative
    ScalarField zeta = update_zeta(s, cfg, omega1);
    CHECK(zeta(1, 1) == 0.0);
    CHECK(zeta(0, 1) == 1.0);  // outside omega1, no projection

    cfg.model = Model::gmm;
    zeta = update_zeta(s, cfg, omega1);
    CHECK(zeta(1, 1) == -4.0);

    cfg.model = Model::gmmc;
    s.gamma1(1, 1) = 8.0;  // zeta~ = -4 + 8 / rho1 with rho1 = 1
    zeta = update_zeta(s, cfg, omega1);
    CHECK(zeta(1, 1) == 4.0);
}

TEST_CASE("xi update normalizes on omega1 with the zero tie-break") {
    AdmmConfig cfg;
    const int M = 8, N = 7;
    const Region omega1 = Region::interior(M, N);
    AdmmState s = random_state(M, N, 700);
    const VectorField xi = update_xi(s, cfg, omega1);

    const VectorField grad = forward_gradient(s.phi);
    const double inv_rho2 = 1.0 / cfg.rho2();
    for (int n = 0; n < N; ++n)
        for (int m = 0; m < M; ++m) {
            const double u = grad.x(m, n) + s.gamma2.x(m, n) * inv_rho2;
            const double v = grad.y(m, n) + s.gamma2.y(m, n) * inv_rho2;
            if (omega1.contains(m, n)) {
                CHECK(std::hypot(xi.x(m, n), xi.y(m, n)) == doctest::Approx(1.0).epsilon(1e-12));
                CHECK(xi.x(m, n) * v == doctest::Approx(xi.y(m, n) * u).epsilon(1e-12));
            } else {
                CHECK(xi.x(m, n) == u);
                CHECK(xi.y(m, n) == v);
            }
        }

    AdmmState zero(M, N);
    const VectorField tie = update_xi(zero, cfg, omega1);
    CHECK(tie.x(3, 3) == 1.0);
    CHECK(tie.y(3, 3) == 0.0);
    CHECK(tie.x(0, 0) == 0.0);  // frame keeps the raw zero vector
}

TEST_CASE("rhd reduces to the proximal term when the constraint terms cancel") {
    AdmmConfig cfg;
    AdmmState s = random_state(9, 6, 800);
    for (int n = 0; n < 6; ++n)
        for (int m = 0; m < 9; ++m) {
            s.gamma1(m, n) = cfg.rho1 * s.zeta(m, n);
            s.gamma2.x(m, n) = cfg.rho2() * s.xi.x(m, n);
            s.gamma2.y(m, n) = cfg.rho2() * s.xi.y(m, n);
        }
    const ScalarField rhd = compute_rhd(s, cfg);
    for (int n = 0; n < 6; ++n)
        for (int m = 0; m < 9; ++m) CHECK(rhd(m, n) == cfg.rho0 * s.phi(m, n));
}

TEST_CASE("rhd matches the dense-matrix transcription") {
    AdmmConfig cfg;
    cfg.rho0 = 7.0;
    cfg.rho1 = 2.0;
    const int M = 5, N = 4;
    const AdmmState s = random_state(M, N, 900);

    const Eigen::MatrixXd L = oracle::dense_laplacian(M, N);
    const Eigen::MatrixXd Gx = oracle::dense_grad_x(M, N);
    const Eigen::MatrixXd Gy = oracle::dense_grad_y(M, N);
    const Eigen::VectorXd expected =
        cfg.rho0 * oracle::to_vector(s.phi) -
        L * (oracle::to_vector(s.gamma1) - cfg.rho1 * oracle::to_vector(s.zeta)) -
        Gx.transpose() * (oracle::to_vector(s.gamma2.x) - cfg.rho2() * oracle::to_vector(s.xi.x)) -
        Gy.transpose() * (oracle::to_vector(s.gamma2.y) - cfg.rho2() * oracle::to_vector(s.xi.y));

    const ScalarField rhd = compute_rhd(s, cfg);
    for (int n = 0; n < N; ++n)
        for (int m = 0; m < M; ++m)
            CHECK(rhd(m, n) == doctest::Approx(expected[oracle::flat(m, n, M)]).epsilon(1e-12));
}

TEST_CASE("phi update fixes constants and satisfies the fourth-order equation") {
    AdmmConfig cfg;
    const int M = 16, N = 12;
    const PhiSolver solver(M, N, cfg.rho0, cfg.rho1);

    AdmmState s(M, N);
    s.phi.fill(3.25);
    const ScalarField rhd = compute_rhd(s, cfg);  // rho0 * phi with zeroed rest
    const ScalarField same =
        update_phi(s, rhd, ScalarField(M, N, 0.0), ScalarField(M, N, 0.0), 1.0, cfg, solver);
    for (int n = 0; n < N; ++n)
        for (int m = 0; m < M; ++m) CHECK(same(m, n) == doctest::Approx(3.25).epsilon(1e-12));

    AdmmState r = random_state(M, N, 1000);
    const ScalarField f = oracle::random_field(M, N, 1100);
    const ScalarField g = oracle::random_field(M, N, 1101);
    const ScalarField rhd2 = compute_rhd(r, cfg);
    const ScalarField next = update_phi(r, rhd2, f, g, 1.0, cfg, solver);
    ScalarField rhs = rhd2;
    rhs -= f_prime(r.phi, f, g, 1.0);
    const ScalarField residual = apply_biharmonic(next, cfg.rho0, cfg.rho1) - rhs;
    CHECK(max_abs(residual) <= 1e-7);
}

TEST_CASE("multiplier step accumulates the primal residuals") {
    AdmmConfig cfg;
    cfg.rho1 = 2.0;
    AdmmState s = random_state(6, 5, 1200);
    const ScalarField g1 = s.gamma1;
    const VectorField g2 = s.gamma2;
    update_multipliers(s, cfg);
    const ScalarField lap = laplacian(s.phi);
    const VectorField grad = forward_gradient(s.phi);
    for (int n = 0; n < 5; ++n)
        for (int m = 0; m < 6; ++m) {
            CHECK(s.gamma1(m, n) ==
                  doctest::Approx(g1(m, n) + cfg.rho1 * (lap(m, n) - s.zeta(m, n))).epsilon(1e-14));
            CHECK(s.gamma2.x(m, n) ==
                  doctest::Approx(g2.x(m, n) + cfg.rho2() * (grad.x(m, n) - s.xi.x(m, n)))
                      .epsilon(1e-14));
        }
}

TEST_CASE("landmark solver keeps the penalized equation and pins phi near zero") {
    const int M = 32, N = 24;
    const double rho0 = 10.0, rho1 = 1.0, theta = 1000.0;
    const std::vector<PixelCoord> landmarks = {{5, 5}, {20, 11}, {9, 20}, {28, 3}};
    const PhiSolver solver(M, N, rho0, rho1, landmarks, theta);

    const ScalarField rhs = oracle::random_field(M, N, 1400);
    const ScalarField phi = solver.solve(rhs);

    // Residual of (B + theta * sum e_k e_k^T) phi = rhs.
    ScalarField lhs = apply_biharmonic(phi, rho0, rho1);
    for (const PixelCoord& p : landmarks) lhs(p.m, p.n) += theta * phi(p.m, p.n);
    CHECK(max_abs(lhs - rhs) <= 1e-8);

    // The plain solve has O(1) values at the landmarks; the penalty shrinks
    // them by roughly theta * G(0).
    const ScalarField plain = PhiSolver(M, N, rho0, rho1).solve(rhs);
    for (const PixelCoord& p : landmarks) {
        CHECK(std::abs(phi(p.m, p.n)) <= 0.05 * std::max(1.0, std::abs(plain(p.m, p.n))));
    }
}

TEST_CASE("gmm and gmmc trajectories are bit-identical while zeta~ stays nonnegative") {
    // Premise-controlled fixture: clean disk, fixed forces, few iterations.
    const SynthScene scene = synth_scene(SynthShape::disk, 48, 48, 0.0, 1);
    const int M = 48, N = 48;
    const Region omega1 = Region::interior(M, N);

    AdmmConfig unconstrained;
    unconstrained.model = Model::gmm;
    AdmmConfig constrained;
    constrained.model = Model::gmmc;

    // Exact radial cone: its five-point Laplacian is strictly positive away
    // from the frame, unlike the swept SDF whose staircase has tiny dips.
    ScalarField phi0(M, N);
    for (int n = 0; n < N; ++n)
        for (int m = 0; m < M; ++m)
            phi0(m, n) = std::hypot(m - 23.5, n - 23.5) - 12.0;
    const ScalarField g = edge_detector(scene.image, 0.1, 10.0);
    const ScalarField f =
        region_force(gmm_posterior(scene.image, gmm_update_params(scene.image, phi0, 1.0)), 1.0,
                     1.0);
    const PhiSolver solver(M, N, 10.0, 1.0);

    AdmmState a(M, N), b(M, N);
    a.phi = phi0;
    b.phi = phi0;
    // Step both trajectories only while zeta~ stays nonnegative on the
    // interior, i.e. while the projection in the constrained model is a no-op.
    // On the evolved field zeta~ eventually dips below zero, so the premise
    // holds for a prefix of the run; the comparison covers that prefix.
    int identical_iters = 0;
    for (int t = 0; t < 12; ++t) {
        a.zeta = update_zeta(a, unconstrained, omega1);  // zeta~ itself
        double min_zeta_tilde = 1e300;
        for (int n = 0; n < N; ++n)
            for (int m = 0; m < M; ++m)
                if (omega1.contains(m, n)) min_zeta_tilde = std::min(min_zeta_tilde, a.zeta(m, n));
        if (min_zeta_tilde < 0.0) break;  // projection would engage from here on
        b.zeta = update_zeta(b, constrained, omega1);

        a.xi = update_xi(a, unconstrained, omega1);
        b.xi = update_xi(b, constrained, omega1);
        a.phi = update_phi(a, compute_rhd(a, unconstrained), f, g, 1.0, unconstrained, solver);
        b.phi = update_phi(b, compute_rhd(b, constrained), f, g, 1.0, constrained, solver);
        update_multipliers(a, unconstrained);
        update_multipliers(b, constrained);
        ++identical_iters;
    }
    REQUIRE(identical_iters >= 1);
    for (int n = 0; n < N; ++n)
        for (int m = 0; m < M; ++m) {
            CHECK(a.phi(m, n) == b.phi(m, n));
            CHECK(a.gamma1(m, n) == b.gamma1(m, n));
        }
}

TEST_CASE("run_segmentation segments a clean disk and reports diagnostics") {
    const SynthScene scene = synth_scene(SynthShape::disk, 48, 48, 0.0, 2);
    BinaryMask init(48, 48);
    for (int n = 0; n < 48; ++n)
        for (int m = 0; m < 48; ++m)
            if ((m - 23.5) * (m - 23.5) + (n - 23.5) * (n - 23.5) <= 15.0 * 15.0) init(m, n) = 0;

    AdmmConfig cfg;
    cfg.model = Model::gmmc;
    cfg.num_iters = 150;
    ForceConfig fcfg;
    fcfg.lambda = 1e-3;  // keep the class variances honest on [0,1] intensities
    fcfg.eps = 1.4;
    fcfg.w0 = 2.0;
    fcfg.w1 = 1.0;
    const SegmentationResult result =
        run_segmentation(scene.image, init, LabelSet{}, cfg, fcfg, &scene.truth);

    CHECK(dice_coefficient(result.mask, scene.truth) >= 0.95);
    REQUIRE(!result.history.empty());
    CHECK(result.history.size() == std::size_t(result.iterations));
    CHECK(result.history.front().dice.has_value());
    CHECK(result.history.back().res_zeta < result.history.front().res_zeta);
    for (const IterationStats& s : result.history) CHECK(std::isfinite(s.energy));
    CHECK(result.phi.all_finite());
    CHECK(mask_from_sdf(result.phi) == result.mask);
}

TEST_CASE("run_segmentation validates model-label consistency") {
    const SynthScene scene = synth_scene(SynthShape::disk, 32, 32, 0.0, 3);
    BinaryMask init(32, 32);
    for (int n = 12; n < 20; ++n)
        for (int m = 12; m < 20; ++m) init(m, n) = 0;
    AdmmConfig cfg;
    ForceConfig fcfg;

    cfg.model = Model::gmmlc;
    CHECK_THROWS_AS(run_segmentation(scene.image, init, LabelSet{}, cfg, fcfg), ConfigError);
    cfg.model = Model::rpc;
    CHECK_THROWS_AS(run_segmentation(scene.image, init, LabelSet{}, cfg, fcfg), ConfigError);
    cfg.model = Model::gmm;
    cfg.num_iters = 0;
    CHECK_THROWS_AS(run_segmentation(scene.image, init, LabelSet{}, cfg, fcfg), ConfigError);
}

TEST_CASE("run_segmentation detects non-finite blowups") {
    const SynthScene scene = synth_scene(SynthShape::disk, 24, 24, 0.0, 4);
    BinaryMask init(24, 24);
    for (int n = 8; n < 16; ++n)
        for (int m = 8; m < 16; ++m) init(m, n) = 0;
    AdmmConfig cfg;
    cfg.model = Model::gmm;
    ForceConfig fcfg;
    fcfg.lambda = 1e-4;  // tight variances saturate the posterior clamp
    fcfg.w1 = 1e308;     // so the region force overflows on the first pass
    try {
        run_segmentation(scene.image, init, LabelSet{}, cfg, fcfg);
        FAIL("expected NonFiniteStateError");
    } catch (const NonFiniteStateError& err) {
        CHECK(err.iteration() == 0);
    }
}

}  // TEST_SUITE
