#include "cvxseg/dct.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cvxseg {

namespace {

constexpr int kDirectRouteLimit = 64;

// Orthonormal cosine matrix C(k, j) = w(k) cos(pi (2j+1) k / (2J)) with
// w(0) = sqrt(1/J), w(k>0) = sqrt(2/J).
std::vector<double> cosine_matrix(int J) {
    std::vector<double> c(static_cast<std::size_t>(J) * J);
    const double w0 = std::sqrt(1.0 / J);
    const double wk = std::sqrt(2.0 / J);
    for (int k = 0; k < J; ++k) {
        const double w = (k == 0) ? w0 : wk;
        for (int j = 0; j < J; ++j)
            c[static_cast<std::size_t>(k) * J + j] =
                w * std::cos(std::numbers::pi * (2 * j + 1) * k / (2.0 * J));
    }
    return c;
}

}  // namespace

SpectralSymbol::SpectralSymbol(int width, int height, double rho1, double rho0)
    : r_(width, height), rho0_(rho0), rho1_(rho1) {
    if (rho0 <= 0.0 || rho1 < 0.0)
        throw std::invalid_argument("SpectralSymbol: need rho0 > 0 and rho1 >= 0");
    const double s0 = std::sqrt(rho0);
    const double s1 = std::sqrt(rho1);
    for (int l = 0; l < height; ++l) {
        const double cy = std::cos(std::numbers::pi * l / height);
        for (int k = 0; k < width; ++k) {
            const double cx = std::cos(std::numbers::pi * k / width);
            r_(k, l) = s0 + 2.0 * s1 * (2.0 - cx - cy);
        }
    }
}

struct Dct2::Impl {
    int width = 0;
    int height = 0;
    bool use_fft = false;

    // Direct route tables.
    std::vector<double> cos_x;  // M x M
    std::vector<double> cos_y;  // N x N

    // FFTW route: separate in/out buffers, ESTIMATE plans.
    fftw_plan plan_fwd = nullptr;
    fftw_plan plan_inv = nullptr;
    double* buf_in = nullptr;
    double* buf_out = nullptr;

    ~Impl() {
        if (plan_fwd) fftw_destroy_plan(plan_fwd);
        if (plan_inv) fftw_destroy_plan(plan_inv);
        if (buf_in) fftw_free(buf_in);
        if (buf_out) fftw_free(buf_out);
    }
};

Dct2::Dct2(int width, int height, Route route) : impl_(std::make_unique<Impl>()) {
    if (width < 1 || height < 1)
        throw std::invalid_argument("Dct2: dimensions must be positive");
    impl_->width = width;
    impl_->height = height;
    impl_->use_fft = (route == Route::fft) ||
                     (route == Route::automatic &&
                      (width > kDirectRouteLimit || height > kDirectRouteLimit));
    if (impl_->use_fft) {
        const std::size_t count = static_cast<std::size_t>(width) * height;
        impl_->buf_in = fftw_alloc_real(count);
        impl_->buf_out = fftw_alloc_real(count);
        // Row-major with n slow: dim0 = N, dim1 = M.
        impl_->plan_fwd = fftw_plan_r2r_2d(height, width, impl_->buf_in, impl_->buf_out,
                                           FFTW_REDFT10, FFTW_REDFT10, FFTW_ESTIMATE);
        impl_->plan_inv = fftw_plan_r2r_2d(height, width, impl_->buf_in, impl_->buf_out,
                                           FFTW_REDFT01, FFTW_REDFT01, FFTW_ESTIMATE);
        if (!impl_->plan_fwd || !impl_->plan_inv)
            throw std::runtime_error("Dct2: FFTW planning failed");
    } else {
        impl_->cos_x = cosine_matrix(width);
        impl_->cos_y = cosine_matrix(height);
    }
}

Dct2::~Dct2() = default;
Dct2::Dct2(Dct2&&) noexcept = default;
Dct2& Dct2::operator=(Dct2&&) noexcept = default;

int Dct2::width() const noexcept { return impl_->width; }
int Dct2::height() const noexcept { return impl_->height; }

SpectralField Dct2::forward(const ScalarField& f) const {
    const int M = impl_->width, N = impl_->height;
    if (f.width() != M || f.height() != N)
        throw std::invalid_argument("Dct2::forward: shape mismatch");
    SpectralField F(M, N);
    if (impl_->use_fft) {
        auto src = f.values();
        for (std::size_t i = 0; i < src.size(); ++i) impl_->buf_in[i] = src[i];
        fftw_execute(impl_->plan_fwd);
        // REDFT10 along both axes carries a factor 2 per axis; the orthonormal
        // coefficient is w_M(k) w_N(l) / 4 times the FFTW output.
        const double wx0 = std::sqrt(1.0 / M), wx = std::sqrt(2.0 / M);
        const double wy0 = std::sqrt(1.0 / N), wy = std::sqrt(2.0 / N);
        for (int l = 0; l < N; ++l) {
            const double sy = (l == 0 ? wy0 : wy) * 0.25;
            for (int k = 0; k < M; ++k)
                F(k, l) = (k == 0 ? wx0 : wx) * sy *
                          impl_->buf_out[static_cast<std::size_t>(l) * M + k];
        }
    } else {
        // temp(k, n) = sum_m C_M(k, m) f(m, n), then contract over n.
        std::vector<double> temp(static_cast<std::size_t>(M) * N, 0.0);
        for (int n = 0; n < N; ++n)
            for (int k = 0; k < M; ++k) {
                double acc = 0.0;
                const double* row = &impl_->cos_x[static_cast<std::size_t>(k) * M];
                for (int m = 0; m < M; ++m) acc += row[m] * f(m, n);
                temp[static_cast<std::size_t>(n) * M + k] = acc;
            }
        for (int l = 0; l < N; ++l)
            for (int k = 0; k < M; ++k) {
                double acc = 0.0;
                const double* row = &impl_->cos_y[static_cast<std::size_t>(l) * N];
                for (int n = 0; n < N; ++n) acc += row[n] * temp[static_cast<std::size_t>(n) * M + k];
                F(k, l) = acc;
            }
    }
    return F;
}

ScalarField Dct2::inverse(const SpectralField& F) const {
    const int M = impl_->width, N = impl_->height;
    if (F.width() != M || F.height() != N)
        throw std::invalid_argument("Dct2::inverse: shape mismatch");
    ScalarField f(M, N);
    if (impl_->use_fft) {
        // REDFT01 computes X(0) + 2 sum_k X(k) cos(...) per axis, so feed
        // X(0) = F_hat(0) w(0) and X(k) = F_hat(k) w(k) / 2.
        const double sx0 = std::sqrt(1.0 / M), sx = std::sqrt(2.0 / M) * 0.5;
        const double sy0 = std::sqrt(1.0 / N), sy = std::sqrt(2.0 / N) * 0.5;
        for (int l = 0; l < N; ++l) {
            const double s_l = (l == 0 ? sy0 : sy);
            for (int k = 0; k < M; ++k)
                impl_->buf_in[static_cast<std::size_t>(l) * M + k] =
                    (k == 0 ? sx0 : sx) * s_l * F(k, l);
        }
        fftw_execute(impl_->plan_inv);
        auto dst = f.values();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = impl_->buf_out[i];
    } else {
        // temp(m, l) = sum_k C_M(k, m) F(k, l), then contract over l.
        std::vector<double> temp(static_cast<std::size_t>(M) * N, 0.0);
        for (int l = 0; l < N; ++l)
            for (int m = 0; m < M; ++m) {
                double acc = 0.0;
                for (int k = 0; k < M; ++k)
                    acc += impl_->cos_x[static_cast<std::size_t>(k) * M + m] * F(k, l);
                temp[static_cast<std::size_t>(l) * M + m] = acc;
            }
        for (int n = 0; n < N; ++n)
            for (int m = 0; m < M; ++m) {
                double acc = 0.0;
                for (int l = 0; l < N; ++l)
                    acc += impl_->cos_y[static_cast<std::size_t>(l) * N + n] *
                           temp[static_cast<std::size_t>(l) * M + m];
                f(m, n) = acc;
            }
    }
    return f;
}

SpectralField dct2_forward(const ScalarField& f) {
    return Dct2(f.width(), f.height()).forward(f);
}

ScalarField dct2_inverse(const SpectralField& F) {
    return Dct2(F.width(), F.height()).inverse(F);
}

SpectralSolver::SpectralSolver(int width, int height, double rho1, double rho0,
                               Dct2::Route route)
    : dct_(width, height, route), symbol_(width, height, rho1, rho0) {}

ScalarField SpectralSolver::helmholtz(const ScalarField& rhs) const {
    SpectralField F = dct_.forward(rhs);
    for (int l = 0; l < F.height(); ++l)
        for (int k = 0; k < F.width(); ++k) F(k, l) /= -symbol_(k, l);
    return dct_.inverse(F);
}

ScalarField SpectralSolver::biharmonic(const ScalarField& rhs) const {
    SpectralField F = dct_.forward(rhs);
    for (int l = 0; l < F.height(); ++l)
        for (int k = 0; k < F.width(); ++k) {
            const double r = symbol_(k, l);
            F(k, l) /= r * r;
        }
    return dct_.inverse(F);
}

ScalarField helmholtz_solve(const ScalarField& rhs, double rho1, double rho0) {
    return SpectralSolver(rhs.width(), rhs.height(), rho1, rho0).helmholtz(rhs);
}

ScalarField biharmonic_solve(const ScalarField& rhs, double rho1, double rho0) {
    return SpectralSolver(rhs.width(), rhs.height(), rho1, rho0).biharmonic(rhs);
}

}  // namespace cvxseg
