#include "cvxseg/sdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cvxseg/errors.hpp"

namespace cvxseg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kSweepPasses = 3;

// Two-point upwind solution of |grad d| = 1 given the axis minima a, b.
double quadratic_update(double a, double b) {
    const double lo = std::min(a, b), hi = std::max(a, b);
    if (hi - lo >= 1.0 || hi == kInf) return lo + 1.0;
    return 0.5 * (a + b + std::sqrt(2.0 - (a - b) * (a - b)));
}

}  // namespace

int BinaryMask::object_count() const {
    int count = 0;
    for (std::uint8_t v : values)
        if (v == 0) ++count;
    return count;
}

SdfField sdf_from_mask(const BinaryMask& mask) {
    const int M = mask.width, N = mask.height;
    if (M < 1 || N < 1) throw std::invalid_argument("sdf_from_mask: empty mask");
    const int objects = mask.object_count();
    if (objects == 0) throw AllBackgroundError("sdf_from_mask: mask has no object pixel");
    if (objects == M * N) throw AllForegroundError("sdf_from_mask: mask has no background pixel");

    ScalarField dist(M, N, kInf);
    std::vector<std::uint8_t> frozen(static_cast<std::size_t>(M) * N, 0);

    // Interface seeds: the boundary crosses halfway to any differing
    // 4-neighbor; axis distances combine as 1/sqrt(sum 1/d_i^2).
    for (int n = 0; n < N; ++n) {
        for (int m = 0; m < M; ++m) {
            const std::uint8_t v = mask(m, n);
            const bool dx = (m > 0 && mask(m - 1, n) != v) || (m + 1 < M && mask(m + 1, n) != v);
            const bool dy = (n > 0 && mask(m, n - 1) != v) || (n + 1 < N && mask(m, n + 1) != v);
            if (!dx && !dy) continue;
            double inv_sq = 0.0;
            if (dx) inv_sq += 4.0;  // (1/0.5)^2
            if (dy) inv_sq += 4.0;
            dist(m, n) = 1.0 / std::sqrt(inv_sq);
            frozen[static_cast<std::size_t>(n) * M + m] = 1;
        }
    }

    auto relax = [&](int m, int n) {
        if (frozen[static_cast<std::size_t>(n) * M + m]) return;
        const double a = std::min(m > 0 ? dist(m - 1, n) : kInf,
                                  m + 1 < M ? dist(m + 1, n) : kInf);
        const double b = std::min(n > 0 ? dist(m, n - 1) : kInf,
                                  n + 1 < N ? dist(m, n + 1) : kInf);
        if (a == kInf && b == kInf) return;
        dist(m, n) = std::min(dist(m, n), quadratic_update(a, b));
    };

    for (int pass = 0; pass < kSweepPasses; ++pass) {
        for (int n = 0; n < N; ++n)
            for (int m = 0; m < M; ++m) relax(m, n);
        for (int n = 0; n < N; ++n)
            for (int m = M - 1; m >= 0; --m) relax(m, n);
        for (int n = N - 1; n >= 0; --n)
            for (int m = 0; m < M; ++m) relax(m, n);
        for (int n = N - 1; n >= 0; --n)
            for (int m = M - 1; m >= 0; --m) relax(m, n);
    }

    SdfField phi(M, N);
    for (int n = 0; n < N; ++n)
        for (int m = 0; m < M; ++m)
            phi(m, n) = mask.is_object(m, n) ? -dist(m, n) : dist(m, n);
    return phi;
}

BinaryMask mask_from_sdf(const ScalarField& phi) {
    BinaryMask mask(phi.width(), phi.height());
    for (int n = 0; n < phi.height(); ++n)
        for (int m = 0; m < phi.width(); ++m)
            mask(m, n) = phi(m, n) <= 0.0 ? 0 : 1;
    return mask;
}

double eikonal_residual(const SdfField& phi) {
    const int M = phi.width(), N = phi.height();
    std::vector<double> far_band, interior;
    for (int n = 1; n < N - 1; ++n) {
        for (int m = 1; m < M - 1; ++m) {
            const double gx = 0.5 * (phi(m + 1, n) - phi(m - 1, n));
            const double gy = 0.5 * (phi(m, n + 1) - phi(m, n - 1));
            const double res = std::abs(std::hypot(gx, gy) - 1.0);
            interior.push_back(res);
            if (std::abs(phi(m, n)) >= 2.0) far_band.push_back(res);
        }
    }
    std::vector<double>& pool = far_band.empty() ? interior : far_band;
    if (pool.empty()) return 0.0;
    const std::size_t mid = pool.size() / 2;
    std::nth_element(pool.begin(), pool.begin() + mid, pool.end());
    double median = pool[mid];
    if (pool.size() % 2 == 0) {
        const double below = *std::max_element(pool.begin(), pool.begin() + mid);
        median = 0.5 * (median + below);
    }
    return median;
}

double dice_coefficient(const BinaryMask& a, const BinaryMask& b) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument("dice_coefficient: shape mismatch");
    long long inter = 0, total = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const bool in_a = a.values[i] == 0, in_b = b.values[i] == 0;
        inter += (in_a && in_b) ? 1 : 0;
        total += (in_a ? 1 : 0) + (in_b ? 1 : 0);
    }
    if (total == 0) return 1.0;
    return 2.0 * static_cast<double>(inter) / static_cast<double>(total);
}

}  // namespace cvxseg
