#include "cvxseg/convexity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cvxseg/errors.hpp"

namespace cvxseg {

namespace {

using std::int64_t;

int64_t cross(const PixelCoord& o, const PixelCoord& a, const PixelCoord& b) {
    return static_cast<int64_t>(a.m - o.m) * (b.n - o.n) -
           static_cast<int64_t>(a.n - o.n) * (b.m - o.m);
}

// Andrew's monotone chain; returns the hull counter-clockwise with collinear
// points dropped.  Handles degenerate inputs (point, segment) gracefully.
std::vector<PixelCoord> convex_hull(std::vector<PixelCoord> pts) {
    std::sort(pts.begin(), pts.end(), [](const PixelCoord& a, const PixelCoord& b) {
        return a.m != b.m ? a.m < b.m : a.n < b.n;
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t n = pts.size();
    if (n <= 2) return pts;
    std::vector<PixelCoord> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

// Inclusive point-in-convex-polygon test with exact integer arithmetic.
// The hull is counter-clockwise; boundary points count as inside.
bool inside_hull(const std::vector<PixelCoord>& hull, const PixelCoord& p) {
    const std::size_t n = hull.size();
    if (n == 0) return false;
    if (n == 1) return hull[0] == p;
    if (n == 2) {
        if (cross(hull[0], hull[1], p) != 0) return false;
        return p.m >= std::min(hull[0].m, hull[1].m) && p.m <= std::max(hull[0].m, hull[1].m) &&
               p.n >= std::min(hull[0].n, hull[1].n) && p.n <= std::max(hull[0].n, hull[1].n);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (cross(hull[i], hull[(i + 1) % n], p) < 0) return false;
    }
    return true;
}

// Stand-in for an unreachable squared distance; any finite parabola beats it
// within grid range, so exactness of reachable distances is unaffected.
constexpr double kFarAway = 1e15;

// 1-D squared-distance lower envelope (the two-pass exact EDT building block).
void edt_1d(const std::vector<double>& f, std::vector<double>& out) {
    const int n = static_cast<int>(f.size());
    std::vector<int> v(n);
    std::vector<double> z(n + 1);
    int k = 0;
    v[0] = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    for (int q = 1; q < n; ++q) {
        double s;
        while (true) {
            const int p = v[k];
            s = ((f[q] + static_cast<double>(q) * q) - (f[p] + static_cast<double>(p) * p)) /
                (2.0 * (q - p));
            if (k > 0 && s <= z[k]) {
                --k;
            } else {
                break;
            }
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = std::numeric_limits<double>::infinity();
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        const double dq = q - v[k];
        out[q] = f[v[k]] + dq * dq;
    }
}

}  // namespace

ScalarField squared_distance_to_object(const BinaryMask& mask) {
    const int M = mask.width, N = mask.height;
    ScalarField d(M, N);
    std::vector<double> col(N), col_out(N), row(M), row_out(M);
    for (int m = 0; m < M; ++m) {
        for (int n = 0; n < N; ++n) col[n] = mask.is_object(m, n) ? 0.0 : kFarAway;
        edt_1d(col, col_out);
        for (int n = 0; n < N; ++n) d(m, n) = col_out[n];
    }
    for (int n = 0; n < N; ++n) {
        for (int m = 0; m < M; ++m) row[m] = d(m, n);
        edt_1d(row, row_out);
        for (int m = 0; m < M; ++m) d(m, n) = row_out[m];
    }
    return d;
}

double laplacian_violation(const ScalarField& phi, const Region& region,
                           PixelCoord* worst) {
    if (phi.width() != region.width() || phi.height() != region.height())
        throw std::invalid_argument("laplacian_violation: shape mismatch");
    const ScalarField lap = laplacian(phi);
    double best = 0.0;
    PixelCoord where{};
    for (int n = 0; n < phi.height(); ++n)
        for (int m = 0; m < phi.width(); ++m) {
            if (!region.contains(m, n)) continue;
            const double v = std::max(0.0, -lap(m, n));
            if (v > best) {
                best = v;
                where = {m, n};
            }
        }
    if (worst) *worst = where;
    return best;
}

bool is_mask_convex(const BinaryMask& mask, double tol_px) {
    std::vector<PixelCoord> object;
    for (int n = 0; n < mask.height; ++n)
        for (int m = 0; m < mask.width; ++m)
            if (mask.is_object(m, n)) object.push_back({m, n});
    if (object.empty()) throw EmptyObjectError("is_mask_convex: mask has no object pixel");

    const std::vector<PixelCoord> hull = convex_hull(object);
    const ScalarField dist_sq = squared_distance_to_object(mask);
    const double tol_sq = tol_px * tol_px;

    int lo_m = mask.width, hi_m = -1, lo_n = mask.height, hi_n = -1;
    for (const PixelCoord& p : hull) {
        lo_m = std::min(lo_m, p.m);
        hi_m = std::max(hi_m, p.m);
        lo_n = std::min(lo_n, p.n);
        hi_n = std::max(hi_n, p.n);
    }
    for (int n = lo_n; n <= hi_n; ++n)
        for (int m = lo_m; m <= hi_m; ++m) {
            if (!inside_hull(hull, {m, n})) continue;
            if (dist_sq(m, n) > tol_sq) return false;
        }
    return true;
}

ConvexityReport sublevel_convexity_oracle(const SdfField& phi,
                                          const std::vector<double>& levels,
                                          double tol_px) {
    if (eikonal_residual(phi) > 0.1)
        throw std::invalid_argument("sublevel_convexity_oracle: phi is not a signed distance field");

    ConvexityReport report;
    report.max_violation =
        laplacian_violation(phi, Region::interior(phi.width(), phi.height()),
                            &report.worst_pixel);

    auto sublevel_mask = [&phi](double level) {
        BinaryMask mask(phi.width(), phi.height());
        for (int n = 0; n < phi.height(); ++n)
            for (int m = 0; m < phi.width(); ++m)
                mask(m, n) = phi(m, n) <= level ? 0 : 1;
        return mask;
    };

    {
        const BinaryMask zero = sublevel_mask(0.0);
        report.mask_convex = zero.object_count() > 0 && is_mask_convex(zero, tol_px);
    }
    for (double level : levels) {
        SublevelResult res;
        res.level = level;
        const BinaryMask mask = sublevel_mask(level);
        res.empty = mask.object_count() == 0;
        res.convex = res.empty ? true : is_mask_convex(mask, tol_px);
        report.sublevels.push_back(res);
    }
    return report;
}

}  // namespace cvxseg
