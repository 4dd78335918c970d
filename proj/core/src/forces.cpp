#include "cvxseg/forces.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cvxseg/errors.hpp"

namespace cvxseg {

namespace {

// Inverse and log-determinant of a symmetric positive definite d x d matrix,
// d <= 3 (closed form).
struct SmallInverse {
    std::array<double, 9> inv{};
    double log_det = 0.0;
};

SmallInverse invert_spd(const std::array<double, 9>& a, int d) {
    SmallInverse out;
    if (d == 1) {
        if (a[0] <= 0.0) throw DegenerateClassError("covariance not positive definite");
        out.inv[0] = 1.0 / a[0];
        out.log_det = std::log(a[0]);
        return out;
    }
    if (d == 2) {
        const double det = a[0] * a[4] - a[1] * a[3];
        if (det <= 0.0) throw DegenerateClassError("covariance not positive definite");
        out.inv[0] = a[4] / det;
        out.inv[1] = -a[1] / det;
        out.inv[3] = -a[3] / det;
        out.inv[4] = a[0] / det;
        out.log_det = std::log(det);
        return out;
    }
    const double c00 = a[4] * a[8] - a[5] * a[7];
    const double c01 = a[5] * a[6] - a[3] * a[8];
    const double c02 = a[3] * a[7] - a[4] * a[6];
    const double det = a[0] * c00 + a[1] * c01 + a[2] * c02;
    if (det <= 0.0) throw DegenerateClassError("covariance not positive definite");
    out.inv[0] = c00 / det;
    out.inv[1] = (a[2] * a[7] - a[1] * a[8]) / det;
    out.inv[2] = (a[1] * a[5] - a[2] * a[4]) / det;
    out.inv[3] = c01 / det;
    out.inv[4] = (a[0] * a[8] - a[2] * a[6]) / det;
    out.inv[5] = (a[2] * a[3] - a[0] * a[5]) / det;
    out.inv[6] = c02 / det;
    out.inv[7] = (a[1] * a[6] - a[0] * a[7]) / det;
    out.inv[8] = (a[0] * a[4] - a[1] * a[3]) / det;
    out.log_det = std::log(det);
    return out;
}

double mahalanobis_sq(const double* x, const std::array<double, 3>& mu,
                      const std::array<double, 9>& inv, int d) {
    double diff[3] = {0, 0, 0};
    for (int c = 0; c < d; ++c) diff[c] = x[c] - mu[c];
    double acc = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) acc += diff[i] * inv[static_cast<std::size_t>(i) * d + j] * diff[j];
    return acc;
}

// Deterministic stride subsample keeping at most cap points.
std::vector<PixelCoord> subsample(const std::vector<PixelCoord>& points, int cap) {
    if (static_cast<int>(points.size()) <= cap) return points;
    const std::size_t stride = (points.size() + cap - 1) / cap;
    std::vector<PixelCoord> out;
    out.reserve(points.size() / stride + 1);
    for (std::size_t i = 0; i < points.size(); i += stride) out.push_back(points[i]);
    return out;
}

void check_in_range(const Image& img, const std::vector<PixelCoord>& points,
                    const char* what) {
    for (const PixelCoord& p : points)
        if (p.m < 0 || p.m >= img.width() || p.n < 0 || p.n >= img.height())
            throw ConfigError(std::string(what) + ": pixel coordinate out of range");
}

}  // namespace

void ForceConfig::validate() const {
    const double fields[] = {w0, w1, alpha, beta, eps, a1, a2, eps_p, lambda};
    for (double v : fields)
        if (!(v > 0.0)) throw ConfigError("ForceConfig: all parameters must be positive");
}

Image::Image(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels) {
    if (width < 1 || height < 1) throw std::invalid_argument("Image: empty dimensions");
    if (channels != 1 && channels != 3)
        throw std::invalid_argument("Image: channels must be 1 or 3");
    values_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

HeavisideValue regularized_heaviside(double s, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("regularized_heaviside: eps must be positive");
    HeavisideValue v;
    const double denom = eps * eps + s * s;
    v.h = 0.5 + std::atan(s / eps) / std::numbers::pi;
    v.delta = eps / denom;
    v.delta_prime = -2.0 * eps * s / (denom * denom);
    return v;
}

ScalarField edge_detector(const Image& img, double alpha, double beta) {
    if (alpha <= 0.0 || beta <= 0.0)
        throw std::invalid_argument("edge_detector: alpha and beta must be positive");
    const int M = img.width(), N = img.height(), d = img.channels();

    // 3x3 binomial smoothing per channel, replicated borders.
    std::vector<ScalarField> smooth(d, ScalarField(M, N));
    static constexpr double kBinomial[3] = {0.25, 0.5, 0.25};
    for (int c = 0; c < d; ++c) {
        for (int n = 0; n < N; ++n) {
            for (int m = 0; m < M; ++m) {
                double acc = 0.0;
                for (int j = -1; j <= 1; ++j)
                    for (int i = -1; i <= 1; ++i) {
                        const int mm = std::clamp(m + i, 0, M - 1);
                        const int nn = std::clamp(n + j, 0, N - 1);
                        acc += kBinomial[i + 1] * kBinomial[j + 1] * img(mm, nn, c);
                    }
                smooth[c](m, n) = acc;
            }
        }
    }

    // Sobel derivatives; the edge magnitude is the Euclidean norm over both
    // derivatives of every channel.
    ScalarField g(M, N);
    for (int n = 0; n < N; ++n) {
        for (int m = 0; m < M; ++m) {
            double mag_sq = 0.0;
            for (int c = 0; c < d; ++c) {
                double gx = 0.0, gy = 0.0;
                for (int j = -1; j <= 1; ++j)
                    for (int i = -1; i <= 1; ++i) {
                        const double v = smooth[c].at_ext(m + i, n + j);
                        const double wx = (i == 0) ? 0.0 : (j == 0 ? 2.0 : 1.0) * i;
                        const double wy = (j == 0) ? 0.0 : (i == 0 ? 2.0 : 1.0) * j;
                        gx += wx * v;
                        gy += wy * v;
                    }
                mag_sq += gx * gx + gy * gy;
            }
            g(m, n) = alpha / (1.0 + beta * std::sqrt(mag_sq));
        }
    }
    return g;
}

GmmParams gmm_update_params(const Image& img, const ScalarField& phi, double eps,
                            double lambda) {
    if (img.width() != phi.width() || img.height() != phi.height())
        throw std::invalid_argument("gmm_update_params: shape mismatch");
    const int M = img.width(), N = img.height(), d = img.channels();
    const double total = static_cast<double>(M) * N;

    GmmParams params;
    params.dim = d;

    // Soft memberships: q1 = H_eps(phi) covers {phi > 0}, q0 the complement.
    ScalarField q1(M, N);
    double mass[2] = {0.0, 0.0};
    for (int n = 0; n < N; ++n)
        for (int m = 0; m < M; ++m) {
            const double h = regularized_heaviside(phi(m, n), eps).h;
            q1(m, n) = h;
            mass[1] += h;
            mass[0] += 1.0 - h;
        }
    for (int i = 0; i < 2; ++i) {
        if (mass[i] < 1e-9)
            throw DegenerateClassError("gmm_update_params: class " + std::to_string(i) +
                                       " has vanishing mass");
        params.proportion[i] = mass[i] / total;
    }

    for (int n = 0; n < N; ++n)
        for (int m = 0; m < M; ++m) {
            const double w[2] = {1.0 - q1(m, n), q1(m, n)};
            for (int i = 0; i < 2; ++i)
                for (int c = 0; c < d; ++c) params.mean[i][c] += w[i] * img(m, n, c);
        }
    for (int i = 0; i < 2; ++i)
        for (int c = 0; c < d; ++c) params.mean[i][c] /= mass[i];

    for (int n = 0; n < N; ++n)
        for (int m = 0; m < M; ++m) {
            const double w[2] = {1.0 - q1(m, n), q1(m, n)};
            for (int i = 0; i < 2; ++i) {
                double diff[3];
                for (int c = 0; c < d; ++c) diff[c] = img(m, n, c) - params.mean[i][c];
                for (int r = 0; r < d; ++r)
                    for (int c = 0; c < d; ++c)
                        params.cov[i][static_cast<std::size_t>(r) * d + c] += w[i] * diff[r] * diff[c];
            }
        }
    for (int i = 0; i < 2; ++i) {
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) params.cov[i][static_cast<std::size_t>(r) * d + c] /= mass[i];
        for (int c = 0; c < d; ++c) params.cov[i][static_cast<std::size_t>(c) * d + c] += lambda;
    }
    return params;
}

ScalarField gmm_posterior(const Image& img, const GmmParams& params) {
    const int M = img.width(), N = img.height(), d = img.channels();
    if (params.dim != d) throw std::invalid_argument("gmm_posterior: channel mismatch");

    SmallInverse inv[2] = {invert_spd(params.cov[0], d), invert_spd(params.cov[1], d)};
    ScalarField p1(M, N);
    for (int n = 0; n < N; ++n) {
        for (int m = 0; m < M; ++m) {
            const double* x = &img.values()[(static_cast<std::size_t>(n) * M + m) * d];
            double log_num[2];
            for (int i = 0; i < 2; ++i)
                log_num[i] = std::log(params.proportion[i]) -
                             0.5 * mahalanobis_sq(x, params.mean[i], inv[i].inv, d) -
                             0.5 * inv[i].log_det;
            // The (2 pi)^{-d/2} factors cancel in the ratio.
            const double p = 1.0 / (1.0 + std::exp(log_num[0] - log_num[1]));
            p1(m, n) = std::clamp(p, kProbabilityFloor, 1.0 - kProbabilityFloor);
        }
    }
    return p1;
}

ScalarField prior_probability(const Image& img, const LabelSet& labels,
                              const ForceConfig& cfg) {
    if (labels.object.empty())
        throw EmptyLabelsError("prior_probability: no object scribbles");
    if (labels.background.empty())
        throw EmptyLabelsError("prior_probability: no background scribbles");
    check_in_range(img, labels.object, "prior_probability");
    check_in_range(img, labels.background, "prior_probability");

    const int M = img.width(), N = img.height(), d = img.channels();
    const std::vector<PixelCoord> ob = subsample(labels.object, kPriorLabelCap);
    const std::vector<PixelCoord> bg = subsample(labels.background, kPriorLabelCap);

    auto affinity = [&](int m, int n, const PixelCoord& y) {
        const double dm = m - y.m, dn = n - y.n;
        double color = 0.0;
        for (int c = 0; c < d; ++c) {
            const double dc = img(m, n, c) - img(y.m, y.n, c);
            color += dc * dc;
        }
        return std::exp(-(cfg.a1 * (dm * dm + dn * dn) + cfg.a2 * color));
    };

    ScalarField p1(M, N);
    for (int n = 0; n < N; ++n) {
        for (int m = 0; m < M; ++m) {
            double num = 0.0;
            for (const PixelCoord& y : bg) num += affinity(m, n, y);
            double den = num;
            for (const PixelCoord& y : ob) den += affinity(m, n, y);
            p1(m, n) = den < cfg.eps_p ? 0.5 : num / den;
        }
    }
    for (const PixelCoord& y : labels.background) p1(y.m, y.n) = 1.0;
    for (const PixelCoord& y : labels.object) p1(y.m, y.n) = 0.0;
    return p1;
}

ScalarField region_force(const ScalarField& p1, double w0, double w1) {
    ScalarField f(p1.width(), p1.height());
    auto src = p1.values();
    auto dst = f.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        const double p = src[i];
        if (p <= 0.0 || p >= 1.0)
            throw std::invalid_argument("region_force: probability outside (0, 1)");
        dst[i] = -w1 * std::log(p) + w0 * std::log(1.0 - p);
    }
    return f;
}

ScalarField clamp_probability(ScalarField p, double floor) {
    for (double& v : p.values()) v = std::clamp(v, floor, 1.0 - floor);
    return p;
}

ScalarField f_prime(const ScalarField& phi, const ScalarField& f,
                    const ScalarField& g, double eps) {
    if (!phi.same_shape(f) || !phi.same_shape(g))
        throw std::invalid_argument("f_prime: shape mismatch");
    ScalarField out(phi.width(), phi.height());
    auto vp = phi.values();
    auto vf = f.values();
    auto vg = g.values();
    auto vo = out.values();
    for (std::size_t i = 0; i < vp.size(); ++i) {
        const HeavisideValue hv = regularized_heaviside(vp[i], eps);
        vo[i] = hv.delta * vf[i] + hv.delta_prime * vg[i];
    }
    return out;
}

}  // namespace cvxseg
