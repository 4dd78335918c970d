#pragma once

#include <array>
#include <vector>

#include "cvxseg/field.hpp"

namespace cvxseg {

/// Interleaved image with 1 (gray) or 3 (RGB) channels, values in [0, 1].
class Image {
public:
    Image() = default;
    Image(int width, int height, int channels, double fill = 0.0);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int channels() const noexcept { return channels_; }

    double& operator()(int m, int n, int c = 0) {
        return values_[(static_cast<std::size_t>(n) * width_ + m) * channels_ + c];
    }
    double operator()(int m, int n, int c = 0) const {
        return values_[(static_cast<std::size_t>(n) * width_ + m) * channels_ + c];
    }

    std::vector<double>& values() noexcept { return values_; }
    const std::vector<double>& values() const noexcept { return values_; }

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 1;
    std::vector<double> values_;
};

/// User-supplied constraints: landmark points the contour should pass
/// through, and object/background scribbles for the region prior.
struct LabelSet {
    std::vector<PixelCoord> landmarks;
    std::vector<PixelCoord> object;      // R_ob
    std::vector<PixelCoord> background;  // R_bg
};

/// Two-class mixture estimate; component 1 covers {phi > 0} (the complement
/// of the object set), component 0 covers {phi <= 0}.  Covariances carry the
/// diagonal loading already.
struct GmmParams {
    int dim = 1;  // channels, 1 or 3
    std::array<double, 2> proportion{};
    std::array<std::array<double, 3>, 2> mean{};
    std::array<std::array<double, 9>, 2> cov{};  // row-major dim x dim
};

/// Force-construction parameters; all strictly positive.
struct ForceConfig {
    double w0 = 1.0;       // weight of the background log term
    double w1 = 1.0;       // weight of the object log term
    double alpha = 0.1;    // edge detector scale
    double beta = 10.0;    // edge detector contrast
    double eps = 1.0;      // Heaviside regularization width (pixels)
    double a1 = 0.1;       // region prior spatial weight
    double a2 = 10.0;      // region prior intensity weight
    double eps_p = 0.01;   // region prior denominator floor
    double lambda = 0.1;   // GMM covariance diagonal loading

    void validate() const;  // throws ConfigError unless all fields are positive
};

/// Lower clamp for probabilities entering logarithms.
inline constexpr double kProbabilityFloor = 1e-6;

/// Subsampling cap for each scribble set in the region prior.
inline constexpr int kPriorLabelCap = 2000;

/// Value triple of the regularized Heaviside family at one argument:
///   h     = 1/2 + arctan(s / eps) / pi,
///   delta = eps / (eps^2 + s^2),
///   delta_prime = -2 eps s / (eps^2 + s^2)^2.
struct HeavisideValue {
    double h = 0.0;
    double delta = 0.0;
    double delta_prime = 0.0;
};

HeavisideValue regularized_heaviside(double s, double eps);

/// Edge indicator g = alpha / (1 + beta * |grad(G * I)|): 3x3 binomial
/// smoothing, Sobel derivatives (Euclidean norm across all channels),
/// replicated borders.
ScalarField edge_detector(const Image& img, double alpha, double beta);

/// Weighted-moment re-estimation with soft memberships q1 = H_eps(phi),
/// q0 = 1 - q1; covariances get lambda * I added.  Throws
/// DegenerateClassError when a class's total mass is ~0.
GmmParams gmm_update_params(const Image& img, const ScalarField& phi, double eps,
                            double lambda = 0.1);

/// Posterior probability of class 1 per pixel, clamped to
/// [kProbabilityFloor, 1 - kProbabilityFloor].
ScalarField gmm_posterior(const Image& img, const GmmParams& params);

/// Scribble-based prior of belonging to the background of the object set:
///   p(x) = sum_{bg} e^{-E(x,y)} / sum_{ob+bg} e^{-E(x,y)},
///   E(x,y) = a1 * |x - y|^2 + a2 * |I(x) - I(y)|^2,
/// 0.5 where the denominator falls below eps_p; forced to 1 on R_bg and 0 on
/// R_ob.  Each scribble set larger than kPriorLabelCap is subsampled with a
/// deterministic stride.  Throws EmptyLabelsError when either set is empty.
ScalarField prior_probability(const Image& img, const LabelSet& labels,
                              const ForceConfig& cfg);

/// Pointwise region force f = -w1 * ln(p1) + w0 * ln(1 - p1); requires
/// p1 in (0, 1), which upstream clamping guarantees.
ScalarField region_force(const ScalarField& p1, double w0, double w1);

/// Clamps a probability map into [floor, 1 - floor].
ScalarField clamp_probability(ScalarField p, double floor = kProbabilityFloor);

/// Variational force F'(phi) = delta_eps(phi) * f + delta_eps'(phi) * g.
ScalarField f_prime(const ScalarField& phi, const ScalarField& f,
                    const ScalarField& g, double eps);

}  // namespace cvxseg
