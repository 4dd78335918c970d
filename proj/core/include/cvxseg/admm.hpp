#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cvxseg/dct.hpp"
#include "cvxseg/field.hpp"
#include "cvxseg/forces.hpp"
#include "cvxseg/sdf.hpp"

namespace cvxseg {

/// Segmentation variants: GMM-driven, region-prior-driven (RP), optional
/// landmarks (L), optional convex shape prior (trailing C).
enum class Model { gmm, gmmc, gmml, gmmlc, rp, rpc };

bool model_uses_landmarks(Model model) noexcept;
bool model_uses_scribbles(Model model) noexcept;
bool model_has_convex_prior(Model model) noexcept;
std::string to_string(Model model);
std::optional<Model> model_from_string(const std::string& name);

/// Solver parameters.  rho2 is tied to the biharmonic factorization
/// (sqrt(rho1)*Lap - sqrt(rho0)*I)^2 and therefore derived, not stored.
struct AdmmConfig {
    Model model = Model::gmmc;
    double rho0 = 10.0;
    double rho1 = 1.0;
    int num_iters = 300;
    int inner_steps = 1;
    double theta = 1000.0;  // landmark penalty weight
    double early_stop_residual = 1e-3;
    int early_stop_stable = 10;

    double rho2() const noexcept;
    bool convex_prior() const noexcept { return model_has_convex_prior(model); }
    void validate() const;  // throws ConfigError
};

/// Iterates of the splitting.  zeta approximates Lap(phi), xi approximates
/// grad(phi); gamma1, gamma2 are the multiplier estimates.
struct AdmmState {
    ScalarField phi;
    ScalarField zeta;
    VectorField xi;
    ScalarField gamma1;
    VectorField gamma2;
    int iter = 0;

    AdmmState() = default;
    AdmmState(int width, int height)
        : phi(width, height), zeta(width, height), xi(width, height),
          gamma1(width, height), gamma2(width, height) {}
};

/// zeta-update: zeta~ = Lap(phi) + gamma1 / rho1, projected onto {zeta >= 0}
/// inside omega1 when the model carries the convex prior; zeta~ unchanged
/// elsewhere and for the unconstrained models.
ScalarField update_zeta(const AdmmState& state, const AdmmConfig& cfg,
                        const Region& omega1);

/// xi-update: xi~ = grad(phi) + gamma2 / rho2, normalized to unit length
/// inside omega1 (a zero vector maps to (1, 0)); xi~ unchanged elsewhere.
VectorField update_xi(const AdmmState& state, const AdmmConfig& cfg,
                      const Region& omega1);

/// Constraint part of the phi-equation right-hand side,
///   rhd = rho0 * phi - Lap(gamma1 - rho1 * zeta) - div_adj(gamma2 - rho2 * xi),
/// evaluated with the freshly updated zeta, xi and the current multipliers.
ScalarField compute_rhd(const AdmmState& state, const AdmmConfig& cfg);

/// Solves (B + theta * sum_k e_k e_k^T) phi = rhs where B is the factorized
/// biharmonic operator; without landmarks this is one DCT solve.  With
/// landmarks the rank-K penalty is handled by precomputed Green's columns
/// G_k = B^{-1} e_k and a K x K correction (Woodbury), so phi(x_k) stays
/// O(1/theta) regardless of theta.
class PhiSolver {
public:
    PhiSolver(int width, int height, double rho0, double rho1);
    PhiSolver(int width, int height, double rho0, double rho1,
              const std::vector<PixelCoord>& landmarks, double theta);

    ScalarField solve(const ScalarField& rhs) const;
    const SpectralSolver& spectral() const noexcept { return spectral_; }

private:
    SpectralSolver spectral_;
    std::vector<PixelCoord> landmarks_;
    double theta_ = 0.0;
    std::vector<ScalarField> greens_;      // B^{-1} e_k per landmark
    std::vector<double> correction_;       // LU factors of theta^{-1} I + M
    std::vector<int> pivot_;
};

/// phi-update: inner_steps damped fixed-point steps on
///   B phi = rhd - F'(phi),  F'(phi) = delta_eps(phi) f + delta_eps'(phi) g,
/// with rhd held fixed (the proximal anchor is the outer iterate).
ScalarField update_phi(const AdmmState& state, const ScalarField& rhd,
                       const ScalarField& f, const ScalarField& g, double eps,
                       const AdmmConfig& cfg, const PhiSolver& solver);

/// Multiplier ascent: gamma1 += rho1 (Lap(phi) - zeta),
/// gamma2 += rho2 (grad(phi) - xi), using the updated phi.
void update_multipliers(AdmmState& state, const AdmmConfig& cfg);

/// One diagnostics record per outer iteration.
struct IterationStats {
    int iter = 0;
    double energy = 0.0;
    double res_zeta = 0.0;             // max |Lap(phi) - zeta|
    double res_xi = 0.0;               // max |grad(phi) - xi|
    double convexity_violation = 0.0;  // max over omega1 of max(0, -Lap(phi))
    std::optional<double> dice;        // only when a reference mask is given
};

struct SegmentationResult {
    ScalarField phi;
    BinaryMask mask;
    std::vector<IterationStats> history;
    GmmParams gmm;    // last re-estimate (GMM models only)
    int iterations = 0;
    bool early_stopped = false;
};

/// Full pipeline of Algorithm "two-phase segmentation with convex prior":
/// SDF initialization, force construction (GMM re-estimated every iteration,
/// region prior frozen), ADMM loop with early stopping, diagnostics.
/// Throws ConfigError when labels do not match the model and
/// NonFiniteStateError when an iterate leaves the finite range.
SegmentationResult run_segmentation(const Image& img, const BinaryMask& init,
                                    const LabelSet& labels, const AdmmConfig& cfg,
                                    const ForceConfig& fcfg,
                                    const BinaryMask* reference = nullptr);

}  // namespace cvxseg
