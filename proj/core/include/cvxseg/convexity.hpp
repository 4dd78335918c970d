#pragma once

#include <vector>

#include "cvxseg/field.hpp"
#include "cvxseg/sdf.hpp"

namespace cvxseg {

/// Convexity check of one sublevel set {phi <= level}.
struct SublevelResult {
    double level = 0.0;
    bool convex = false;
    bool empty = false;  // empty sublevels count as (vacuously) convex
};

/// Aggregate output of the convexity validators.
struct ConvexityReport {
    double max_violation = 0.0;          // max over region of max(0, -Lap(phi))
    PixelCoord worst_pixel{};            // argmax of the violation
    bool mask_convex = false;            // zero-sublevel object convexity
    std::vector<SublevelResult> sublevels;

    /// True when the zero level and every tested sublevel are convex.
    bool all_convex() const {
        if (!mask_convex) return false;
        for (const SublevelResult& s : sublevels)
            if (!s.convex) return false;
        return true;
    }
};

/// Largest positive part of -Lap(phi) over the region, with its location.
/// A smooth convex-interior SDF scores ~0; concavities score > 0.
double laplacian_violation(const ScalarField& phi, const Region& region,
                           PixelCoord* worst = nullptr);

/// Digital convexity of the object set: every pixel center inside the convex
/// hull of the object pixel centers (inclusive, exact integer arithmetic)
/// must lie within tol_px of some object pixel (exact Euclidean distance
/// transform).  Throws EmptyObjectError when the mask has no object pixel.
bool is_mask_convex(const BinaryMask& mask, double tol_px = 1.0);

/// Checks every sublevel set {phi <= level} for digital convexity and fills
/// the Laplacian-violation summary over the grid interior.  Requires phi to
/// be a plausible SDF (eikonal residual <= 0.1).
ConvexityReport sublevel_convexity_oracle(const SdfField& phi,
                                          const std::vector<double>& levels,
                                          double tol_px = 1.0);

/// Squared Euclidean distance to the nearest object pixel, exact, by the
/// two-pass lower-envelope distance transform.  Infinity when no object
/// pixel exists.
ScalarField squared_distance_to_object(const BinaryMask& mask);

}  // namespace cvxseg
