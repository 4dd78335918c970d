#pragma once

#include <cstdint>
#include <vector>

#include "cvxseg/field.hpp"

namespace cvxseg {

/// Binary segmentation mask: 0 = object, 1 = background.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> values;

    BinaryMask() = default;
    BinaryMask(int w, int h, std::uint8_t fill = 1)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t& operator()(int m, int n) {
        return values[static_cast<std::size_t>(n) * width + m];
    }
    std::uint8_t operator()(int m, int n) const {
        return values[static_cast<std::size_t>(n) * width + m];
    }

    bool is_object(int m, int n) const { return (*this)(m, n) == 0; }
    int object_count() const;

    bool operator==(const BinaryMask& other) const = default;
};

/// Signed distance field; negative inside the object, approximately
/// |grad phi| = 1 away from the interface.
using SdfField = ScalarField;

/// Signed distance to the mask interface by fast sweeping: sub-pixel seeds at
/// the interface (0.5 px along each differing 4-neighbor axis, combined as
/// 1/sqrt(sum 1/d^2) when both axes differ), then three full passes of the
/// four alternating sweep orders with the two-point upwind quadratic update.
/// Throws AllForegroundError / AllBackgroundError when the mask is constant.
SdfField sdf_from_mask(const BinaryMask& mask);

/// Zero-sublevel mask: object where phi <= 0.
BinaryMask mask_from_sdf(const ScalarField& phi);

/// Median of ||grad phi| - 1| by central differences over interior pixels at
/// least 2 px from the interface (|phi| >= 2); falls back to all interior
/// pixels when that band is empty.
double eikonal_residual(const SdfField& phi);

/// Dice overlap 2|A and B| / (|A| + |B|) of the object sets; 1.0 when both
/// objects are empty.
double dice_coefficient(const BinaryMask& a, const BinaryMask& b);

}  // namespace cvxseg
