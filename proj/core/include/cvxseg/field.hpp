#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace cvxseg {

/// Dense scalar field on an M x N pixel grid (mesh size 1).
///
/// (m, n) = (column, row); this accessor is the only place the convention is
/// mapped to storage, which is row-major with n as the slow index.  All
/// difference operators treat the boundary by ghost replication (homogeneous
/// Neumann): an out-of-range index clamps to the nearest edge pixel.
class ScalarField {
public:
    ScalarField() = default;
    ScalarField(int width, int height, double fill = 0.0);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int size() const noexcept { return width_ * height_; }

    double& operator()(int m, int n) { return values_[static_cast<std::size_t>(n) * width_ + m]; }
    double operator()(int m, int n) const { return values_[static_cast<std::size_t>(n) * width_ + m]; }

    /// Ghost-replicated read: indices clamp to [0, M) x [0, N).
    double at_ext(int m, int n) const;

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    void fill(double value);
    bool all_finite() const noexcept;
    bool same_shape(const ScalarField& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    ScalarField& operator+=(const ScalarField& other);
    ScalarField& operator-=(const ScalarField& other);
    ScalarField& operator*=(double s);

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// Pair of scalar fields (x- and y-components) of identical shape.
struct VectorField {
    ScalarField x;
    ScalarField y;

    VectorField() = default;
    VectorField(int width, int height, double fill = 0.0)
        : x(width, height, fill), y(width, height, fill) {}

    int width() const noexcept { return x.width(); }
    int height() const noexcept { return x.height(); }
    bool all_finite() const noexcept { return x.all_finite() && y.all_finite(); }
};

/// Pixel coordinate, zero-based (m = column, n = row).
struct PixelCoord {
    int m = 0;
    int n = 0;
    bool operator==(const PixelCoord&) const = default;
};

/// Pixel subset of a grid, stored as a byte mask (1 = member).
class Region {
public:
    Region() = default;
    Region(int width, int height, bool member = false);

    /// All pixels at least one pixel away from the frame, i.e. the set
    /// {(m, n) : 0 < m < M-1, 0 < n < N-1} in zero-based coordinates.
    static Region interior(int width, int height);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    bool contains(int m, int n) const {
        return membership_[static_cast<std::size_t>(n) * width_ + m] != 0;
    }
    void set(int m, int n, bool member) {
        membership_[static_cast<std::size_t>(n) * width_ + m] = member ? 1 : 0;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> membership_;
};

/// Forward differences with ghost replication; the x-difference at m = M-1 and
/// the y-difference at n = N-1 are zero.
VectorField forward_gradient(const ScalarField& f);

/// Negative divergence built from backward differences with the boundary rows
/// chosen so that <forward_gradient(f), q> = <f, divergence_adjoint(q)> holds
/// exactly in floating point up to rounding.
ScalarField divergence_adjoint(const VectorField& q);

/// Five-point Laplacian with ghost replication; equals
/// -divergence_adjoint(forward_gradient(f)) identically.
ScalarField laplacian(const ScalarField& f);

double inner_product(const ScalarField& a, const ScalarField& b);
double inner_product(const VectorField& a, const VectorField& b);

/// Largest absolute value (0 for an empty field).
double max_abs(const ScalarField& f);

/// Largest pixelwise Euclidean magnitude of a vector field.
double max_magnitude(const VectorField& q);

}  // namespace cvxseg
