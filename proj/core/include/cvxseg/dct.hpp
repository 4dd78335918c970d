#pragma once

#include <memory>
#include <vector>

#include "cvxseg/field.hpp"

namespace cvxseg {

/// Coefficient grid of the orthonormal 2-D DCT-II on an M x N field.
/// (k, l) are zero-based frequency indices along m and n.
class SpectralField {
public:
    SpectralField() = default;
    SpectralField(int width, int height) : coeffs_(width, height) {}

    int width() const noexcept { return coeffs_.width(); }
    int height() const noexcept { return coeffs_.height(); }

    double& operator()(int k, int l) { return coeffs_(k, l); }
    double operator()(int k, int l) const { return coeffs_(k, l); }

    ScalarField& grid() noexcept { return coeffs_; }
    const ScalarField& grid() const noexcept { return coeffs_; }

private:
    ScalarField coeffs_;
};

/// Eigenvalue table of sqrt(rho0)*I - sqrt(rho1)*Laplacian in the DCT basis:
///   r(k, l) = sqrt(rho0) + 2*sqrt(rho1)*(2 - cos(pi*k/M) - cos(pi*l/N)),
/// strictly positive for rho0 > 0, rho1 >= 0.
class SpectralSymbol {
public:
    SpectralSymbol() = default;
    SpectralSymbol(int width, int height, double rho1, double rho0);

    int width() const noexcept { return r_.width(); }
    int height() const noexcept { return r_.height(); }
    double operator()(int k, int l) const { return r_(k, l); }
    double rho0() const noexcept { return rho0_; }
    double rho1() const noexcept { return rho1_; }

private:
    ScalarField r_;
    double rho0_ = 0.0;
    double rho1_ = 0.0;
};

/// Orthonormal 2-D DCT-II and its inverse for one fixed grid shape.
///
/// Two interchangeable routes: a direct separable transform (reference, used
/// by default up to 64 pixels per side) and an FFTW r2r plan pair (REDFT10 /
/// REDFT01, planned with FFTW_ESTIMATE so the plan choice is deterministic).
class Dct2 {
public:
    enum class Route { automatic, direct, fft };

    Dct2(int width, int height, Route route = Route::automatic);
    ~Dct2();
    Dct2(Dct2&&) noexcept;
    Dct2& operator=(Dct2&&) noexcept;
    Dct2(const Dct2&) = delete;
    Dct2& operator=(const Dct2&) = delete;

    int width() const noexcept;
    int height() const noexcept;

    SpectralField forward(const ScalarField& f) const;
    ScalarField inverse(const SpectralField& F) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

SpectralField dct2_forward(const ScalarField& f);
ScalarField dct2_inverse(const SpectralField& F);

/// Plan-caching solver for the two screened operators appearing in the
/// phi-update, on one grid shape with fixed rho0, rho1.
class SpectralSolver {
public:
    SpectralSolver(int width, int height, double rho1, double rho0,
                   Dct2::Route route = Dct2::Route::automatic);

    /// Solves (sqrt(rho1)*Lap - sqrt(rho0)*I) psi = rhs.  The operator's
    /// symbol is -r(k, l), so psi_hat = -rhs_hat / r.
    ScalarField helmholtz(const ScalarField& rhs) const;

    /// Solves (sqrt(rho1)*Lap - sqrt(rho0)*I)^2 phi = rhs via phi_hat =
    /// rhs_hat / r^2, equivalent to two helmholtz solves in one pass.
    ScalarField biharmonic(const ScalarField& rhs) const;

    const SpectralSymbol& symbol() const noexcept { return symbol_; }

private:
    Dct2 dct_;
    SpectralSymbol symbol_;
};

ScalarField helmholtz_solve(const ScalarField& rhs, double rho1, double rho0);
ScalarField biharmonic_solve(const ScalarField& rhs, double rho1, double rho0);

}  // namespace cvxseg
