#include "cvxseg/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cvxseg {

ScalarField::ScalarField(int width, int height, double fill)
    : width_(width), height_(height) {
    if (width < 0 || height < 0)
        throw std::invalid_argument("ScalarField: negative dimensions");
    values_.assign(static_cast<std::size_t>(width) * height, fill);
}

double ScalarField::at_ext(int m, int n) const {
    m = std::clamp(m, 0, width_ - 1);
    n = std::clamp(n, 0, height_ - 1);
    return (*this)(m, n);
}

void ScalarField::fill(double value) {
    std::fill(values_.begin(), values_.end(), value);
}

bool ScalarField::all_finite() const noexcept {
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
    if (!same_shape(other)) throw std::invalid_argument("ScalarField: shape mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
    if (!same_shape(other)) throw std::invalid_argument("ScalarField: shape mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

ScalarField& ScalarField::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

Region::Region(int width, int height, bool member)
    : width_(width), height_(height),
      membership_(static_cast<std::size_t>(width) * height, member ? 1 : 0) {}

Region Region::interior(int width, int height) {
    Region r(width, height, false);
    for (int n = 1; n < height - 1; ++n)
        for (int m = 1; m < width - 1; ++m)
            r.set(m, n, true);
    return r;
}

VectorField forward_gradient(const ScalarField& f) {
    const int M = f.width(), N = f.height();
    VectorField q(M, N);
    for (int n = 0; n < N; ++n) {
        for (int m = 0; m < M; ++m) {
            q.x(m, n) = (m + 1 < M) ? f(m + 1, n) - f(m, n) : 0.0;
            q.y(m, n) = (n + 1 < N) ? f(m, n + 1) - f(m, n) : 0.0;
        }
    }
    return q;
}

ScalarField divergence_adjoint(const VectorField& q) {
    const int M = q.width(), N = q.height();
    ScalarField out(M, N);
    // Backward difference of q.x with the first and last columns replaced by
    // q.x(0, n) and -q.x(M-2, n); an axis of extent 1 carries no differences
    // and contributes nothing.  Same along y.
    for (int n = 0; n < N; ++n) {
        for (int m = 0; m < M; ++m) {
            double dx = 0.0;
            if (M > 1) {
                if (m == 0)
                    dx = q.x(0, n);
                else if (m == M - 1)
                    dx = -q.x(M - 2, n);
                else
                    dx = q.x(m, n) - q.x(m - 1, n);
            }
            double dy = 0.0;
            if (N > 1) {
                if (n == 0)
                    dy = q.y(m, 0);
                else if (n == N - 1)
                    dy = -q.y(m, N - 2);
                else
                    dy = q.y(m, n) - q.y(m, n - 1);
            }
            out(m, n) = -(dx + dy);
        }
    }
    return out;
}

ScalarField laplacian(const ScalarField& f) {
    const int M = f.width(), N = f.height();
    ScalarField out(M, N);
    for (int n = 0; n < N; ++n) {
        for (int m = 0; m < M; ++m) {
            double acc = 0.0;
            if (m + 1 < M) acc += f(m + 1, n) - f(m, n);
            if (m > 0) acc += f(m - 1, n) - f(m, n);
            if (n + 1 < N) acc += f(m, n + 1) - f(m, n);
            if (n > 0) acc += f(m, n - 1) - f(m, n);
            out(m, n) = acc;
        }
    }
    return out;
}

double inner_product(const ScalarField& a, const ScalarField& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("inner_product: shape mismatch");
    double acc = 0.0;
    auto va = a.values(), vb = b.values();
    for (std::size_t i = 0; i < va.size(); ++i) acc += va[i] * vb[i];
    return acc;
}

double inner_product(const VectorField& a, const VectorField& b) {
    return inner_product(a.x, b.x) + inner_product(a.y, b.y);
}

double max_abs(const ScalarField& f) {
    double best = 0.0;
    for (double v : f.values()) best = std::max(best, std::abs(v));
    return best;
}

double max_magnitude(const VectorField& q) {
    double best = 0.0;
    auto vx = q.x.values(), vy = q.y.values();
    for (std::size_t i = 0; i < vx.size(); ++i)
        best = std::max(best, std::hypot(vx[i], vy[i]));
    return best;
}

}  // namespace cvxseg
