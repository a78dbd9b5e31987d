// Copyright 2026 The phasekit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace phasekit {

using Complex = std::complex<double>;

/// Extent per axis of a rectangular lattice, row-major storage order.
using Shape = std::vector<std::size_t>;

inline std::size_t element_count(const Shape& dims) {
    if (dims.empty()) {
        throw std::invalid_argument("grid: shape must have at least one axis");
    }
    std::size_t n = 1;
    for (std::size_t d : dims) {
        if (d == 0) {
            throw std::invalid_argument("grid: zero extent");
        }
        n *= d;
    }
    return n;
}

inline void require_same_dims(const Shape& a, const Shape& b, const char* what) {
    if (a != b) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
    }
}

/// Real-valued function on a rectangular lattice (the physical-domain iterate).
/// Invariants: value count equals the product of the extents, all values finite.
class RealGrid {
public:
    RealGrid(Shape dims, std::vector<double> values)
        : dims_(std::move(dims)), values_(std::move(values)) {
        if (values_.size() != element_count(dims_)) {
            throw std::invalid_argument("RealGrid: value count does not match shape");
        }
        for (double v : values_) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("RealGrid: non-finite value");
            }
        }
    }

    static RealGrid zeros(Shape dims) {
        const std::size_t n = element_count(dims);
        return RealGrid(std::move(dims), std::vector<double>(n, 0.0));
    }

    const Shape& dims() const noexcept { return dims_; }
    std::size_t size() const noexcept { return values_.size(); }

    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double& operator[](std::size_t i) noexcept { return values_[i]; }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    bool operator==(const RealGrid&) const = default;

private:
    Shape dims_;
    std::vector<double> values_;
};

/// Complex-valued function on the same lattice; produced by the inverse
/// transform and by the magnitude projector before the real-residue rule.
class ComplexGrid {
public:
    ComplexGrid(Shape dims, std::vector<Complex> values)
        : dims_(std::move(dims)), values_(std::move(values)) {
        if (values_.size() != element_count(dims_)) {
            throw std::invalid_argument("ComplexGrid: value count does not match shape");
        }
        for (const Complex& v : values_) {
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                throw std::invalid_argument("ComplexGrid: non-finite value");
            }
        }
    }

    explicit ComplexGrid(const RealGrid& g)
        : dims_(g.dims()), values_(g.size()) {
        for (std::size_t i = 0; i < values_.size(); ++i) {
            values_[i] = Complex(g[i], 0.0);
        }
    }

    static ComplexGrid zeros(Shape dims) {
        const std::size_t n = element_count(dims);
        return ComplexGrid(std::move(dims), std::vector<Complex>(n));
    }

    const Shape& dims() const noexcept { return dims_; }
    std::size_t size() const noexcept { return values_.size(); }

    const Complex& operator[](std::size_t i) const noexcept { return values_[i]; }
    Complex& operator[](std::size_t i) noexcept { return values_[i]; }

    std::span<const Complex> values() const noexcept { return values_; }
    std::span<Complex> values() noexcept { return values_; }

    bool operator==(const ComplexGrid&) const = default;

private:
    Shape dims_;
    std::vector<Complex> values_;
};

/// Fourier-domain image of a grid under the unitary discrete transform.
/// Shape matches the originating grid; Parseval holds under the unitary
/// convention used throughout.
class Spectrum {
public:
    Spectrum(Shape dims, std::vector<Complex> values)
        : dims_(std::move(dims)), values_(std::move(values)) {
        if (values_.size() != element_count(dims_)) {
            throw std::invalid_argument("Spectrum: value count does not match shape");
        }
        for (const Complex& v : values_) {
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                throw std::invalid_argument("Spectrum: non-finite value");
            }
        }
    }

    const Shape& dims() const noexcept { return dims_; }
    std::size_t size() const noexcept { return values_.size(); }

    const Complex& operator[](std::size_t i) const noexcept { return values_[i]; }
    Complex& operator[](std::size_t i) noexcept { return values_[i]; }

    std::span<const Complex> values() const noexcept { return values_; }
    std::span<Complex> values() noexcept { return values_; }

    bool operator==(const Spectrum&) const = default;

private:
    Shape dims_;
    std::vector<Complex> values_;
};

inline double norm(const RealGrid& u) {
    double s = 0.0;
    for (double v : u.values()) s += v * v;
    return std::sqrt(s);
}

inline double norm(const ComplexGrid& u) {
    double s = 0.0;
    for (const Complex& v : u.values()) s += std::norm(v);
    return std::sqrt(s);
}

inline double norm(const Spectrum& u) {
    double s = 0.0;
    for (const Complex& v : u.values()) s += std::norm(v);
    return std::sqrt(s);
}

inline double inner_product(const RealGrid& u, const RealGrid& v) {
    require_same_dims(u.dims(), v.dims(), "inner_product");
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
}

/// Hermitian inner product, conjugate-linear in the second argument.
inline Complex inner_product(const ComplexGrid& u, const ComplexGrid& v) {
    require_same_dims(u.dims(), v.dims(), "inner_product");
    Complex s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * std::conj(v[i]);
    return s;
}

inline double distance(const RealGrid& u, const RealGrid& v) {
    require_same_dims(u.dims(), v.dims(), "distance");
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double d = u[i] - v[i];
        s += d * d;
    }
    return std::sqrt(s);
}

inline double distance(const ComplexGrid& u, const ComplexGrid& v) {
    require_same_dims(u.dims(), v.dims(), "distance");
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += std::norm(u[i] - v[i]);
    return std::sqrt(s);
}

/// Drops the imaginary residue of a nominally real grid. The residue norm must
/// stay below residue_rel_tol times the grid norm; a larger residue means the
/// input data were not Hermitian-symmetric and is reported as an error.
inline RealGrid to_real(const ComplexGrid& g, double residue_rel_tol = 1e-9) {
    double total = 0.0;
    double residue = 0.0;
    for (const Complex& v : g.values()) {
        total += std::norm(v);
        residue += v.imag() * v.imag();
    }
    if (residue > residue_rel_tol * residue_rel_tol * total) {
        throw std::invalid_argument(
            "to_real: imaginary residue " + std::to_string(std::sqrt(residue)) +
            " exceeds tolerance; input is not consistent with a real-valued grid");
    }
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = g[i].real();
    return RealGrid(g.dims(), std::move(out));
}

namespace detail {

/// Row-major index of the reflected multi-index -x (mod dims).
inline std::size_t negated_index(std::size_t i, const Shape& dims) {
    std::size_t out = 0;
    std::size_t rem = i;
    // Walk axes from the last (fastest-varying) to the first, rebuilding the
    // row-major index of (-x mod d) axis by axis.
    std::size_t stride = 1;
    for (std::size_t a = dims.size(); a-- > 0;) {
        const std::size_t d = dims[a];
        const std::size_t x = rem % d;
        rem /= d;
        const std::size_t nx = (x == 0) ? 0 : d - x;
        out += nx * stride;
        stride *= d;
    }
    return out;
}

} // namespace detail

} // namespace phasekit
