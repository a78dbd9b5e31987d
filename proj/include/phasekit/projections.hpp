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

#include <algorithm>
#include <cstdint>

#include "phasekit/fft.hpp"
#include "phasekit/grid.hpp"

// Constraint-set projectors and reflectors for phase retrieval:
//
//   S    — signals supported on a prescribed set D
//   S+   — nonnegative signals supported on D
//   M    — signals whose Fourier modulus equals the data m (nonconvex)
//
// plus the epsilon-smoothed surrogate of the magnitude projector used to
// stabilize the multi-valued modulus projection.

namespace phasekit {

/// Boolean mask marking the support set D on a lattice.
/// Invariant: at least one site is inside.
class SupportMask {
public:
    SupportMask(Shape dims, std::vector<std::uint8_t> inside)
        : dims_(std::move(dims)), inside_(std::move(inside)) {
        if (inside_.size() != element_count(dims_)) {
            throw std::invalid_argument("SupportMask: flag count does not match shape");
        }
        if (std::find(inside_.begin(), inside_.end(), std::uint8_t{1}) == inside_.end()) {
            throw std::invalid_argument("SupportMask: empty support");
        }
    }

    static SupportMask full(Shape dims) {
        const std::size_t n = element_count(dims);
        return SupportMask(std::move(dims), std::vector<std::uint8_t>(n, 1));
    }

    /// Axis-aligned box of extents `box`, centered in `dims`.
    static SupportMask centered_box(Shape dims, const Shape& box) {
        if (box.size() != dims.size()) {
            throw std::invalid_argument("SupportMask: box rank does not match shape");
        }
        for (std::size_t a = 0; a < dims.size(); ++a) {
            if (box[a] == 0 || box[a] > dims[a]) {
                throw std::invalid_argument("SupportMask: box does not fit inside shape");
            }
        }
        const std::size_t n = element_count(dims);
        std::vector<std::uint8_t> inside(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t rem = i;
            bool in = true;
            for (std::size_t a = dims.size(); a-- > 0;) {
                const std::size_t x = rem % dims[a];
                rem /= dims[a];
                const std::size_t start = (dims[a] - box[a]) / 2;
                if (x < start || x >= start + box[a]) {
                    in = false;
                    break;
                }
            }
            inside[i] = in ? 1 : 0;
        }
        return SupportMask(std::move(dims), std::move(inside));
    }

    /// Nonzero grid sites become the support.
    static SupportMask from_grid(const RealGrid& g) {
        std::vector<std::uint8_t> inside(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) inside[i] = g[i] != 0.0 ? 1 : 0;
        return SupportMask(g.dims(), std::move(inside));
    }

    static SupportMask of_sites(Shape dims, std::initializer_list<std::size_t> sites) {
        const std::size_t n = element_count(dims);
        std::vector<std::uint8_t> inside(n, 0);
        for (std::size_t s : sites) inside.at(s) = 1;
        return SupportMask(std::move(dims), std::move(inside));
    }

    const Shape& dims() const noexcept { return dims_; }
    std::size_t size() const noexcept { return inside_.size(); }
    bool inside(std::size_t i) const noexcept { return inside_[i] != 0; }
    std::span<const std::uint8_t> flags() const noexcept { return inside_; }

    std::size_t count_inside() const noexcept {
        std::size_t c = 0;
        for (auto f : inside_) c += f;
        return c;
    }

    RealGrid to_grid() const {
        std::vector<double> v(inside_.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = inside_[i] ? 1.0 : 0.0;
        return RealGrid(dims_, std::move(v));
    }

    /// Circular translation by `shift` (per axis, wrapped).
    SupportMask translated(const std::vector<std::ptrdiff_t>& shift) const;

private:
    Shape dims_;
    std::vector<std::uint8_t> inside_;
};

/// Nonnegative Fourier-modulus measurements m defining the constraint set M.
class MagnitudeData {
public:
    MagnitudeData(Shape dims, std::vector<double> values)
        : dims_(std::move(dims)), values_(std::move(values)) {
        if (values_.size() != element_count(dims_)) {
            throw std::invalid_argument("MagnitudeData: value count does not match shape");
        }
        for (double v : values_) {
            if (!std::isfinite(v) || v < 0.0) {
                throw std::invalid_argument("MagnitudeData: values must be finite and >= 0");
            }
        }
    }

    static MagnitudeData from_modulus(const Spectrum& s) {
        std::vector<double> v(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) v[i] = std::abs(s[i]);
        return MagnitudeData(s.dims(), std::move(v));
    }

    static MagnitudeData from_grid(const RealGrid& g) {
        return MagnitudeData(g.dims(), std::vector<double>(g.values().begin(),
                                                           g.values().end()));
    }

    const Shape& dims() const noexcept { return dims_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }

    double max_value() const noexcept {
        double m = 0.0;
        for (double v : values_) m = std::max(m, v);
        return m;
    }

    /// m(xi) == m(-xi) with indices mod dims; required for real-valued iterates.
    bool is_hermitian(double tol = 0.0) const {
        for (std::size_t i = 0; i < values_.size(); ++i) {
            const std::size_t j = detail::negated_index(i, dims_);
            if (std::abs(values_[i] - values_[j]) > tol) return false;
        }
        return true;
    }

    /// Exactly symmetric copy: (m(xi) + m(-xi)) / 2.
    MagnitudeData symmetrized() const {
        std::vector<double> v(values_.size());
        for (std::size_t i = 0; i < values_.size(); ++i) {
            const std::size_t j = detail::negated_index(i, dims_);
            v[i] = 0.5 * (values_[i] + values_[j]);
        }
        return MagnitudeData(dims_, std::move(v));
    }

    RealGrid to_grid() const {
        return RealGrid(dims_, std::vector<double>(values_.begin(), values_.end()));
    }

private:
    Shape dims_;
    std::vector<double> values_;
};

inline SupportMask SupportMask::translated(const std::vector<std::ptrdiff_t>& shift) const {
    if (shift.size() != dims_.size()) {
        throw std::invalid_argument("SupportMask: shift rank does not match shape");
    }
    std::vector<std::uint8_t> inside(inside_.size(), 0);
    for (std::size_t i = 0; i < inside_.size(); ++i) {
        if (!inside_[i]) continue;
        std::size_t rem = i;
        std::size_t out = 0;
        std::size_t stride = 1;
        for (std::size_t a = dims_.size(); a-- > 0;) {
            const auto d = static_cast<std::ptrdiff_t>(dims_[a]);
            const auto x = static_cast<std::ptrdiff_t>(rem % dims_[a]);
            rem /= dims_[a];
            const std::size_t nx = static_cast<std::size_t>(((x + shift[a]) % d + d) % d);
            out += nx * stride;
            stride *= dims_[a];
        }
        inside[out] = 1;
    }
    return SupportMask(dims_, std::move(inside));
}

/// Projector onto S: keep u inside D, zero outside.
inline RealGrid project_support(const RealGrid& u, const SupportMask& D) {
    require_same_dims(u.dims(), D.dims(), "project_support");
    std::vector<double> v(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) v[i] = D.inside(i) ? u[i] : 0.0;
    return RealGrid(u.dims(), std::move(v));
}

/// Projector onto S+: max{0, u} inside D, zero outside.
inline RealGrid project_support_nonneg(const RealGrid& u, const SupportMask& D) {
    require_same_dims(u.dims(), D.dims(), "project_support_nonneg");
    std::vector<double> v(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        v[i] = D.inside(i) ? std::max(0.0, u[i]) : 0.0;
    }
    return RealGrid(u.dims(), std::move(v));
}

namespace detail {

/// Selection from the multi-valued modulus projection: the coefficient keeps
/// the phase of s where s != 0 and takes phase zero where s == 0.
inline Spectrum constrain_modulus(const Spectrum& s, const MagnitudeData& m) {
    require_same_dims(s.dims(), m.dims(), "project_magnitude");
    std::vector<Complex> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double mod = std::abs(s[i]);
        out[i] = (mod != 0.0) ? s[i] * (m[i] / mod) : Complex(m[i], 0.0);
    }
    return Spectrum(s.dims(), std::move(out));
}

} // namespace detail

/// Projector onto the Fourier magnitude set M. The output spectrum has modulus
/// exactly m at every frequency; the result is complex in general, callers that
/// need a real grid apply the real-residue rule (see to_real).
inline ComplexGrid project_magnitude(const ComplexGrid& u, const MagnitudeData& m) {
    return inverse_transform(detail::constrain_modulus(forward_transform(u), m));
}

inline ComplexGrid project_magnitude(const RealGrid& u, const MagnitudeData& m) {
    return inverse_transform(detail::constrain_modulus(forward_transform(u), m));
}

inline RealGrid project_magnitude_real(const RealGrid& u, const MagnitudeData& m,
                                       double residue_rel_tol = 1e-9) {
    return to_real(project_magnitude(u, m), residue_rel_tol);
}

/// Reflector R = 2P - I for an arbitrary projector; P(u) is the midpoint of u
/// and reflect(P, u).
template <class Projector>
inline RealGrid reflect(Projector&& projector, const RealGrid& u) {
    RealGrid r = projector(u);
    require_same_dims(r.dims(), u.dims(), "reflect");
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = 2.0 * r[i] - u[i];
    return r;
}

template <class Projector>
inline ComplexGrid reflect(Projector&& projector, const ComplexGrid& u) {
    ComplexGrid r = projector(u);
    require_same_dims(r.dims(), u.dims(), "reflect");
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = 2.0 * r[i] - u[i];
    return r;
}

/// Smoothing parameter for the stabilized magnitude projector, 0 < epsilon.
struct SmoothingConfig {
    double epsilon;

    explicit SmoothingConfig(double eps) : epsilon(eps) {
        if (!(eps > 0.0) || !std::isfinite(eps)) {
            throw std::invalid_argument("SmoothingConfig: epsilon must be positive");
        }
    }

    /// Default scaling: epsilon = rel * max(m), dimensionless in the data.
    static SmoothingConfig scaled_to(const MagnitudeData& m, double rel = 1e-8) {
        const double peak = m.max_value();
        if (peak <= 0.0) {
            throw std::invalid_argument("SmoothingConfig: magnitude data is identically zero");
        }
        return SmoothingConfig(rel * peak);
    }
};

namespace detail {

/// Fourier-domain factor of the smoothed projector applied to u_hat:
///   (|u|^2/(|u|^2+e^2)^{1/2} - m) * (|u|^2+2e^2)/(|u|^2+e^2)^{3/2} * u
inline Spectrum smoothed_gradient_term(const Spectrum& u_hat, const MagnitudeData& m,
                                       double epsilon) {
    require_same_dims(u_hat.dims(), m.dims(), "smoothed_magnitude_step");
    const double e2 = epsilon * epsilon;
    std::vector<Complex> out(u_hat.size());
    for (std::size_t i = 0; i < u_hat.size(); ++i) {
        const double s = std::norm(u_hat[i]);
        const double root = std::sqrt(s + e2);
        const double vhat = s / root;
        const double factor = (vhat - m[i]) * (s + 2.0 * e2) / (root * root * root);
        out[i] = factor * u_hat[i];
    }
    return Spectrum(u_hat.dims(), std::move(out));
}

} // namespace detail

/// J_eps(u) = (||u||^2 - ||F^{-1}(vhat - m)||^2) / 2 with
/// vhat = |Fu|^2 / (|Fu|^2 + eps^2)^{1/2}, evaluated as printed.
inline double smoothed_objective(const RealGrid& u, const MagnitudeData& m,
                                 const SmoothingConfig& cfg) {
    const Spectrum u_hat = forward_transform(u);
    require_same_dims(u_hat.dims(), m.dims(), "smoothed_objective");
    const double e2 = cfg.epsilon * cfg.epsilon;
    std::vector<Complex> diff(u_hat.size());
    for (std::size_t i = 0; i < u_hat.size(); ++i) {
        const double s = std::norm(u_hat[i]);
        const double vhat = s / std::sqrt(s + e2);
        diff[i] = Complex(vhat - m[i], 0.0);
    }
    const ComplexGrid back = inverse_transform(Spectrum(u_hat.dims(), std::move(diff)));
    const double n_u = norm(u);
    const double n_d = norm(back);
    return 0.5 * (n_u * n_u - n_d * n_d);
}

/// Gradient map of J_eps; approximates the magnitude projector and is free of
/// the division by |Fu| that makes the exact projector unstable near zeros.
inline ComplexGrid smoothed_magnitude_step(const ComplexGrid& u, const MagnitudeData& m,
                                           const SmoothingConfig& cfg) {
    const Spectrum term = detail::smoothed_gradient_term(forward_transform(u), m,
                                                         cfg.epsilon);
    ComplexGrid back = inverse_transform(term);
    std::vector<Complex> v(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) v[i] = u[i] - back[i];
    return ComplexGrid(u.dims(), std::move(v));
}

inline RealGrid smoothed_magnitude_step(const RealGrid& u, const MagnitudeData& m,
                                        const SmoothingConfig& cfg,
                                        double residue_rel_tol = 1e-9) {
    const Spectrum term = detail::smoothed_gradient_term(forward_transform(u), m,
                                                         cfg.epsilon);
    const RealGrid back = to_real(inverse_transform(term), residue_rel_tol);
    std::vector<double> v(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) v[i] = u[i] - back[i];
    return RealGrid(u.dims(), std::move(v));
}

} // namespace phasekit
