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

#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "phasekit/grid.hpp"

// Unitary discrete Fourier transform pair on rectangular lattices of
// arbitrary extents (iterative radix-2 for powers of two, Bluestein's chirp-z
// otherwise). Both directions carry 1/sqrt(N) so that Parseval is exact and
// physical-domain and Fourier-domain norms agree. The implementation is
// deterministic: identical inputs produce bit-identical outputs.

namespace phasekit {
namespace detail {

struct FftPlan {
    std::size_t n = 0;
    bool pow2 = false;

    // radix-2 path
    std::vector<std::size_t> bitrev;    // permutation, size n
    std::vector<Complex> twiddle;       // exp(-2*pi*i*k/n), k < n/2

    // Bluestein path
    std::size_t conv_n = 0;                      // power of two >= 2n-1
    std::vector<Complex> chirp;                  // exp(-i*pi*k^2/n), size n
    std::vector<Complex> chirp_spectrum;         // unscaled FFT of the paired chirp
    std::shared_ptr<const FftPlan> conv_plan;
};

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::shared_ptr<const FftPlan> fft_plan(std::size_t n);

// In-place unscaled radix-2 transform; inverse flips the twiddle sign.
inline void fft_pow2(std::span<Complex> a, const FftPlan& p, bool inverse) {
    const std::size_t n = p.n;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = p.bitrev[i];
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t step = n / len;
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t k = 0; k < half; ++k) {
                Complex w = p.twiddle[k * step];
                if (inverse) w = std::conj(w);
                const Complex t = a[start + k + half] * w;
                a[start + k + half] = a[start + k] - t;
                a[start + k] += t;
            }
        }
    }
}

inline void fft_bluestein(std::span<Complex> a, const FftPlan& p, bool inverse) {
    const std::size_t n = p.n;
    const std::size_t m = p.conv_n;
    std::vector<Complex> x(m, Complex(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
        const Complex c = inverse ? std::conj(p.chirp[k]) : p.chirp[k];
        x[k] = a[k] * c;
    }
    fft_pow2(x, *p.conv_plan, false);
    if (inverse) {
        for (std::size_t k = 0; k < m; ++k) x[k] *= std::conj(p.chirp_spectrum[k]);
    } else {
        for (std::size_t k = 0; k < m; ++k) x[k] *= p.chirp_spectrum[k];
    }
    fft_pow2(x, *p.conv_plan, true);
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k) {
        const Complex c = inverse ? std::conj(p.chirp[k]) : p.chirp[k];
        a[k] = x[k] * c * inv_m;
    }
}

inline void fft_line(std::span<Complex> a, const FftPlan& p, bool inverse) {
    if (p.n <= 1) return;
    if (p.pow2) {
        fft_pow2(a, p, inverse);
    } else {
        fft_bluestein(a, p, inverse);
    }
}

inline std::shared_ptr<const FftPlan> fft_plan(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, std::shared_ptr<const FftPlan>> cache;
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = cache.find(n);
        if (it != cache.end()) return it->second;
    }

    auto plan = std::make_shared<FftPlan>();
    plan->n = n;
    plan->pow2 = is_pow2(n);
    if (plan->pow2 && n > 1) {
        plan->bitrev.resize(n);
        std::size_t bits = 0;
        while ((std::size_t{1} << bits) < n) ++bits;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < bits; ++b) {
                r |= ((i >> b) & 1u) << (bits - 1 - b);
            }
            plan->bitrev[i] = r;
        }
        plan->twiddle.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) /
                               static_cast<double>(n);
            plan->twiddle[k] = std::polar(1.0, ang);
        }
    } else if (n > 1) {
        std::size_t m = 1;
        while (m < 2 * n - 1) m <<= 1;
        plan->conv_n = m;
        plan->conv_plan = fft_plan(m);
        plan->chirp.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            // k^2 mod 2n keeps the chirp angle small and exact in double.
            const std::size_t k2 = (k * k) % (2 * n);
            const double ang = -std::numbers::pi * static_cast<double>(k2) /
                               static_cast<double>(n);
            plan->chirp[k] = std::polar(1.0, ang);
        }
        std::vector<Complex> b(m, Complex(0.0, 0.0));
        b[0] = std::conj(plan->chirp[0]);
        for (std::size_t k = 1; k < n; ++k) {
            b[k] = std::conj(plan->chirp[k]);
            b[m - k] = b[k];
        }
        fft_pow2(b, *plan->conv_plan, false);
        plan->chirp_spectrum = std::move(b);
    }

    std::lock_guard<std::mutex> lock(mutex);
    auto [it, inserted] = cache.emplace(n, std::move(plan));
    (void)inserted;
    return it->second;
}

// Transforms every axis in place, then applies the single unitary scale.
inline void transform_all_axes(std::vector<Complex>& data, const Shape& dims,
                               bool inverse) {
    const std::size_t total = data.size();
    std::vector<Complex> line;
    std::size_t stride = 1;
    for (std::size_t a = dims.size(); a-- > 0;) {
        const std::size_t n = dims[a];
        if (n > 1) {
            const auto plan = fft_plan(n);
            line.resize(n);
            const std::size_t lines = total / n;
            for (std::size_t l = 0; l < lines; ++l) {
                const std::size_t base = (l / stride) * stride * n + (l % stride);
                for (std::size_t t = 0; t < n; ++t) line[t] = data[base + t * stride];
                fft_line(line, *plan, inverse);
                for (std::size_t t = 0; t < n; ++t) data[base + t * stride] = line[t];
            }
        }
        stride *= n;
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(total));
    for (Complex& v : data) v *= scale;
}

} // namespace detail

inline Spectrum forward_transform(const ComplexGrid& u) {
    std::vector<Complex> data(u.values().begin(), u.values().end());
    detail::transform_all_axes(data, u.dims(), false);
    return Spectrum(u.dims(), std::move(data));
}

inline Spectrum forward_transform(const RealGrid& u) {
    std::vector<Complex> data(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) data[i] = Complex(u[i], 0.0);
    detail::transform_all_axes(data, u.dims(), false);
    return Spectrum(u.dims(), std::move(data));
}

inline ComplexGrid inverse_transform(const Spectrum& s) {
    std::vector<Complex> data(s.values().begin(), s.values().end());
    detail::transform_all_axes(data, s.dims(), true);
    return ComplexGrid(s.dims(), std::move(data));
}

} // namespace phasekit
