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

#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>

#include "phasekit/projections.hpp"

// Iterative transform rules built from the projectors of projections.hpp.
// Each rule exists in two algebraically equivalent forms:
//
//   operator form   — composition of projectors/reflectors, e.g.
//                     RAAR:  V = beta * (R_{S+} R_M + I)/2 + (1-beta) P_M
//   pointwise form  — per-site case split on membership in D and the sign of
//                     the projector or reflector at that site
//
// The pointwise RAAR form uses beta*u + (1-2*beta)*P_M u in the fall-through
// branch; this is the variant consistent with the operator form, which is
// treated as primary. Equivalence of the two forms is enforced by tests.

namespace phasekit {

enum class Algorithm {
    Hio,            // hybrid input-output, support + nonnegativity
    HioSupport,     // hybrid input-output, support constraint only
    Hpr,            // hybrid projection reflection
    Raar,           // relaxed averaged alternating reflections
    DifferenceMap,  // three-parameter difference map
};

inline Algorithm parse_algorithm(const std::string& id) {
    if (id == "hio") return Algorithm::Hio;
    if (id == "hio-support" || id == "hios") return Algorithm::HioSupport;
    if (id == "hpr") return Algorithm::Hpr;
    if (id == "raar") return Algorithm::Raar;
    if (id == "dm" || id == "difference-map") return Algorithm::DifferenceMap;
    throw std::invalid_argument("unknown algorithm id: " + id);
}

inline const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::Hio: return "hio";
        case Algorithm::HioSupport: return "hio-support";
        case Algorithm::Hpr: return "hpr";
        case Algorithm::Raar: return "raar";
        case Algorithm::DifferenceMap: return "dm";
    }
    return "?";
}

/// Relaxation parameter rule. `static`: beta_n = beta0. `smooth-step`:
/// beta_{n+1} = beta0 + (1-beta0) * (1 - exp(-(n/center)^power)), a smooth
/// ramp from beta0 to 1 centered at iteration `center`.
struct RelaxationSchedule {
    enum class Kind { Static, SmoothStep };

    Kind kind = Kind::Static;
    double beta0 = 0.75;
    double switch_center = 7.0;
    double switch_power = 3.0;

    static RelaxationSchedule fixed(double beta) {
        RelaxationSchedule s;
        s.kind = Kind::Static;
        s.beta0 = beta;
        s.validate();
        return s;
    }

    static RelaxationSchedule smooth_step(double beta0, double center = 7.0,
                                          double power = 3.0) {
        RelaxationSchedule s;
        s.kind = Kind::SmoothStep;
        s.beta0 = beta0;
        s.switch_center = center;
        s.switch_power = power;
        s.validate();
        return s;
    }

    void validate() const {
        if (!(beta0 > 0.0 && beta0 <= 1.0)) {
            throw std::invalid_argument("RelaxationSchedule: beta0 must lie in (0, 1]");
        }
        if (!(switch_center > 0.0) || !(switch_power > 0.0)) {
            throw std::invalid_argument(
                "RelaxationSchedule: switch center and power must be positive");
        }
    }
};

/// Beta used to compute iterate n+1 from iterate n.
inline double beta_at(const RelaxationSchedule& s, std::size_t n) {
    if (s.kind == RelaxationSchedule::Kind::Static) return s.beta0;
    const double x = static_cast<double>(n) / s.switch_center;
    return s.beta0 + (1.0 - s.beta0) * (1.0 - std::exp(-std::pow(x, s.switch_power)));
}

/// Physical-domain constraint choice for the difference map.
enum class SupportKind { Support, SupportNonneg };

/// Parameters of the difference map u + beta*(P_A(...) -/+ P_M(...)).
/// convention `standard` uses (1+gamma)P - gamma*I estimates with a minus
/// between the two composite terms and reproduces the HIO/HPR special cases
/// at gamma1 = -1, gamma2 = 1/beta; `printed` keeps (1-gamma)P - gamma*I with
/// a plus, retained for documentation of the alternative sign reading.
struct DifferenceMapParams {
    double beta = 1.0;
    double gamma1 = -1.0;
    double gamma2 = 1.0;
    enum class Convention { Standard, Printed };
    Convention convention = Convention::Standard;

    static DifferenceMapParams classic(double beta) {
        if (beta == 0.0) throw std::invalid_argument("difference map: beta must be nonzero");
        return DifferenceMapParams{beta, -1.0, 1.0 / beta, Convention::Standard};
    }
};

namespace detail {

// Pointwise cores. `pm` is the image of u under the magnitude operator in use
// (exact P_M, or its smoothed surrogate when the driver substitutes one).

inline RealGrid hio_core(const RealGrid& u, const RealGrid& pm, const SupportMask& D,
                         double beta) {
    std::vector<double> v(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        v[i] = (D.inside(i) && pm[i] >= 0.0) ? pm[i] : u[i] - beta * pm[i];
    }
    return RealGrid(u.dims(), std::move(v));
}

inline RealGrid hio_support_core(const RealGrid& u, const RealGrid& pm,
                                 const SupportMask& D, double beta) {
    std::vector<double> v(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        v[i] = D.inside(i) ? pm[i] : u[i] - beta * pm[i];
    }
    return RealGrid(u.dims(), std::move(v));
}

// (R_S (R_M + (beta-1) P_M) + I + (1-beta) P_M) / 2 with the plain support
// reflector; equivalent to hio_support_core.
inline RealGrid dr_relaxed_core(const RealGrid& u, const RealGrid& pm,
                                const SupportMask& D, double beta) {
    std::vector<double> v(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double w = (2.0 * pm[i] - u[i]) + (beta - 1.0) * pm[i];
        const double rs = D.inside(i) ? w : -w;
        v[i] = 0.5 * (rs + u[i] + (1.0 - beta) * pm[i]);
    }
    return RealGrid(u.dims(), std::move(v));
}

// (R_{S+} (R_M + (beta-1) P_M) + I + (1-beta) P_M) / 2.
inline RealGrid hpr_core(const RealGrid& u, const RealGrid& pm, const SupportMask& D,
                         double beta) {
    std::vector<double> v(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double w = (2.0 * pm[i] - u[i]) + (beta - 1.0) * pm[i];
        const double rs = D.inside(i) ? 2.0 * std::max(0.0, w) - w : -w;
        v[i] = 0.5 * (rs + u[i] + (1.0 - beta) * pm[i]);
    }
    return RealGrid(u.dims(), std::move(v));
}

inline RealGrid hpr_pointwise_core(const RealGrid& u, const RealGrid& pm,
                                   const SupportMask& D, double beta) {
    std::vector<double> v(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double rm = 2.0 * pm[i] - u[i];
        v[i] = (D.inside(i) && rm >= (1.0 - beta) * pm[i]) ? pm[i]
                                                           : u[i] - beta * pm[i];
    }
    return RealGrid(u.dims(), std::move(v));
}

// beta * (R_{S+} R_M + I)/2 + (1-beta) P_M.
inline RealGrid raar_core(const RealGrid& u, const RealGrid& pm, const SupportMask& D,
                          double beta) {
    std::vector<double> v(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double rm = 2.0 * pm[i] - u[i];
        const double rs = D.inside(i) ? 2.0 * std::max(0.0, rm) - rm : -rm;
        v[i] = beta * 0.5 * (rs + u[i]) + (1.0 - beta) * pm[i];
    }
    return RealGrid(u.dims(), std::move(v));
}

inline RealGrid raar_pointwise_core(const RealGrid& u, const RealGrid& pm,
                                    const SupportMask& D, double beta) {
    std::vector<double> v(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double rm = 2.0 * pm[i] - u[i];
        v[i] = (D.inside(i) && rm >= 0.0) ? pm[i] : beta * u[i] + (1.0 - 2.0 * beta) * pm[i];
    }
    return RealGrid(u.dims(), std::move(v));
}

inline void require_raar_beta(double beta) {
    if (!(beta > 0.0 && beta <= 1.0)) {
        throw std::invalid_argument("raar: beta must lie in (0, 1]");
    }
}

// Difference map core; `magnitude` is applied twice, to u and to the inner
// physical-domain estimate, so the smoothed surrogate substitutes cleanly.
template <class MagnitudeOp>
inline RealGrid difference_map_core(const RealGrid& u, const SupportMask& D,
                                    SupportKind kind, const DifferenceMapParams& p,
                                    MagnitudeOp&& magnitude) {
    if (p.beta == 0.0) throw std::invalid_argument("difference map: beta must be nonzero");
    const auto project_a = [&](const RealGrid& g) {
        return kind == SupportKind::Support ? project_support(g, D)
                                            : project_support_nonneg(g, D);
    };
    const bool printed = p.convention == DifferenceMapParams::Convention::Printed;
    const double ca = printed ? (1.0 - p.gamma2) : (1.0 + p.gamma2);
    const double cm = printed ? (1.0 - p.gamma1) : (1.0 + p.gamma1);

    const RealGrid pm_u = magnitude(u);
    const RealGrid pa_u = project_a(u);

    std::vector<double> inner_a(u.size());
    std::vector<double> inner_m(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        inner_a[i] = ca * pm_u[i] - p.gamma2 * u[i];
        inner_m[i] = cm * pa_u[i] - p.gamma1 * u[i];
    }
    const RealGrid fa = project_a(RealGrid(u.dims(), std::move(inner_a)));
    const RealGrid fm = magnitude(RealGrid(u.dims(), std::move(inner_m)));

    std::vector<double> v(u.size());
    if (printed) {
        for (std::size_t i = 0; i < u.size(); ++i) v[i] = u[i] + p.beta * (fa[i] + fm[i]);
    } else {
        for (std::size_t i = 0; i < u.size(); ++i) v[i] = u[i] + p.beta * (fa[i] - fm[i]);
    }
    return RealGrid(u.dims(), std::move(v));
}

/// E_{S+} from a precomputed magnitude projection:
/// ||P_{S+}(p) - p||^2 / ||p||^2.
inline double esplus_from_projection(const RealGrid& pm, const SupportMask& D) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < pm.size(); ++i) {
        const double p = pm[i];
        const double q = D.inside(i) ? std::max(0.0, p) : 0.0;
        num += (q - p) * (q - p);
        den += p * p;
    }
    if (den == 0.0) {
        throw std::invalid_argument("error metric undefined: magnitude projection is zero");
    }
    return num / den;
}

} // namespace detail

// --- single steps, exact magnitude projector -------------------------------

inline RealGrid hio_step(const RealGrid& u, const MagnitudeData& m, const SupportMask& D,
                         double beta) {
    require_same_dims(u.dims(), D.dims(), "hio_step");
    return detail::hio_core(u, project_magnitude_real(u, m), D, beta);
}

inline RealGrid hio_support_step(const RealGrid& u, const MagnitudeData& m,
                                 const SupportMask& D, double beta) {
    require_same_dims(u.dims(), D.dims(), "hio_support_step");
    return detail::hio_support_core(u, project_magnitude_real(u, m), D, beta);
}

inline RealGrid dr_relaxed_step(const RealGrid& u, const MagnitudeData& m,
                                const SupportMask& D, double beta) {
    require_same_dims(u.dims(), D.dims(), "dr_relaxed_step");
    return detail::dr_relaxed_core(u, project_magnitude_real(u, m), D, beta);
}

inline RealGrid hpr_step(const RealGrid& u, const MagnitudeData& m, const SupportMask& D,
                         double beta) {
    require_same_dims(u.dims(), D.dims(), "hpr_step");
    return detail::hpr_core(u, project_magnitude_real(u, m), D, beta);
}

inline RealGrid hpr_pointwise_step(const RealGrid& u, const MagnitudeData& m,
                                   const SupportMask& D, double beta) {
    require_same_dims(u.dims(), D.dims(), "hpr_pointwise_step");
    return detail::hpr_pointwise_core(u, project_magnitude_real(u, m), D, beta);
}

inline RealGrid raar_step(const RealGrid& u, const MagnitudeData& m, const SupportMask& D,
                          double beta) {
    require_same_dims(u.dims(), D.dims(), "raar_step");
    detail::require_raar_beta(beta);
    return detail::raar_core(u, project_magnitude_real(u, m), D, beta);
}

inline RealGrid raar_pointwise_step(const RealGrid& u, const MagnitudeData& m,
                                    const SupportMask& D, double beta) {
    require_same_dims(u.dims(), D.dims(), "raar_pointwise_step");
    detail::require_raar_beta(beta);
    return detail::raar_pointwise_core(u, project_magnitude_real(u, m), D, beta);
}

inline RealGrid difference_map_step(const RealGrid& u, const MagnitudeData& m,
                                    const SupportMask& D, SupportKind kind,
                                    const DifferenceMapParams& params) {
    require_same_dims(u.dims(), D.dims(), "difference_map_step");
    return detail::difference_map_core(
        u, D, kind, params, [&](const RealGrid& g) { return project_magnitude_real(g, m); });
}

// --- iteration driver -------------------------------------------------------

/// State after applying step `index` (1-based); `beta` is the relaxation used
/// to produce it and `metric` the monitoring value E_{S+} of the new iterate
/// computed with the exact magnitude projector.
struct IterationState {
    std::size_t index = 0;
    double beta = 0.0;
    double metric = 0.0;
    RealGrid iterate;
};

struct RunOptions {
    Algorithm algorithm = Algorithm::Raar;
    RelaxationSchedule schedule = RelaxationSchedule::fixed(0.75);
    std::size_t iterations = 100;

    /// Substitute the smoothed magnitude step for P_M everywhere in the
    /// update rule (the monitor metric always uses the exact projector).
    bool use_smoothed_magnitude = false;
    std::optional<SmoothingConfig> smoothing;  // defaults to scaled_to(m)

    SupportKind dm_support = SupportKind::SupportNonneg;
    DifferenceMapParams::Convention dm_convention = DifferenceMapParams::Convention::Standard;
    double dm_gamma1 = -1.0;
    std::optional<double> dm_gamma2;  // defaults to 1/beta_n per iteration

    std::function<void(const IterationState&)> monitor;
    bool record_iterates = true;
};

struct RunResult {
    std::vector<IterationState> trace;
    RealGrid final_iterate;
};

namespace detail {

struct MagnitudeEval {
    RealGrid exact;                 // P_M u under the real-residue rule
    std::optional<RealGrid> step;   // smoothed surrogate when requested
};

inline MagnitudeEval evaluate_magnitude(const RealGrid& u, const MagnitudeData& m,
                                        const std::optional<SmoothingConfig>& smoothing) {
    const Spectrum u_hat = forward_transform(u);
    MagnitudeEval ev{to_real(inverse_transform(constrain_modulus(u_hat, m))), std::nullopt};
    if (smoothing) {
        const Spectrum term = smoothed_gradient_term(u_hat, m, smoothing->epsilon);
        const RealGrid back = to_real(inverse_transform(term));
        std::vector<double> v(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) v[i] = u[i] - back[i];
        ev.step = RealGrid(u.dims(), std::move(v));
    }
    return ev;
}

inline RealGrid apply_core(Algorithm alg, const RealGrid& u, const RealGrid& pm,
                           const SupportMask& D, double beta) {
    switch (alg) {
        case Algorithm::Hio: return hio_core(u, pm, D, beta);
        case Algorithm::HioSupport: return hio_support_core(u, pm, D, beta);
        case Algorithm::Hpr: return hpr_core(u, pm, D, beta);
        case Algorithm::Raar:
            require_raar_beta(beta);
            return raar_core(u, pm, D, beta);
        case Algorithm::DifferenceMap:
            throw std::logic_error("difference map is dispatched separately");
    }
    throw std::invalid_argument("unknown algorithm id");
}

} // namespace detail

/// Applies the selected update rule `iterations` times from u0, feeding the
/// relaxation from the schedule and reporting E_{S+} per iteration.
inline RunResult run(const RealGrid& u0, const MagnitudeData& m, const SupportMask& D,
                     const RunOptions& opt) {
    require_same_dims(u0.dims(), m.dims(), "run");
    require_same_dims(u0.dims(), D.dims(), "run");
    if (opt.iterations < 1) throw std::invalid_argument("run: iterations must be >= 1");
    opt.schedule.validate();

    std::optional<SmoothingConfig> smoothing;
    if (opt.use_smoothed_magnitude) {
        smoothing = opt.smoothing ? *opt.smoothing : SmoothingConfig::scaled_to(m);
    }

    RunResult result{{}, u0};
    if (opt.record_iterates) result.trace.reserve(opt.iterations);

    RealGrid u = u0;
    auto mag = detail::evaluate_magnitude(u, m, smoothing);
    for (std::size_t n = 0; n < opt.iterations; ++n) {
        const double beta = beta_at(opt.schedule, n);
        const RealGrid& pm = mag.step ? *mag.step : mag.exact;
        if (opt.algorithm == Algorithm::DifferenceMap) {
            DifferenceMapParams p;
            p.beta = beta;
            p.gamma1 = opt.dm_gamma1;
            p.gamma2 = opt.dm_gamma2 ? *opt.dm_gamma2 : 1.0 / beta;
            p.convention = opt.dm_convention;
            const auto magnitude_op = [&](const RealGrid& g) {
                if (smoothing) return smoothed_magnitude_step(g, m, *smoothing);
                return project_magnitude_real(g, m);
            };
            // Reuse the magnitude image of the current iterate for the first
            // of the two projections in the map.
            const RealGrid& pm_u = pm;
            u = detail::difference_map_core(u, D, opt.dm_support, p,
                                            [&](const RealGrid& g) {
                                                return (&g == &u) ? pm_u : magnitude_op(g);
                                            });
        } else {
            u = detail::apply_core(opt.algorithm, u, pm, D, beta);
        }
        mag = detail::evaluate_magnitude(u, m, smoothing);
        const double metric = detail::esplus_from_projection(mag.exact, D);

        IterationState state{n + 1, beta, metric, u};
        if (opt.monitor) opt.monitor(state);
        if (opt.record_iterates) result.trace.push_back(std::move(state));
    }
    result.final_iterate = std::move(u);
    return result;
}

/// Decibel value of a positive metric: 10*log10(alpha).
inline double to_decibels(double alpha) { return 10.0 * std::log10(alpha); }

namespace detail {

inline void csv_double(std::ostream& os, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
}

} // namespace detail

/// Trace CSV: run_id, iteration, beta, E_splus, E_splus_db.
inline void write_trace_csv(std::ostream& os, const std::string& run_id,
                            const std::vector<IterationState>& trace) {
    os << "run_id,iteration,beta,E_splus,E_splus_db\n";
    for (const auto& s : trace) {
        os << run_id << ',' << s.index << ',';
        detail::csv_double(os, s.beta);
        os << ',';
        detail::csv_double(os, s.metric);
        os << ',';
        detail::csv_double(os, to_decibels(s.metric));
        os << '\n';
    }
}

} // namespace phasekit
