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

#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <utility>

#include "phasekit/algorithms.hpp"
#include "phasekit/grid_io.hpp"

// Noisy-data benchmark: a nonnegative test object zero-padded into a larger
// lattice, Fourier modulus data with calibrated additive Gaussian noise, and
// multi-trial comparisons of the iteration rules monitored by E_{S+}.

namespace phasekit {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Independent per-trial stream: results do not depend on execution order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) + stream);
}

/// Deterministic standard-normal sampler (Box-Muller over mt19937_64);
/// identical sequences on every platform for a given seed.
class GaussianSampler {
public:
    explicit GaussianSampler(std::uint64_t seed) : eng_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace detail

/// Deterministic nonnegative test texture: a seeded smooth random field,
/// quantized to 16-bit levels so it survives PGM round trips exactly.
inline RealGrid synthetic_object(std::size_t side = 38, std::uint64_t seed = 1961) {
    if (side == 0) throw std::invalid_argument("synthetic_object: side must be positive");
    std::mt19937_64 eng(seed);
    std::vector<double> v(side * side);
    for (double& x : v) x = static_cast<double>(eng() >> 11) * 0x1.0p-53;

    // Separable box blur with clamped edges, two passes of radius 2.
    const auto blur_axis = [&](bool rows) {
        std::vector<double> out(v.size());
        const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(side);
        const std::ptrdiff_t radius = 2;
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            for (std::ptrdiff_t j = 0; j < n; ++j) {
                double acc = 0.0;
                for (std::ptrdiff_t t = -radius; t <= radius; ++t) {
                    std::ptrdiff_t k = (rows ? j : i) + t;
                    k = std::max<std::ptrdiff_t>(0, std::min(n - 1, k));
                    acc += rows ? v[i * n + k] : v[k * n + j];
                }
                out[i * n + j] = acc / (2 * radius + 1);
            }
        }
        v = std::move(out);
    };
    for (int pass = 0; pass < 2; ++pass) {
        blur_axis(true);
        blur_axis(false);
    }

    double lo = v[0], hi = v[0];
    for (double x : v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    const double range = hi > lo ? hi - lo : 1.0;
    for (double& x : v) {
        const double t = (x - lo) / range;
        x = std::round(t * 65535.0) / 65535.0;
    }
    return RealGrid(Shape{side, side}, std::move(v));
}

struct AlgorithmConfig {
    std::string label;
    Algorithm algorithm = Algorithm::Raar;
    RelaxationSchedule schedule = RelaxationSchedule::fixed(0.75);
    SupportKind dm_support = SupportKind::SupportNonneg;
};

/// Benchmark description: ground-truth object, zero-padding target, centered
/// support box, noise level, and the algorithm/schedule grid to compare.
struct ExperimentSpec {
    RealGrid object = synthetic_object();
    Shape pad_dims{128, 128};
    Shape support_dims{64, 64};
    double snr_db = 34.0;
    std::size_t trials = 100;
    std::size_t iterations = 100;
    std::vector<AlgorithmConfig> algorithms;
    std::uint64_t seed = 1;

    bool use_smoothed_magnitude = true;  // stable surrogate in the update rules
    double epsilon_rel = 1e-8;           // epsilon = epsilon_rel * max(m)

    enum class InitNorm { MatchData, Unit };
    InitNorm init_norm = InitNorm::MatchData;
    bool keep_final_iterates = false;
};

/// Ground truth embedded (centered) in the padded lattice.
inline RealGrid embed_object(const ExperimentSpec& spec) {
    const Shape& od = spec.object.dims();
    if (od.size() != spec.pad_dims.size() || od.size() != spec.support_dims.size()) {
        throw std::invalid_argument("experiment: object/support/pad ranks differ");
    }
    for (std::size_t a = 0; a < od.size(); ++a) {
        if (spec.support_dims[a] > spec.pad_dims[a]) {
            throw std::invalid_argument("experiment: support exceeds padded lattice");
        }
        if (od[a] > spec.support_dims[a]) {
            throw std::invalid_argument("experiment: object exceeds support");
        }
    }
    for (double v : spec.object.values()) {
        if (v < 0.0) throw std::invalid_argument("experiment: object must be nonnegative");
    }
    RealGrid out = RealGrid::zeros(spec.pad_dims);
    const std::size_t rank = od.size();
    std::vector<std::size_t> offset(rank);
    for (std::size_t a = 0; a < rank; ++a) offset[a] = (spec.pad_dims[a] - od[a]) / 2;
    for (std::size_t i = 0; i < spec.object.size(); ++i) {
        std::size_t rem = i;
        std::size_t j = 0;
        std::size_t stride = 1;
        for (std::size_t a = rank; a-- > 0;) {
            const std::size_t x = rem % od[a];
            rem /= od[a];
            j += (x + offset[a]) * stride;
            stride *= spec.pad_dims[a];
        }
        out[j] = spec.object[i];
    }
    return out;
}

struct SynthesizedData {
    MagnitudeData magnitude;  // noiseless |F(padded object)|, exactly symmetric
    SupportMask support;
    RealGrid initial_guess;   // characteristic function of the support, normalized
};

inline SynthesizedData synthesize_data(const ExperimentSpec& spec) {
    const RealGrid padded = embed_object(spec);
    MagnitudeData m = MagnitudeData::from_modulus(forward_transform(padded)).symmetrized();
    SupportMask mask = SupportMask::centered_box(spec.pad_dims, spec.support_dims);

    double target = 1.0;
    if (spec.init_norm == ExperimentSpec::InitNorm::MatchData) {
        target = 0.0;
        for (double v : m.values()) target += v * v;
        target = std::sqrt(target);
        if (target == 0.0) {
            throw std::invalid_argument("experiment: magnitude data is identically zero");
        }
    }
    const double c = target / std::sqrt(static_cast<double>(mask.count_inside()));
    std::vector<double> u0(mask.size());
    for (std::size_t i = 0; i < u0.size(); ++i) u0[i] = mask.inside(i) ? c : 0.0;
    return SynthesizedData{std::move(m), std::move(mask),
                           RealGrid(spec.pad_dims, std::move(u0))};
}

/// i.i.d. Gaussian level sigma plus the stream seed. sigma = 0 reproduces the
/// input exactly.
struct NoiseConfig {
    double sigma = 0.0;
    std::uint64_t seed = 0;

    NoiseConfig(double sigma_, std::uint64_t seed_) : sigma(sigma_), seed(seed_) {
        if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
            throw std::invalid_argument("NoiseConfig: sigma must be finite and >= 0");
        }
    }
};

/// Sigma such that the expected realized SNR, 20*log10(||m|| / ||eta||) with
/// eta drawn i.i.d. N(0, sigma^2) before symmetrization, matches snr_db:
/// E||eta||^2 = sigma^2 N.
inline double noise_sigma_for_snr(const MagnitudeData& m, double snr_db) {
    double n2 = 0.0;
    for (double v : m.values()) n2 += v * v;
    return std::sqrt(n2) * std::pow(10.0, -snr_db / 20.0) /
           std::sqrt(static_cast<double>(m.size()));
}

/// m + eta with eta Hermitian-symmetrized (average of eta(xi) and eta(-xi))
/// and the sum clamped at zero; negative magnitudes would encode a phase flip
/// the projector cannot represent.
inline MagnitudeData add_noise(const MagnitudeData& m, const NoiseConfig& cfg) {
    detail::GaussianSampler gauss(cfg.seed);
    std::vector<double> eta(m.size());
    for (double& e : eta) e = cfg.sigma * gauss();
    std::vector<double> out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        const std::size_t j = detail::negated_index(i, m.dims());
        out[i] = std::max(0.0, m[i] + 0.5 * (eta[i] + eta[j]));
    }
    return MagnitudeData(m.dims(), std::move(out));
}

/// Monitoring metric E_{S+}(u) = ||P_{S+}(P_M u) - P_M u||^2 / ||P_M u||^2,
/// computed with the exact magnitude projector. Zero exactly when P_M u
/// already satisfies support and nonnegativity.
inline double error_metric(const RealGrid& u, const MagnitudeData& m,
                           const SupportMask& D) {
    require_same_dims(u.dims(), m.dims(), "error_metric");
    require_same_dims(u.dims(), D.dims(), "error_metric");
    return detail::esplus_from_projection(project_magnitude_real(u, m), D);
}

struct TrialRecord {
    std::size_t trial_id = 0;
    std::vector<double> e;     // E_{S+} per iteration
    std::vector<double> e_db;  // decibels of the same
    std::optional<RealGrid> final_iterate;
};

struct AggregateTrace {
    std::string label;
    std::vector<double> mean_e;     // linear mean across trials per iteration
    std::vector<double> mean_e_db;  // decibels of the mean
};

struct BenchResult {
    std::vector<std::vector<TrialRecord>> trials;  // [config][trial]
    std::vector<AggregateTrace> aggregates;        // [config]
};

/// Runs every configured algorithm over `trials` noise realizations (same
/// initial guess throughout, per-trial noise streams derived from the seed)
/// and aggregates the per-iteration mean of E_{S+} in linear scale.
inline BenchResult run_trials(const ExperimentSpec& spec) {
    if (spec.trials < 1) throw std::invalid_argument("run_trials: trials must be >= 1");
    if (spec.iterations < 1) {
        throw std::invalid_argument("run_trials: iterations must be >= 1");
    }
    if (spec.algorithms.empty()) {
        throw std::invalid_argument("run_trials: no algorithm configurations");
    }

    const SynthesizedData data = synthesize_data(spec);
    const double sigma = noise_sigma_for_snr(data.magnitude, spec.snr_db);

    BenchResult result;
    result.trials.resize(spec.algorithms.size());
    result.aggregates.resize(spec.algorithms.size());
    for (std::size_t c = 0; c < spec.algorithms.size(); ++c) {
        result.aggregates[c].label = spec.algorithms[c].label;
        result.aggregates[c].mean_e.assign(spec.iterations, 0.0);
        result.trials[c].reserve(spec.trials);
    }

    for (std::size_t t = 0; t < spec.trials; ++t) {
        const MagnitudeData m =
            sigma > 0.0
                ? add_noise(data.magnitude, NoiseConfig(sigma, detail::derive_seed(spec.seed, t)))
                : data.magnitude;
        for (std::size_t c = 0; c < spec.algorithms.size(); ++c) {
            const AlgorithmConfig& cfg = spec.algorithms[c];
            TrialRecord record;
            record.trial_id = t;
            record.e.reserve(spec.iterations);
            record.e_db.reserve(spec.iterations);

            RunOptions opt;
            opt.algorithm = cfg.algorithm;
            opt.schedule = cfg.schedule;
            opt.iterations = spec.iterations;
            opt.use_smoothed_magnitude = spec.use_smoothed_magnitude;
            if (spec.use_smoothed_magnitude) {
                opt.smoothing = SmoothingConfig::scaled_to(m, spec.epsilon_rel);
            }
            opt.dm_support = cfg.dm_support;
            opt.record_iterates = false;
            opt.monitor = [&](const IterationState& s) {
                record.e.push_back(s.metric);
                record.e_db.push_back(to_decibels(s.metric));
            };
            RunResult run_result = run(data.initial_guess, m, data.support, opt);
            if (spec.keep_final_iterates) {
                record.final_iterate = std::move(run_result.final_iterate);
            }

            auto& mean = result.aggregates[c].mean_e;
            for (std::size_t i = 0; i < spec.iterations; ++i) mean[i] += record.e[i];
            result.trials[c].push_back(std::move(record));
        }
    }

    for (auto& agg : result.aggregates) {
        agg.mean_e_db.resize(spec.iterations);
        for (std::size_t i = 0; i < spec.iterations; ++i) {
            agg.mean_e[i] /= static_cast<double>(spec.trials);
            agg.mean_e_db[i] = to_decibels(agg.mean_e[i]);
        }
    }
    return result;
}

/// Writes the iterate (clipped to [0, max]) and its P_{S+} P_M shadow as PGM
/// files named `<prefix>_iter<n>.pgm` and `<prefix>_shadow<n>.pgm`.
inline std::pair<std::filesystem::path, std::filesystem::path> snapshot(
    const RealGrid& iterate, const MagnitudeData& m, const SupportMask& D,
    std::size_t n, const std::filesystem::path& dir, const std::string& prefix) {
    if (iterate.dims().size() != 2) {
        throw std::invalid_argument("snapshot: only 2-D grids can be imaged");
    }
    std::vector<double> clipped(iterate.size());
    for (std::size_t i = 0; i < iterate.size(); ++i) clipped[i] = std::max(0.0, iterate[i]);
    const RealGrid image(iterate.dims(), std::move(clipped));
    const RealGrid shadow = project_support_nonneg(project_magnitude_real(iterate, m), D);

    const auto iter_path = dir / (prefix + "_iter" + std::to_string(n) + ".pgm");
    const auto shadow_path = dir / (prefix + "_shadow" + std::to_string(n) + ".pgm");
    write_pgm_file(iter_path, image);
    write_pgm_file(shadow_path, shadow);
    return {iter_path, shadow_path};
}

/// Aggregate CSV: `iteration` column then `<label>_mean_E,<label>_mean_E_db`
/// per configuration. Header comments carry the resolved configuration.
inline void write_aggregate_csv(
    std::ostream& os, const BenchResult& result,
    const std::vector<std::pair<std::string, std::string>>& config = {}) {
    for (const auto& [key, value] : config) {
        os << "# " << key << " = " << value << '\n';
    }
    os << "iteration";
    for (const auto& agg : result.aggregates) {
        os << ',' << agg.label << "_mean_E," << agg.label << "_mean_E_db";
    }
    os << '\n';
    const std::size_t iterations =
        result.aggregates.empty() ? 0 : result.aggregates.front().mean_e.size();
    for (std::size_t i = 0; i < iterations; ++i) {
        os << (i + 1);
        for (const auto& agg : result.aggregates) {
            os << ',';
            detail::csv_double(os, agg.mean_e[i]);
            os << ',';
            detail::csv_double(os, agg.mean_e_db[i]);
        }
        os << '\n';
    }
}

} // namespace phasekit
