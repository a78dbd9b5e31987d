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

#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "phasekit/experiments.hpp"
#include "oracles.hpp"

using namespace phasekit;

namespace {

ExperimentSpec tiny_spec() {
    ExperimentSpec spec;
    spec.object = synthetic_object(6, 99);
    spec.pad_dims = {16, 16};
    spec.support_dims = {8, 8};
    spec.trials = 2;
    spec.iterations = 4;
    spec.seed = 5;
    spec.algorithms = {{"raar-0.75", Algorithm::Raar, RelaxationSchedule::fixed(0.75)}};
    return spec;
}

} // namespace

TEST_CASE("synthetic object is deterministic, nonnegative and pgm-exact") {
    const RealGrid a = synthetic_object();
    const RealGrid b = synthetic_object();
    CHECK(a == b);
    CHECK(a.dims() == Shape{38, 38});
    double peak = 0.0;
    for (double v : a.values()) {
        CHECK(v >= 0.0);
        peak = std::max(peak, v);
    }
    CHECK(peak == 1.0);

    std::stringstream ss;
    write_pgm(ss, a);
    CHECK(read_pgm(ss) == a);  // lossless at 16-bit quantization
}

TEST_CASE("synthesis frozen examples") {
    SECTION("1-site object without padding") {
        ExperimentSpec spec;
        spec.object = RealGrid(Shape{1}, {2.0});
        spec.pad_dims = {1};
        spec.support_dims = {1};
        const SynthesizedData d = synthesize_data(spec);
        CHECK(d.magnitude[0] == Catch::Approx(2.0).margin(1e-14));
    }
    SECTION("magnitude data is exactly symmetric") {
        ExperimentSpec spec = tiny_spec();
        const SynthesizedData d = synthesize_data(spec);
        CHECK(d.magnitude.is_hermitian());
    }
    SECTION("translation inside the support leaves the modulus unchanged") {
        ExperimentSpec spec = tiny_spec();
        const RealGrid padded = embed_object(spec);
        std::vector<double> moved(padded.size(), 0.0);
        for (std::size_t i = 0; i < padded.size(); ++i) {
            const std::size_t r = i / 16, c = i % 16;
            moved[((r + 1) % 16) * 16 + (c + 15) % 16] = padded[i];
        }
        const MagnitudeData m1 =
            MagnitudeData::from_modulus(forward_transform(padded)).symmetrized();
        const MagnitudeData m2 =
            MagnitudeData::from_modulus(forward_transform(RealGrid(Shape{16, 16}, moved)))
                .symmetrized();
        for (std::size_t i = 0; i < m1.size(); ++i) {
            CHECK(m1[i] == Catch::Approx(m2[i]).margin(1e-12 * (1.0 + m1.max_value())));
        }
    }
    SECTION("initial guess is the normalized support indicator") {
        ExperimentSpec spec = tiny_spec();
        const SynthesizedData d = synthesize_data(spec);
        double m_norm = 0.0;
        for (double v : d.magnitude.values()) m_norm += v * v;
        CHECK(norm(d.initial_guess) == Catch::Approx(std::sqrt(m_norm)).epsilon(1e-12));
        for (std::size_t i = 0; i < d.initial_guess.size(); ++i) {
            if (!d.support.inside(i)) CHECK(d.initial_guess[i] == 0.0);
        }

        spec.init_norm = ExperimentSpec::InitNorm::Unit;
        const SynthesizedData du = synthesize_data(spec);
        CHECK(norm(du.initial_guess) == Catch::Approx(1.0).epsilon(1e-12));
    }
    SECTION("object exceeding the support is rejected") {
        ExperimentSpec spec = tiny_spec();
        spec.support_dims = {4, 4};
        CHECK_THROWS_AS(synthesize_data(spec), std::invalid_argument);
        spec.support_dims = {32, 32};
        CHECK_THROWS_AS(synthesize_data(spec), std::invalid_argument);
    }
}

TEST_CASE("noise calibration and symmetry") {
    ExperimentSpec spec = tiny_spec();
    const SynthesizedData d = synthesize_data(spec);
    const MagnitudeData& m = d.magnitude;

    SECTION("sigma = 0 leaves the data untouched") {
        const MagnitudeData out = add_noise(m, NoiseConfig(0.0, 7));
        for (std::size_t i = 0; i < m.size(); ++i) CHECK(out[i] == m[i]);
    }
    SECTION("output is exactly symmetric") {
        const MagnitudeData out = add_noise(m, NoiseConfig(0.05 * m.max_value(), 7));
        CHECK(out.is_hermitian());
    }
    SECTION("realized snr of the calibrated sigma matches the target") {
        const double target = 34.0;
        const double sigma = noise_sigma_for_snr(m, target);
        double m_norm2 = 0.0;
        for (double v : m.values()) m_norm2 += v * v;
        const double m_norm = std::sqrt(m_norm2);

        double sum_db = 0.0;
        const int draws = 1000;
        for (int t = 0; t < draws; ++t) {
            detail::GaussianSampler gauss(detail::derive_seed(11, t));
            double eta2 = 0.0;
            for (std::size_t i = 0; i < m.size(); ++i) {
                const double e = sigma * gauss();
                eta2 += e * e;
            }
            sum_db += 20.0 * std::log10(m_norm / std::sqrt(eta2));
        }
        CHECK(sum_db / draws == Catch::Approx(target).margin(0.1));
    }
    SECTION("invalid sigma is rejected") {
        CHECK_THROWS_AS(NoiseConfig(-1.0, 0), std::invalid_argument);
    }
}

TEST_CASE("error metric frozen examples") {
    // P_M u = [2, -1] (u already feasible for m = |F u|), D = {0}:
    // numerator 1, denominator 5 -> 0.2; decibels 10*log10(0.2)
    const RealGrid u(Shape{2}, {2.0, -1.0});
    const MagnitudeData m = MagnitudeData::from_modulus(forward_transform(u));
    const SupportMask D = SupportMask::of_sites(Shape{2}, {0});
    const double e = error_metric(u, m, D);
    CHECK(e == Catch::Approx(0.2).margin(1e-12));
    CHECK(to_decibels(e) == Catch::Approx(-6.9897).margin(1e-3));

    // feasible point: metric is zero
    const RealGrid w(Shape{4}, {1.0, 2.0, 0.0, 0.0});
    const SupportMask Dw = SupportMask::of_sites(Shape{4}, {0, 1});
    const MagnitudeData mw = MagnitudeData::from_modulus(forward_transform(w));
    CHECK(error_metric(w, mw, Dw) <= 1e-12);

    // invariance under joint positive scaling of u and m
    std::vector<double> su(u.size());
    std::vector<double> sm(m.size());
    for (std::size_t i = 0; i < u.size(); ++i) su[i] = 3.5 * u[i];
    for (std::size_t i = 0; i < m.size(); ++i) sm[i] = 3.5 * m[i];
    CHECK(error_metric(RealGrid(u.dims(), su), MagnitudeData(m.dims(), sm), D) ==
          Catch::Approx(e).epsilon(1e-12));

    // m identically zero has no well-defined metric
    CHECK_THROWS_AS(error_metric(u, MagnitudeData(Shape{2}, {0.0, 0.0}), D),
                    std::invalid_argument);
}

TEST_CASE("run_trials aggregates and reproduces") {
    SECTION("single trial, single iteration equals one monitored step") {
        ExperimentSpec spec = tiny_spec();
        spec.trials = 1;
        spec.iterations = 1;
        const BenchResult r = run_trials(spec);
        REQUIRE(r.aggregates.size() == 1);
        REQUIRE(r.aggregates[0].mean_e.size() == 1);

        const SynthesizedData d = synthesize_data(spec);
        const MagnitudeData m = add_noise(
            d.magnitude, NoiseConfig(noise_sigma_for_snr(d.magnitude, spec.snr_db),
                                     detail::derive_seed(spec.seed, 0)));
        RunOptions opt;
        opt.algorithm = Algorithm::Raar;
        opt.schedule = RelaxationSchedule::fixed(0.75);
        opt.iterations = 1;
        opt.use_smoothed_magnitude = true;
        opt.smoothing = SmoothingConfig::scaled_to(m, spec.epsilon_rel);
        const RunResult single = run(d.initial_guess, m, d.support, opt);
        CHECK(r.aggregates[0].mean_e[0] == single.trace[0].metric);
    }
    SECTION("identical seeds give bit-identical aggregates") {
        const ExperimentSpec spec = tiny_spec();
        const BenchResult a = run_trials(spec);
        const BenchResult b = run_trials(spec);
        REQUIRE(a.aggregates.size() == b.aggregates.size());
        for (std::size_t c = 0; c < a.aggregates.size(); ++c) {
            CHECK(a.aggregates[c].mean_e == b.aggregates[c].mean_e);
        }
    }
    SECTION("noiseless trials are identical") {
        ExperimentSpec spec = tiny_spec();
        spec.snr_db = std::numeric_limits<double>::infinity();
        spec.trials = 3;
        const BenchResult r = run_trials(spec);
        for (std::size_t t = 1; t < spec.trials; ++t) {
            CHECK(r.trials[0][t].e == r.trials[0][0].e);
        }
    }
    SECTION("aggregate equals the trial mean independent of summation order") {
        ExperimentSpec spec = tiny_spec();
        spec.trials = 5;
        const BenchResult r = run_trials(spec);
        for (std::size_t i = 0; i < spec.iterations; ++i) {
            double fwd = 0.0, rev = 0.0;
            for (std::size_t t = 0; t < spec.trials; ++t) fwd += r.trials[0][t].e[i];
            for (std::size_t t = spec.trials; t-- > 0;) rev += r.trials[0][t].e[i];
            CHECK(r.aggregates[0].mean_e[i] ==
                  Catch::Approx(rev / spec.trials).epsilon(1e-14));
            CHECK(r.aggregates[0].mean_e[i] ==
                  Catch::Approx(fwd / spec.trials).epsilon(1e-14));
        }
    }
    SECTION("validation") {
        ExperimentSpec spec = tiny_spec();
        spec.algorithms.clear();
        CHECK_THROWS_AS(run_trials(spec), std::invalid_argument);
    }
}

TEST_CASE("aggregate csv layout") {
    ExperimentSpec spec = tiny_spec();
    const BenchResult r = run_trials(spec);
    std::ostringstream os;
    write_aggregate_csv(os, r, {{"seed", "5"}, {"trials", "2"}});
    const std::string out = os.str();
    CHECK(out.rfind("# seed = 5\n", 0) == 0);
    CHECK(out.find("iteration,raar-0.75_mean_E,raar-0.75_mean_E_db\n") != std::string::npos);
    CHECK(std::count(out.begin(), out.end(), '\n') ==
          2 + 1 + static_cast<long>(spec.iterations));
}

TEST_CASE("snapshot writes the iterate and its feasibility shadow") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "phasekit_snapshot_test";
    fs::create_directories(dir);

    ExperimentSpec spec = tiny_spec();
    const SynthesizedData d = synthesize_data(spec);

    // constant grid maps to a constant image
    const RealGrid flat(Shape{16, 16}, std::vector<double>(256, 0.5));
    const auto [iter_path, shadow_path] = snapshot(flat, d.magnitude, d.support, 3, dir, "flat");
    const RealGrid img = read_grid_file(iter_path);
    for (double v : img.values()) CHECK(v == 0.5);
    CHECK(fs::exists(shadow_path));
    const RealGrid shadow = read_grid_file(shadow_path);
    for (std::size_t i = 0; i < shadow.size(); ++i) {
        CHECK(shadow[i] >= 0.0);
        if (!d.support.inside(i)) CHECK(shadow[i] == 0.0);
    }

    CHECK_THROWS_AS(snapshot(RealGrid(Shape{4}, {1, 2, 3, 4}), d.magnitude, d.support, 0,
                             dir, "bad"),
                    std::invalid_argument);
    fs::remove_all(dir);
}
