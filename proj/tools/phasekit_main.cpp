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

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "phasekit/phasekit.hpp"

// phasekit command line:
//
//   synth        — write object / magnitude / mask files for an experiment
//   run          — run one algorithm, write the trace CSV and snapshots
//   bench        — multi-trial noisy-data comparison, aggregate CSV + SVG
//   convex-check — verify the convex fixed-point theory, JSON report
//
// Exit codes: 0 success, 2 validation failure, 3 numerical failure.

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace phasekit;

struct CommonExperimentFlags {
    std::string object_path;
    std::size_t object_side = 38;
    std::uint64_t object_seed = 1961;
    std::size_t pad = 128;
    std::size_t support = 64;
    double snr = 34.0;
    std::uint64_t seed = 1;

    void attach(CLI::App* cmd) {
        cmd->add_option("--object", object_path,
                        "object file (PGM or grid text); default: built-in texture");
        cmd->add_option("--object-side", object_side, "side of the built-in texture");
        cmd->add_option("--object-seed", object_seed, "seed of the built-in texture");
        cmd->add_option("--pad", pad, "padded lattice side")->check(CLI::PositiveNumber);
        cmd->add_option("--support", support, "centered support side")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--snr", snr, "target SNR in dB (inf for noiseless)");
        cmd->add_option("--seed", seed, "master seed for noise streams");
    }

    ExperimentSpec to_spec() const {
        ExperimentSpec spec;
        spec.object = object_path.empty() ? synthetic_object(object_side, object_seed)
                                          : read_grid_file(object_path);
        spec.pad_dims = {pad, pad};
        spec.support_dims = {support, support};
        spec.snr_db = snr;
        spec.seed = seed;
        return spec;
    }

    std::vector<std::pair<std::string, std::string>> describe() const {
        return {
            {"object", object_path.empty() ? "builtin" : object_path},
            {"object_side", std::to_string(object_side)},
            {"object_seed", std::to_string(object_seed)},
            {"pad", std::to_string(pad)},
            {"support", std::to_string(support)},
            {"snr_db", phasekit::detail::format_double(snr)},
            {"seed", std::to_string(seed)},
        };
    }
};

struct ScheduleFlags {
    std::string kind = "static";
    double beta = 0.75;
    double beta0 = 0.75;
    double switch_center = 7.0;
    double switch_power = 3.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--schedule", kind, "relaxation schedule: static | smooth")
            ->check(CLI::IsMember({"static", "smooth"}));
        cmd->add_option("--beta", beta, "static relaxation parameter in (0,1]");
        cmd->add_option("--beta0", beta0, "starting beta of the smooth-step schedule");
        cmd->add_option("--switch-center", switch_center, "smooth-step center iteration");
        cmd->add_option("--switch-power", switch_power, "smooth-step exponent");
    }

    RelaxationSchedule to_schedule() const {
        if (kind == "smooth") {
            return RelaxationSchedule::smooth_step(beta0, switch_center, switch_power);
        }
        return RelaxationSchedule::fixed(beta);
    }

    std::string label(const std::string& algo) const {
        char buf[64];
        if (kind == "smooth") {
            std::snprintf(buf, sizeof(buf), "%s-dyn%g", algo.c_str(), beta0);
        } else {
            std::snprintf(buf, sizeof(buf), "%s-%g", algo.c_str(), beta);
        }
        return buf;
    }
};

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::invalid_argument("cannot open " + path.string() + " for writing");
    os << content;
}

// --- synth -------------------------------------------------------------------

int run_synth(const CommonExperimentFlags& flags, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const ExperimentSpec spec = flags.to_spec();
    const SynthesizedData data = synthesize_data(spec);
    const RealGrid padded = embed_object(spec);

    write_grid_file(fs::path(out_dir) / "object.grid", padded);
    write_pgm_file(fs::path(out_dir) / "object.pgm", padded);
    write_grid_file(fs::path(out_dir) / "magnitude.grid", data.magnitude.to_grid());
    write_grid_file(fs::path(out_dir) / "mask.grid", data.support.to_grid());
    write_grid_file(fs::path(out_dir) / "initial_guess.grid", data.initial_guess);
    std::cout << "wrote object/magnitude/mask/initial_guess to " << out_dir << "\n";
    return 0;
}

// --- run ---------------------------------------------------------------------

struct RunFlags {
    std::string algo = "raar";
    ScheduleFlags schedule;
    std::size_t iters = 100;
    std::string data_path;
    std::string mask_path;
    std::string init_path;
    std::size_t trial = 0;
    bool exact_pm = false;
    double epsilon_rel = 1e-8;
    double epsilon_abs = 0.0;  // 0 means "use relative"
    std::vector<std::size_t> snapshots;
    std::string run_id;
    double dm_gamma1 = -1.0;
    double dm_gamma2 = 0.0;  // 0 means 1/beta
    bool dm_printed = false;
    std::string dm_support = "s+";
};

int run_run(const CommonExperimentFlags& common, const RunFlags& rf,
            const std::string& out_dir) {
    fs::create_directories(out_dir);
    const Algorithm algorithm = parse_algorithm(rf.algo);

    MagnitudeData m(Shape{1}, {1.0});
    SupportMask mask = SupportMask::full(Shape{1});
    RealGrid u0 = RealGrid::zeros(Shape{1});
    if (!rf.data_path.empty()) {
        if (rf.mask_path.empty()) {
            throw std::invalid_argument("run: --data requires --mask");
        }
        m = read_magnitude_file(rf.data_path);
        mask = read_mask_file(rf.mask_path);
        if (!rf.init_path.empty()) {
            u0 = read_grid_file(rf.init_path);
        } else {
            double m_norm = 0.0;
            for (double v : m.values()) m_norm += v * v;
            const double c =
                std::sqrt(m_norm) / std::sqrt(static_cast<double>(mask.count_inside()));
            std::vector<double> v(mask.size());
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = mask.inside(i) ? c : 0.0;
            u0 = RealGrid(mask.dims(), std::move(v));
        }
    } else {
        const ExperimentSpec spec = common.to_spec();
        const SynthesizedData data = synthesize_data(spec);
        const double sigma = noise_sigma_for_snr(data.magnitude, spec.snr_db);
        m = sigma > 0.0
                ? add_noise(data.magnitude,
                            NoiseConfig(sigma, phasekit::detail::derive_seed(spec.seed, rf.trial)))
                : data.magnitude;
        mask = data.support;
        u0 = data.initial_guess;
    }

    RunOptions opt;
    opt.algorithm = algorithm;
    opt.schedule = rf.schedule.to_schedule();
    opt.iterations = rf.iters;
    opt.use_smoothed_magnitude = !rf.exact_pm;
    if (opt.use_smoothed_magnitude) {
        opt.smoothing = rf.epsilon_abs > 0.0 ? SmoothingConfig(rf.epsilon_abs)
                                             : SmoothingConfig::scaled_to(m, rf.epsilon_rel);
    }
    opt.dm_gamma1 = rf.dm_gamma1;
    if (rf.dm_gamma2 != 0.0) opt.dm_gamma2 = rf.dm_gamma2;
    opt.dm_convention = rf.dm_printed ? DifferenceMapParams::Convention::Printed
                                      : DifferenceMapParams::Convention::Standard;
    opt.dm_support = rf.dm_support == "s" ? SupportKind::Support : SupportKind::SupportNonneg;
    opt.record_iterates = false;

    const std::string run_id =
        rf.run_id.empty() ? rf.schedule.label(rf.algo) : rf.run_id;

    std::vector<IterationState> trace;
    trace.reserve(rf.iters);
    opt.monitor = [&](const IterationState& s) {
        trace.push_back(IterationState{s.index, s.beta, s.metric, RealGrid::zeros(Shape{1})});
        for (std::size_t n : rf.snapshots) {
            if (s.index == n) snapshot(s.iterate, m, mask, n, out_dir, run_id);
        }
    };
    run(u0, m, mask, opt);

    std::ostringstream os;
    os << "# subcommand = run\n# algo = " << rf.algo << "\n# run_id = " << run_id
       << "\n# iterations = " << rf.iters << "\n# schedule = " << rf.schedule.kind
       << "\n# smoothed_pm = " << (opt.use_smoothed_magnitude ? "true" : "false") << "\n";
    for (const auto& [k, v] : common.describe()) os << "# " << k << " = " << v << "\n";
    write_trace_csv(os, run_id, trace);
    write_text_file(fs::path(out_dir) / "trace.csv", os.str());
    std::cout << "wrote " << (fs::path(out_dir) / "trace.csv").string() << "\n";
    return 0;
}

// --- bench -------------------------------------------------------------------

struct BenchFlags {
    std::string algo;  // empty: default comparison suite
    ScheduleFlags schedule;
    std::size_t iters = 100;
    std::size_t trials = 100;
    bool exact_pm = false;
    double epsilon_rel = 1e-8;
    bool full_suite = false;
};

std::vector<AlgorithmConfig> default_suite(bool full) {
    std::vector<AlgorithmConfig> configs;
    const auto add = [&](const char* label, Algorithm a, RelaxationSchedule s) {
        configs.push_back({label, a, s});
    };
    add("raar-dyn0.75", Algorithm::Raar, RelaxationSchedule::smooth_step(0.75));
    add("raar-0.75", Algorithm::Raar, RelaxationSchedule::fixed(0.75));
    add("raar-0.87", Algorithm::Raar, RelaxationSchedule::fixed(0.87));
    add("raar-0.99", Algorithm::Raar, RelaxationSchedule::fixed(0.99));
    add("hio-0.75", Algorithm::Hio, RelaxationSchedule::fixed(0.75));
    add("hpr-0.75", Algorithm::Hpr, RelaxationSchedule::fixed(0.75));
    if (full) {
        add("hio-0.87", Algorithm::Hio, RelaxationSchedule::fixed(0.87));
        add("hio-0.99", Algorithm::Hio, RelaxationSchedule::fixed(0.99));
        add("hio-dyn0.75", Algorithm::Hio, RelaxationSchedule::smooth_step(0.75));
        add("hpr-0.87", Algorithm::Hpr, RelaxationSchedule::fixed(0.87));
        add("hpr-0.99", Algorithm::Hpr, RelaxationSchedule::fixed(0.99));
        add("hpr-dyn0.75", Algorithm::Hpr, RelaxationSchedule::smooth_step(0.75));
    }
    return configs;
}

int run_bench(const CommonExperimentFlags& common, const BenchFlags& bf,
              const std::string& out_dir) {
    fs::create_directories(out_dir);
    ExperimentSpec spec = common.to_spec();
    spec.iterations = bf.iters;
    spec.trials = bf.trials;
    spec.use_smoothed_magnitude = !bf.exact_pm;
    spec.epsilon_rel = bf.epsilon_rel;
    if (bf.algo.empty()) {
        spec.algorithms = default_suite(bf.full_suite);
    } else {
        spec.algorithms = {{bf.schedule.label(bf.algo), parse_algorithm(bf.algo),
                            bf.schedule.to_schedule()}};
    }

    const BenchResult result = run_trials(spec);

    auto header = common.describe();
    header.emplace_back("subcommand", "bench");
    header.emplace_back("iterations", std::to_string(bf.iters));
    header.emplace_back("trials", std::to_string(bf.trials));
    header.emplace_back("smoothed_pm", bf.exact_pm ? "false" : "true");
    header.emplace_back("epsilon_rel", phasekit::detail::format_double(bf.epsilon_rel));

    std::ostringstream csv;
    write_aggregate_csv(csv, result, header);
    write_text_file(fs::path(out_dir) / "aggregate.csv", csv.str());

    ChartSpec chart;
    chart.title = "mean E_{S+} vs iteration";
    chart.y_label = "mean E_{S+} [dB]";
    for (const auto& agg : result.aggregates) {
        chart.series.push_back({agg.label, agg.mean_e_db});
    }
    std::ostringstream svg;
    for (const auto& [k, v] : header) svg << "<!-- " << k << " = " << v << " -->\n";
    write_line_chart(svg, chart);
    write_text_file(fs::path(out_dir) / "bench.svg", svg.str());

    std::cout << "wrote " << (fs::path(out_dir) / "aggregate.csv").string() << " and "
              << (fs::path(out_dir) / "bench.svg").string() << "\n";
    for (const auto& agg : result.aggregates) {
        std::cout << "  " << agg.label << ": final mean E_splus = "
                  << phasekit::detail::format_double(agg.mean_e.back()) << " ("
                  << phasekit::detail::format_double(agg.mean_e_db.back()) << " dB)\n";
    }
    return 0;
}

// --- convex-check ------------------------------------------------------------

json check_to_json(const convex::CheckResult& c) {
    return json{{"name", c.name},
                {"residual", c.residual},
                {"tolerance", c.tolerance},
                {"pass", c.pass}};
}

int run_convex_check(const std::string& out_file, std::size_t samples,
                     std::uint64_t seed) {
    using namespace phasekit::convex;

    struct Geometry {
        std::string name;
        ConvexSetSpec A;
        ConvexSetSpec B;
    };
    const std::vector<Geometry> geometries = {
        {"half-lines-1d", half_space({1.0}, 0.0), half_space({-1.0}, -2.0)},
        {"disjoint-balls-2d", ball({0.0, 0.0}, 1.0), ball({4.0, 0.0}, 1.0)},
        {"shifted-boxes-2d", box({0.0, 0.0}, {1.0, 1.0}), box({3.0, 0.5}, {4.0, 1.5})},
        {"overlapping-half-spaces-2d", half_space({1.0, 0.0}, 1.0),
         half_space({0.0, 1.0}, 1.0)},
        {"line-vs-ball-2d", affine_subspace({0.0, 0.0}, {{1.0, 0.0}}),
         ball({0.0, 3.0}, 1.0)},
    };
    const std::vector<double> betas = {0.25, 0.5, 0.75, 0.9};

    bool all_pass = true;
    json report;
    report["tolerances"] = {{"fixed_point", 1e-10}, {"theorem", 1e-6}, {"identity", 1e-12}};
    report["geometries"] = json::array();

    std::mt19937_64 eng(seed);
    for (const auto& geo : geometries) {
        json jg;
        jg["geometry"] = geo.name;
        const auto diag = gap_vector(geo.A, geo.B);
        jg["gap_norm"] = norm(diag.gap);
        jg["consistent"] = diag.consistent;

        jg["theorem22"] = json::array();
        for (double beta : betas) {
            const auto rep =
                verify_theorem22(geo.A, geo.B, beta, samples, geo.name, seed + 17);
            json jr;
            jr["beta"] = beta;
            jr["all_pass"] = rep.all_pass;
            double worst = 0.0;
            json checks = json::array();
            for (const auto& c : rep.checks) {
                checks.push_back(check_to_json(c));
                worst = std::max(worst, c.residual);
            }
            jr["worst_residual"] = worst;
            jr["checks"] = std::move(checks);
            jg["theorem22"].push_back(std::move(jr));
            all_pass = all_pass && rep.all_pass;
        }

        {
            const auto rep = verify_prop23(geo.A, geo.B, 0.5, 0.75, 100, 0.1, geo.name,
                                           seed + 29);
            json jp;
            jp["beta_n"] = 0.5;
            jp["beta_next"] = 0.75;
            jp["all_pass"] = rep.all_pass;
            jp["step_relation_residual"] = rep.checks.front().residual;
            jg["prop23"] = std::move(jp);
            all_pass = all_pass && rep.all_pass;
        }

        {
            double worst = 0.0;
            for (int k = 0; k < 200; ++k) {
                Point u(dimension(geo.A));
                for (double& v : u) {
                    v = 12.0 * (static_cast<double>(eng() >> 11) * 0x1.0p-53) - 6.0;
                }
                worst = std::max(worst, displacement_identity_residual(geo.A, geo.B, u));
            }
            jg["identity_worst_residual"] = worst;
            const bool ok = worst <= 1e-12;
            jg["identity_pass"] = ok;
            all_pass = all_pass && ok;
        }
        report["geometries"].push_back(std::move(jg));
    }

    // unrelaxed divergence signature on the canonical infeasible pair
    {
        const ConvexSetSpec A = half_space({1.0}, 0.0);
        const ConvexSetSpec B = half_space({-1.0}, -2.0);
        const auto diag = gap_vector(A, B);
        Point u{5.0};
        for (int k = 0; k < 200; ++k) u = raar_convex_operator(A, B, 1.0, u);
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            const Point next = raar_convex_operator(A, B, 1.0, u);
            worst = std::max(worst, norm(add_scaled(subtract(next, u), 1.0, diag.gap)));
            u = next;
        }
        report["aar_divergence"] = {{"worst_residual", worst}, {"pass", worst <= 1e-6}};
        all_pass = all_pass && worst <= 1e-6;
    }

    report["all_pass"] = all_pass;
    write_text_file(out_file, report.dump(2) + "\n");
    std::cout << "wrote " << out_file << (all_pass ? " (all checks pass)\n" : " (FAILURES)\n");
    return all_pass ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"phase retrieval by relaxed averaged alternating reflections"};
    app.set_config("--config", "", "config file with key = value lines");
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "write object/magnitude/mask files");
    CommonExperimentFlags synth_common;
    synth_common.attach(synth);
    std::string synth_out = "phasekit-out";
    synth->add_option("--out", synth_out, "output directory");

    // run
    auto* runc = app.add_subcommand("run", "run one algorithm and write its trace");
    CommonExperimentFlags run_common;
    run_common.attach(runc);
    RunFlags rf;
    runc->add_option("--algo", rf.algo, "hio | hio-support | hpr | raar | dm");
    rf.schedule.attach(runc);
    runc->add_option("--iters", rf.iters, "iteration count")->check(CLI::PositiveNumber);
    runc->add_option("--data", rf.data_path, "magnitude data file (grid text)");
    runc->add_option("--mask", rf.mask_path, "support mask file (0/1 grid)");
    runc->add_option("--init", rf.init_path, "initial guess file");
    runc->add_option("--trial", rf.trial, "noise stream index");
    runc->add_flag("--exact-pm", rf.exact_pm, "use the exact magnitude projector");
    runc->add_option("--epsilon-rel", rf.epsilon_rel, "smoothing epsilon / max(m)");
    runc->add_option("--epsilon", rf.epsilon_abs, "absolute smoothing epsilon");
    runc->add_option("--snapshot", rf.snapshots, "iteration(s) to image")->expected(-1);
    runc->add_option("--run-id", rf.run_id, "identifier column of the trace CSV");
    runc->add_option("--dm-gamma1", rf.dm_gamma1, "difference map gamma1");
    runc->add_option("--dm-gamma2", rf.dm_gamma2, "difference map gamma2 (0: use 1/beta)");
    runc->add_flag("--dm-printed", rf.dm_printed, "use the printed sign convention");
    runc->add_option("--dm-support", rf.dm_support, "difference map constraint: s | s+")
        ->check(CLI::IsMember({"s", "s+"}));
    std::string run_out = "phasekit-out";
    runc->add_option("--out", run_out, "output directory");

    // bench
    auto* bench = app.add_subcommand("bench", "multi-trial algorithm comparison");
    CommonExperimentFlags bench_common;
    bench_common.attach(bench);
    BenchFlags bf;
    bench->add_option("--algo", bf.algo, "single algorithm (default: comparison suite)");
    bf.schedule.attach(bench);
    bench->add_option("--iters", bf.iters, "iteration count")->check(CLI::PositiveNumber);
    bench->add_option("--trials", bf.trials, "noise realizations")
        ->check(CLI::PositiveNumber);
    bench->add_flag("--exact-pm", bf.exact_pm, "use the exact magnitude projector");
    bench->add_option("--epsilon-rel", bf.epsilon_rel, "smoothing epsilon / max(m)");
    bench->add_flag("--full-suite", bf.full_suite, "all algorithms at all betas");
    std::string bench_out = "phasekit-out";
    bench->add_option("--out", bench_out, "output directory");

    // convex-check
    auto* convexc = app.add_subcommand("convex-check", "verify the convex theory");
    std::string convex_out = "convex_report.json";
    std::size_t convex_samples = 3;
    std::uint64_t convex_seed = 1;
    convexc->add_option("--out", convex_out, "JSON report path");
    convexc->add_option("--samples", convex_samples, "fixed points per geometry/beta");
    convexc->add_option("--seed", convex_seed, "sampling seed");

    try {
        app.parse(argc, argv);
        if (synth->parsed()) return run_synth(synth_common, synth_out);
        if (runc->parsed()) return run_run(run_common, rf, run_out);
        if (bench->parsed()) return run_bench(bench_common, bf, bench_out);
        if (convexc->parsed()) return run_convex_check(convex_out, convex_samples, convex_seed);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const phasekit::convex::ConvergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 3;
    }
}
