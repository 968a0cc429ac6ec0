// qmetrix: entanglement-constrained optimal QFI toolkit.
//
//   qmetrix law --measure ggm --grid 0:0.05:0.5
//   qmetrix optimize --N 2 --d 2 --measure ggm --target 0.25 --seed 1
//   qmetrix sweep --N 3 --measure ggm --grid 0:0.05:0.5 --out n3.csv
//   qmetrix sample-gm --nu 100000 --N 3 --seed 7 --out gm.csv
//   qmetrix sample-gm --compare a.csv b.csv
//   qmetrix fit --in n3.csv --family rational
//   qmetrix verify
//
// Every flag can also come from --config FILE (key=value lines; options of a
// subcommand go under a [subcommand] section). Flags override the file.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qmetrix/acceptance.hpp"
#include "qmetrix/analytic_laws.hpp"
#include "qmetrix/fitting.hpp"
#include "qmetrix/gm_sampler.hpp"
#include "qmetrix/optimizer.hpp"
#include "qmetrix/parallel.hpp"
#include "qmetrix/reporting.hpp"
#include "qmetrix/serialization.hpp"

using namespace qmetrix;
using json = nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Randomized commands never run on a hidden seed: pick one and say so.
std::uint64_t resolve_seed(std::optional<std::uint64_t> seed)
{
    if (seed) return *seed;
    std::random_device rd;
    const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    std::cerr << "seed: " << s << " (generated; pass --seed to reproduce)\n";
    return s;
}

void emit_csv(const CsvTable& table, const std::string& out, RunManifest manifest, Clock::time_point t0,
              const std::string& svg = "", const std::vector<SvgSeries>& series = {}, const std::string& title = "",
              const std::string& x_label = "", const std::string& y_label = "")
{
    if (out.empty()) {
        std::cout << to_csv_string(table);
        return;
    }
    write_csv(out, table);
    manifest.add_output(out);
    if (!svg.empty()) {
        write_svg_chart(svg, title, x_label, y_label, series);
        manifest.add_output(svg);
    }
    manifest.version = QMETRIX_VERSION;
    manifest.wall_seconds = seconds_since(t0);
    const auto path = write_manifest(manifest, out);
    std::cerr << "wrote " << out << " and " << path.string() << "\n";
}

struct LawOptions {
    std::string measure = "ggm";
    std::string grid;
    int d = 2;
    bool unequal_d3 = false;
    std::string out;
    std::string svg;
};

int cmd_law(const LawOptions& o)
{
    const auto t0 = Clock::now();
    const Measure m = measure_from_string(o.measure);
    const std::string grid_text = o.grid.empty() ? (m == Measure::Entropy ? "0:0.1:1" : "0:0.05:0.5") : o.grid;
    const auto values = parse_grid(grid_text);
    const auto table = law_table(m, values, o.d, o.unequal_d3);
    RunManifest manifest;
    manifest.command = "law";
    manifest.config = {{"measure", o.measure}, {"grid", grid_text}, {"d", o.d}, {"unequal_d3", o.unequal_d3}};
    SvgSeries s{"stddev", {}, {}};
    for (const auto& row : table.rows) s.x.push_back(std::stod(row[1])), s.y.push_back(std::stod(row[3]));
    emit_csv(table, o.out, manifest, t0, o.svg, {s}, "optimal precision", o.measure, "stddev");
    return 0;
}

struct ProblemOptions {
    int parties = 2;
    int d = 2;
    std::string spectrum;
    std::vector<double> eigenvalues;
    std::string measure = "ggm";
    std::optional<double> target;
    std::string grid;
    double tol = 1e-6;
    std::string space = "full";
    int population = 0;
    int generations = 300;
    int restarts = 8;
    int polish_evals = 200000;
    bool no_polish = false;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    std::string out;
    std::string svg;
    std::string weights_out;
};

ConstrainedProblem build_problem(const ProblemOptions& o)
{
    SpectrumKind kind;
    if (o.spectrum.empty())
        kind = o.eigenvalues.empty() ? (o.d == 2 ? SpectrumKind::PauliZ : SpectrumKind::SpinRescaled) : SpectrumKind::Custom;
    else
        kind = spectrum_kind_from_string(o.spectrum);
    std::optional<std::vector<double>> custom;
    if (kind == SpectrumKind::Custom) custom = o.eigenvalues;
    else if (!o.eigenvalues.empty()) throw std::invalid_argument("--eigenvalues requires --spectrum custom");
    return ConstrainedProblem{make_generator(o.parties, o.d, kind, custom), measure_from_string(o.measure), 0.0, o.tol,
                              search_space_from_string(o.space)};
}

EsConfig build_es(const ProblemOptions& o, std::uint64_t seed)
{
    EsConfig cfg;
    cfg.population = o.population;
    cfg.generations = o.generations;
    cfg.restarts = o.restarts;
    cfg.polish = !o.no_polish;
    cfg.polish_max_evals = o.polish_evals;
    cfg.seed = seed;
    cfg.threads = o.threads;
    validate(cfg);
    return cfg;
}

CsvTable optimize_table(const ConstrainedProblem& p, const std::vector<SweepEntry>& entries, std::uint64_t seed)
{
    CsvTable t;
    t.schema = "qmetrix.optimize/v1";
    const auto& g = p.generator;
    std::string eig;
    for (double e : g.local_eigenvalues()) eig += (eig.empty() ? "" : " ") + format_double(e);
    t.meta = {{"N", std::to_string(g.parties())},        {"d", std::to_string(g.local_dim())},
              {"spectrum", std::string(to_string(g.kind()))}, {"eigenvalues", eig},
              {"measure", std::string(to_string(p.measure))}, {"tol", format_double(p.constraint_tol)},
              {"space", std::string(to_string(p.search_space))}, {"seed", std::to_string(seed)}};
    t.columns = {"target", "q_best", "stddev", "residual", "generations", "feasible_fraction", "seed", "converged"};
    for (const auto& e : entries) {
        if (e.result) {
            const auto& r = *e.result;
            t.rows.push_back({format_double(e.target), format_double(r.q_best),
                              r.q_best > 0.0 ? format_double(cramer_rao_stddev(r.q_best)) : "nan",
                              format_double(r.constraint_residual), std::to_string(r.generations),
                              format_double(r.feasible_fraction), std::to_string(r.seed),
                              r.converged ? "true" : "false"});
        } else {
            std::cerr << "target " << format_double(e.target) << ": " << e.error << "\n";
            t.rows.push_back({format_double(e.target), "nan", "nan", "nan", "0", "0", std::to_string(seed), "false"});
        }
    }
    return t;
}

json problem_json(const ProblemOptions& o, const std::vector<double>& targets, std::uint64_t seed)
{
    return {{"N", o.parties},
            {"d", o.d},
            {"spectrum", o.spectrum},
            {"eigenvalues", o.eigenvalues},
            {"measure", o.measure},
            {"targets", targets},
            {"tol", o.tol},
            {"space", o.space},
            {"population", o.population},
            {"generations", o.generations},
            {"restarts", o.restarts},
            {"polish", !o.no_polish},
            {"polish_evals", o.polish_evals},
            {"seed", seed},
            {"threads", o.threads}};
}

int cmd_optimize(const ProblemOptions& o, bool warm_sweep)
{
    const auto t0 = Clock::now();
    std::vector<double> targets;
    if (o.target && !o.grid.empty()) throw CLI::ValidationError("--target and --grid are mutually exclusive");
    if (o.target) targets = {*o.target};
    else if (!o.grid.empty()) targets = parse_grid(o.grid);
    else throw CLI::ValidationError(warm_sweep ? "sweep needs --grid" : "optimize needs --target or --grid");

    auto problem = build_problem(o);
    const std::uint64_t seed = resolve_seed(o.seed);
    const auto cfg = build_es(o, seed);
    // Reject unusable problems up front; per-target range errors become rows.
    problem.target = targets.front();
    if (problem.measure == Measure::GM && problem.generator.parties() >= 3) validate(problem);

    std::vector<SweepEntry> entries;
    if (warm_sweep) {
        entries = sweep(problem, targets, cfg);
    } else {
        for (std::size_t i = 0; i < targets.size(); ++i) {
            problem.target = targets[i];
            SweepEntry e{targets[i], std::nullopt, {}};
            try {
                e.result = maximize_qfi(problem, cfg, std::nullopt, i);
            } catch (const std::exception& ex) {
                e.error = ex.what();
            }
            entries.push_back(std::move(e));
        }
    }

    const auto table = optimize_table(problem, entries, seed);
    RunManifest manifest;
    manifest.command = warm_sweep ? "sweep" : "optimize";
    manifest.config = problem_json(o, targets, seed);
    manifest.seeds = {seed};
    SvgSeries s{"optimizer", {}, {}};
    for (const auto& e : entries)
        if (e.result && e.result->q_best > 0.0) s.x.push_back(e.target), s.y.push_back(cramer_rao_stddev(e.result->q_best));

    if (!o.weights_out.empty()) {
        json all = json::array();
        for (const auto& e : entries)
            if (e.result) all.push_back({{"target", e.target}, {"probe", probe_to_json(problem.generator, e.result->best_weights)}});
        std::ofstream(o.weights_out) << all.dump(2) << "\n";
        if (!o.out.empty()) manifest.add_output(o.weights_out);
    }
    emit_csv(table, o.out, manifest, t0, o.svg, {s}, "optimal precision", o.measure, "stddev");
    return 0;
}

struct SampleOptions {
    std::uint64_t nu = 100000;
    int parties = 3;
    int d = 2;
    double bin_width = 0.05;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    std::string out;
    std::vector<std::string> compare;
    double rel_tol = 0.05;
};

int cmd_sample(const SampleOptions& o)
{
    const auto t0 = Clock::now();
    if (!o.compare.empty()) {
        if (o.compare.size() != 2) throw CLI::ValidationError("--compare takes two sample-gm CSV files");
        const auto a = sampler_report_from_table(read_csv(o.compare[0]));
        const auto b = sampler_report_from_table(read_csv(o.compare[1]));
        const auto report = convergence_check(a, b, o.rel_tol);
        CsvTable t;
        t.schema = "qmetrix.gm-compare/v1";
        t.meta = {{"a", o.compare[0]}, {"b", o.compare[1]}, {"rel_tol", format_double(o.rel_tol)}};
        t.columns = {"k", "q_a", "q_b", "rel_diff", "exceeds"};
        for (const auto& c : report.bins)
            t.rows.push_back({std::to_string(c.k), c.q_a ? format_double(*c.q_a) : "", c.q_b ? format_double(*c.q_b) : "",
                              c.rel_diff ? format_double(*c.rel_diff) : "", c.exceeds ? "true" : "false"});
        RunManifest manifest;
        manifest.command = "sample-gm --compare";
        manifest.config = {{"a", o.compare[0]}, {"b", o.compare[1]}, {"rel_tol", o.rel_tol}};
        emit_csv(t, o.out, manifest, t0);
        return 0;
    }
    SamplerConfig cfg;
    cfg.samples = o.nu;
    cfg.parties = o.parties;
    cfg.local_dim = o.d;
    cfg.bin_width = o.bin_width;
    cfg.seed = resolve_seed(o.seed);
    cfg.threads = o.threads;
    const auto report = bin_and_maximize(cfg);
    RunManifest manifest;
    manifest.command = "sample-gm";
    manifest.config = {{"nu", o.nu},        {"N", o.parties},          {"d", o.d},
                       {"bin_width", o.bin_width}, {"seed", cfg.seed}, {"chunk_size", cfg.chunk_size},
                       {"screening", {{"restarts", cfg.screening.restarts}, {"max_sweeps", cfg.screening.max_sweeps}}},
                       {"escalation", {{"restarts", cfg.escalation.restarts}, {"max_sweeps", cfg.escalation.max_sweeps}}}};
    manifest.seeds = {cfg.seed};
    emit_csv(sampler_table(report), o.out, manifest, t0);
    return 0;
}

struct FitOptions {
    std::string in;
    std::string family = "rational";
    std::string reading = "inverse-sqrt";
    std::string x_column;
    std::string out;
};

int cmd_fit(const FitOptions& o)
{
    const auto t0 = Clock::now();
    const auto table = read_csv(o.in);
    std::string x_col = o.x_column;
    if (x_col.empty()) x_col = table.schema.rfind("qmetrix.sample-gm", 0) == 0 ? "gm_lo" : table.columns.front();
    const auto cx = table.column(x_col);
    const auto cs = table.column("stddev");
    std::vector<FitPoint> pts;
    for (const auto& row : table.rows) {
        if (row.size() <= std::max(cx, cs) || row[cs].empty() || row[cs] == "nan") continue;
        if (const auto cc = std::find(table.columns.begin(), table.columns.end(), "converged");
            cc != table.columns.end() && row[static_cast<std::size_t>(cc - table.columns.begin())] == "false")
            continue;
        pts.push_back({std::stod(row[cx]), std::stod(row[cs])});
    }
    const FitFamily family = fit_family_from_string(o.family);
    const FitResult r = family == FitFamily::RationalInvSqrt ? fit_rational(pts)
                                                             : fit_quadratic(pts, quadratic_reading_from_string(o.reading));
    json j = {{"family", std::string(to_string(r.family))},
              {"params", r.params},
              {"residuals",
               {{"transformed", r.residual_norm}, {"stddev", r.stddev_residual_norm}, {"max_rel_stddev", r.max_rel_stddev_error}}},
              {"points_used", r.points_used},
              {"converged", r.converged}};
    if (family == FitFamily::QuadraticInvSqrt) j["reading"] = std::string(to_string(r.reading));
    if (o.out.empty()) {
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::ofstream(o.out) << j.dump(2) << "\n";
    RunManifest manifest;
    manifest.command = "fit";
    manifest.config = {{"in", o.in}, {"in_sha256", sha256_file(o.in)}, {"family", o.family}, {"reading", o.reading}, {"x_column", x_col}};
    manifest.add_output(o.out);
    manifest.version = QMETRIX_VERSION;
    manifest.wall_seconds = seconds_since(t0);
    write_manifest(manifest, o.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Entanglement-constrained optimal quantum Fisher information toolkit"};
    app.set_version_flag("--version", std::string(QMETRIX_VERSION));
    app.set_config("--config", "", "key=value configuration file; flags override it");
    app.require_subcommand(1);
    const int env_threads = default_threads();

    LawOptions law;
    auto* law_cmd = app.add_subcommand("law", "Tabulate the analytic optimal-QFI laws");
    law_cmd->add_option("--measure", law.measure, "ggm | entropy")->capture_default_str();
    law_cmd->add_option("--grid", law.grid, "lo:step:hi or comma list (default full range)");
    law_cmd->add_option("--d", law.d, "local dimension (2..5)")->capture_default_str();
    law_cmd->add_flag("--unequal-d3", law.unequal_d3, "use the (0,2,3) qutrit law");
    law_cmd->add_option("--out", law.out, "output CSV (default stdout)");
    law_cmd->add_option("--svg", law.svg, "optional SVG chart");

    auto add_problem = [&](CLI::App* cmd, ProblemOptions& o) {
        cmd->add_option("--N", o.parties, "number of parties")->capture_default_str();
        cmd->add_option("--d", o.d, "local dimension")->capture_default_str();
        cmd->add_option("--spectrum", o.spectrum, "pauli-z | spin-rescaled | custom (default by d)");
        cmd->add_option("--eigenvalues", o.eigenvalues, "local eigenvalues for --spectrum custom")->delimiter(',');
        cmd->add_option("--measure", o.measure, "ggm | entropy | gm (gm only for N = 2)")->capture_default_str();
        cmd->add_option("--target", o.target, "entanglement target");
        cmd->add_option("--grid", o.grid, "target grid lo:step:hi or comma list");
        cmd->add_option("--tol", o.tol, "constraint band half-width")->capture_default_str();
        cmd->add_option("--space", o.space, "full | corner")->capture_default_str();
        cmd->add_option("--population", o.population, "offspring per generation (0 = 20 (dim+1))")->capture_default_str();
        cmd->add_option("--generations", o.generations)->capture_default_str();
        cmd->add_option("--restarts", o.restarts)->capture_default_str();
        cmd->add_option("--polish-evals", o.polish_evals, "measure evaluations per restart for refinement")
            ->capture_default_str();
        cmd->add_flag("--no-polish", o.no_polish, "skip the constraint-surface refinement");
        cmd->add_option("--seed", o.seed, "RNG seed (generated and printed if omitted)");
        cmd->add_option("--threads", o.threads, "worker threads (default QMETRIX_THREADS)");
        cmd->add_option("--out", o.out, "output CSV (default stdout)");
        cmd->add_option("--svg", o.svg, "optional SVG chart of stddev vs target");
        cmd->add_option("--weights-out", o.weights_out, "JSON file with the optimal probe of every target");
    };
    ProblemOptions opt_o, sweep_o;
    opt_o.threads = sweep_o.threads = env_threads;
    auto* opt_cmd = app.add_subcommand("optimize", "Maximize the QFI at fixed entanglement");
    add_problem(opt_cmd, opt_o);
    auto* sweep_cmd = app.add_subcommand("sweep", "Warm-started optimization over a target grid");
    add_problem(sweep_cmd, sweep_o);

    SampleOptions samp;
    samp.threads = env_threads;
    auto* samp_cmd = app.add_subcommand("sample-gm", "Random-state GM binning with per-bin maximal QFI");
    samp_cmd->add_option("--nu", samp.nu, "number of random states")->capture_default_str();
    samp_cmd->add_option("--N", samp.parties)->capture_default_str();
    samp_cmd->add_option("--d", samp.d)->capture_default_str();
    samp_cmd->add_option("--bin-width", samp.bin_width)->capture_default_str();
    samp_cmd->add_option("--seed", samp.seed, "RNG seed (generated and printed if omitted)");
    samp_cmd->add_option("--threads", samp.threads, "worker threads (default QMETRIX_THREADS)");
    samp_cmd->add_option("--out", samp.out, "output CSV (default stdout)");
    samp_cmd->add_option("--compare", samp.compare, "compare two sample-gm CSV files instead of sampling")
        ->expected(2);
    samp_cmd->add_option("--rel-tol", samp.rel_tol, "relative tolerance for --compare")->capture_default_str();

    FitOptions fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a stddev curve family to a CSV");
    fit_cmd->add_option("--in", fit.in, "input CSV with a stddev column")->required();
    fit_cmd->add_option("--family", fit.family, "quadratic | rational")->capture_default_str();
    fit_cmd->add_option("--reading", fit.reading, "quadratic reading: inverse-sqrt | direct")->capture_default_str();
    fit_cmd->add_option("--x", fit.x_column, "abscissa column (default first column, gm_lo for sampler files)");
    fit_cmd->add_option("--out", fit.out, "output JSON (default stdout)");

    AcceptanceOptions acc;
    acc.threads = env_threads;
    auto* verify_cmd = app.add_subcommand("verify", "Run the acceptance suite");
    verify_cmd->add_option("--only", acc.only, "criterion ids to run")->delimiter(',');
    verify_cmd->add_option("--seed", acc.seed)->capture_default_str();
    verify_cmd->add_option("--nu-small", acc.nu_small)->capture_default_str();
    verify_cmd->add_option("--nu-large", acc.nu_large)->capture_default_str();
    verify_cmd->add_option("--threads", acc.threads, "worker threads (default QMETRIX_THREADS)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*law_cmd) return cmd_law(law);
        if (*opt_cmd) return cmd_optimize(opt_o, false);
        if (*sweep_cmd) return cmd_optimize(sweep_o, true);
        if (*samp_cmd) return cmd_sample(samp);
        if (*fit_cmd) return cmd_fit(fit);
        if (*verify_cmd) {
            const auto results = run_acceptance(acc, std::cout);
            int failed = 0;
            for (const auto& r : results) failed += r.passed ? 0 : 1;
            std::cout << results.size() - static_cast<std::size_t>(failed) << "/" << results.size() << " criteria passed\n";
            return failed == 0 ? 0 : 1;
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "qmetrix: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
