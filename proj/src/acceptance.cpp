#include "qmetrix/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>

#include "qmetrix/analytic_laws.hpp"
#include "qmetrix/fitting.hpp"
#include "qmetrix/gm_sampler.hpp"
#include "qmetrix/optimizer.hpp"
#include "qmetrix/rng.hpp"

namespace qmetrix {

namespace {

std::string fmt(const char* format, ...)
{
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

std::vector<double> grid(double lo, double step, int count)
{
    std::vector<double> v;
    for (int i = 0; i < count; ++i) v.push_back(lo + step * i);
    return v;
}

double off_corner_weight(const ProbeState& s)
{
    const int d = s.local_dim();
    double off = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const bool corner = (i == 0 || i == d - 1) && (j == 0 || j == d - 1);
            if (!corner) off += s.weight(static_cast<std::size_t>(i * d + j));
        }
    return off;
}

struct Context {
    const AcceptanceOptions& opt;

    EsConfig es(int restarts = 8, int generations = 300, int polish = 200000) const
    {
        EsConfig cfg;
        cfg.restarts = restarts;
        cfg.generations = generations;
        cfg.polish_max_evals = polish;
        cfg.seed = opt.seed;
        cfg.threads = opt.threads;
        return cfg;
    }
};

struct SweepCheck {
    double worst = 0.0;
    double worst_target = 0.0;
    bool all_converged = true;
    std::vector<SweepEntry> entries;
};

// Sweeps `targets` and compares each q_best with law(target).
SweepCheck sweep_against(const ConstrainedProblem& templ, const std::vector<double>& targets, const EsConfig& cfg,
                         const std::function<double(double)>& law, CriterionOutcome& out)
{
    SweepCheck check;
    check.entries = sweep(templ, targets, cfg);
    for (const auto& e : check.entries) {
        if (!e.result) {
            check.all_converged = false;
            check.worst = INFINITY;
            out.notes.push_back(fmt("target %.4f failed: %s", e.target, e.error.c_str()));
            continue;
        }
        const double expected = law(e.target);
        const double diff = std::abs(e.result->q_best - expected);
        check.all_converged = check.all_converged && e.result->converged;
        if (diff > check.worst) check.worst = diff, check.worst_target = e.target;
        out.notes.push_back(fmt("target %.4f q_best %.9f expected %.9f |dq| %.2e residual %.1e", e.target,
                                e.result->q_best, expected, diff, e.result->constraint_residual));
    }
    return check;
}

void criterion_ggm_law(const Context& ctx, CriterionOutcome& out)
{
    out.title = "two-qubit GGM law recovered by the optimizer";
    ConstrainedProblem p{make_generator(2, 2, SpectrumKind::PauliZ), Measure::GGM, 0.0};
    const auto targets = grid(0.0, 0.05, 11);
    auto check = sweep_against(p, targets, ctx.es(), q_opt_ggm, out);
    const double q0 = check.entries.front().result ? check.entries.front().result->q_best : NAN;
    const double q1 = check.entries.back().result ? check.entries.back().result->q_best : NAN;
    const bool endpoints = std::abs(q0 - 8.0) <= 1e-6 && std::abs(q1 - 16.0) <= 1e-6;
    out.passed = check.worst <= 1e-3 && endpoints;
    out.summary = fmt("max |dq| %.2e at G=%.2f (tol 1e-3); endpoints %.9f, %.9f (tol 1e-6)", check.worst,
                      check.worst_target, q0, q1);
}

void criterion_entropy_law(const Context& ctx, CriterionOutcome& out)
{
    out.title = "two-qubit entropy law recovered by the optimizer";
    ConstrainedProblem p{make_generator(2, 2, SpectrumKind::PauliZ), Measure::Entropy, 0.0};
    std::vector<double> targets = grid(0.0, 0.1, 11);
    targets.back() = 1.0;
    auto check = sweep_against(p, targets, ctx.es(), q_opt_entropy, out);
    out.passed = check.worst <= 1e-3;
    out.summary = fmt("max |dq| %.2e at S=%.1f (tol 1e-3)", check.worst, check.worst_target);
}

void criterion_qudits(const Context& ctx, CriterionOutcome& out)
{
    out.title = "qudit curves coincide with the qubit law and live on the corners";
    double worst = 0.0, worst_off = 0.0;
    for (int d : {3, 4, 5}) {
        ConstrainedProblem p{make_generator(2, d, SpectrumKind::SpinRescaled), Measure::GGM, 0.0};
        CriterionOutcome local;
        auto check = sweep_against(p, grid(0.0, 0.05, 11), ctx.es(4, 100), q_opt_ggm, local);
        for (auto& n : local.notes) out.notes.push_back(fmt("d=%d ", d) + n);
        worst = std::max(worst, check.worst);
        for (const auto& e : check.entries)
            if (e.result) worst_off = std::max(worst_off, off_corner_weight(e.result->best_weights));
    }
    out.passed = worst <= 1e-3 && worst_off < 1e-3;
    out.summary = fmt("max |dq| %.2e (tol 1e-3); max off-corner weight %.2e (tol 1e-3)", worst, worst_off);
}

void criterion_unequal(const Context& ctx, CriterionOutcome& out)
{
    out.title = "unequal-spacing qutrit spectrum (0,2,3)";
    double identity = 0.0;
    for (double g : grid(0.0, 0.005, 101)) identity = std::max(identity, std::abs(q_opt_unequal_d3(g) - 0.5625 * q_opt_ggm(g)));
    ConstrainedProblem p{make_generator(2, 3, SpectrumKind::Custom, std::vector<double>{0.0, 2.0, 3.0}), Measure::GGM, 0.0};
    auto check = sweep_against(p, grid(0.0, 0.05, 11), ctx.es(4, 100), q_opt_unequal_d3, out);
    double ratio_lo = INFINITY, ratio_hi = 0.0;
    for (const auto& e : check.entries) {
        if (!e.result) continue;
        const double r = e.result->q_best / q_opt_unequal_d3(e.target);
        ratio_lo = std::min(ratio_lo, r), ratio_hi = std::max(ratio_hi, r);
    }
    out.notes.push_back(fmt("optimizer / law ratio ranges over [%.6f, %.6f]", ratio_lo, ratio_hi));
    out.passed = check.worst <= 1e-3 && identity <= 1e-12;
    out.summary = fmt("max |dq| %.3g (tol 1e-3); analytic 0.5625 identity error %.1e", check.worst, identity);
}

void criterion_dominance(const Context&, CriterionOutcome& out)
{
    out.title = "boundary families and grid oracle stay below the law";
    bool strict = true;
    int compared = 0;
    for (int i = 0; i < 99; ++i) {
        const double g = 0.005 + 0.005 * i;
        const double law = q_opt_ggm(g);
        for (BoundaryCase c : kAllBoundaryCases) {
            double q;
            if (c == BoundaryCase::OffDiagonalZeroSplit) {
                // The split family reaches G only while w0 (1/2 - w0) = x^2 / 4 is solvable.
                const double u = 1.0 - 2.0 * g;
                const double x2 = 1.0 - u * u;
                if (x2 > 0.25) continue;
                q = boundary_qfi(0.5 * (0.5 - std::sqrt(0.25 - x2)), c);
            } else {
                q = boundary_qfi(g, c);
            }
            ++compared;
            if (!(q < law)) {
                strict = false;
                out.notes.push_back(fmt("%s at G=%.3f: %.9f >= %.9f", std::string(to_string(c)).c_str(), g, q, law));
            }
        }
    }
    ConstrainedProblem p{make_generator(2, 2, SpectrumKind::PauliZ), Measure::GGM, 0.0};
    double worst_excess = -INFINITY;
    bool within = true;
    for (double g : {0.0, 0.005, 0.055, 0.105, 0.155, 0.205, 0.25, 0.305, 0.355, 0.405, 0.455, 0.495, 0.5}) {
        p.target = g;
        const auto r = grid_oracle(p, 400);
        const double law = q_opt_ggm(g);
        const double bound = q_opt_ggm(std::min(0.5, g + kGridOracleRootTol)) - law + 1e-9;
        const double excess = r.q_max - law;
        worst_excess = std::max(worst_excess, excess);
        within = within && excess <= bound;
        out.notes.push_back(fmt("grid oracle G=%.3f q_max %.9f law %.9f excess %.2e bound %.2e", g, r.q_max, law,
                                excess, bound));
    }
    out.passed = strict && within;
    out.summary = fmt("%d boundary comparisons %s; grid oracle max excess %.2e %s", compared,
                      strict ? "strictly below" : "NOT all below", worst_excess, within ? "within bound" : "over bound");
}

void criterion_multipartite_endpoints(const Context& ctx, CriterionOutcome& out)
{
    out.title = "multipartite endpoints equal 4N and 4N^2";
    bool ok = true;
    for (int n : {3, 4, 5}) {
        ConstrainedProblem p{make_generator(n, 2, SpectrumKind::PauliZ), Measure::GGM, 0.0};
        for (double g : {0.0, 0.5}) {
            p.target = g;
            const auto r = maximize_qfi(p, ctx.es(4, 100));
            const double expected = g == 0.0 ? sql(n) : hl(n);
            const bool pass = std::abs(r.q_best - expected) <= 1e-2;
            ok = ok && pass;
            out.notes.push_back(fmt("N=%d G=%.1f q_best %.6f expected %.1f %s", n, g, r.q_best, expected,
                                    pass ? "ok" : "MISMATCH"));
        }
    }
    out.passed = ok;
    out.summary = ok ? "all six endpoints within 1e-2" : "some endpoints differ by more than 1e-2";
}

FitResult fit_sweep_rational(const std::vector<SweepEntry>& entries)
{
    std::vector<FitPoint> pts;
    for (const auto& e : entries)
        if (e.result) pts.push_back({e.target, cramer_rao_stddev(e.result->q_best)});
    return fit_rational(pts);
}

void criterion_multipartite_curve(const Context& ctx, CriterionOutcome& out)
{
    out.title = "three-qubit GGM curve: decreasing stddev and rational fit";
    ConstrainedProblem p{make_generator(3, 2, SpectrumKind::PauliZ), Measure::GGM, 0.0};
    const auto targets = grid(0.0, 0.05, 11);
    const auto entries = sweep(p, targets, ctx.es(4, 100));
    bool decreasing = true;
    double prev = INFINITY;
    for (const auto& e : entries) {
        if (!e.result) {
            decreasing = false;
            continue;
        }
        const double sd = cramer_rao_stddev(e.result->q_best);
        out.notes.push_back(fmt("G=%.2f q_best %.6f stddev %.6f", e.target, e.result->q_best, sd));
        decreasing = decreasing && sd < prev;
        prev = sd;
    }
    const auto fit = fit_sweep_rational(entries);
    double worst = 0.0;
    for (const auto& e : entries) {
        if (!e.result || e.target < 0.05 - 1e-12) continue;
        const double sd = cramer_rao_stddev(e.result->q_best);
        worst = std::max(worst, std::abs(fitted_stddev(fit, e.target) / sd - 1.0));
    }
    const double ref[] = {4.51, 36.48, 1.4, 0.07};
    for (int i = 0; i < 4; ++i) {
        const double rel = std::abs(fit.params[static_cast<std::size_t>(i)] / ref[i] - 1.0);
        out.notes.push_back(fmt("INFO fitted param %c = %.4f, reference %.4f, rel diff %.0f%% (%s at +-30%%)", "abcd"[i],
                                fit.params[static_cast<std::size_t>(i)], ref[i], 100.0 * rel,
                                rel <= 0.3 ? "inside" : "outside"));
    }
    out.passed = decreasing && worst < 0.02;
    out.summary = fmt("stddev %s; rational fit max stddev error %.2f%% on G in [0.05,0.5] (tol 2%%)",
                      decreasing ? "strictly decreasing" : "NOT strictly decreasing", 100.0 * worst);
}

void criterion_sampler(const Context& ctx, CriterionOutcome& out)
{
    out.title = "three-qubit GM sampler convergence";
    SamplerConfig small;
    small.samples = ctx.opt.nu_small;
    small.seed = derive_seed(ctx.opt.seed, {8, 1});
    small.threads = ctx.opt.threads;
    SamplerConfig large = small;
    large.samples = ctx.opt.nu_large;
    large.seed = derive_seed(ctx.opt.seed, {8, 2});
    const auto a = bin_and_maximize(small);
    const auto b = bin_and_maximize(large);
    const auto cmp = convergence_check(a, b, 0.05);
    bool converged = true, monotone = true;
    std::optional<double> prev;
    for (int k = 0; k <= 6 && k < static_cast<int>(cmp.bins.size()); ++k) {
        const auto& c = cmp.bins[static_cast<std::size_t>(k)];
        converged = converged && c.rel_diff && !c.exceeds;
        const auto& q = b.bins[static_cast<std::size_t>(k)].q_max;
        if (!q || (prev && *q < *prev)) monotone = false;
        if (q) prev = q;
        out.notes.push_back(fmt("k=%d q_max(nu=%llu) %.4f q_max(nu=%llu) %.4f rel diff %s", k,
                                static_cast<unsigned long long>(small.samples), c.q_a.value_or(NAN),
                                static_cast<unsigned long long>(large.samples), c.q_b.value_or(NAN),
                                c.rel_diff ? fmt("%.2f%%", 100.0 * *c.rel_diff).c_str() : "n/a"));
    }
    const double bin0 = b.bins.front().q_max.value_or(NAN);
    const bool sql_ok = std::abs(bin0 / sql(3) - 1.0) <= 0.05;
    out.passed = converged && monotone && sql_ok;
    out.summary = fmt("bins 0-6 %s within 5%%; q_max %s in k; bin-0 q_max %.4f vs 12 (%s)",
                      converged ? "agree" : "do NOT all agree", monotone ? "nondecreasing" : "NOT nondecreasing", bin0,
                      sql_ok ? "within 5%" : "outside 5%");
}

void criterion_beyond_hl(const Context& ctx, CriterionOutcome& out)
{
    out.title = "qutrit entropy beyond one e-bit";
    ConstrainedProblem p{make_generator(2, 3, SpectrumKind::SpinRescaled), Measure::Entropy, 0.0};
    const double top = std::log2(3.0);
    std::vector<double> targets = grid(1.05, 0.05, 11);
    targets.push_back(top);
    const auto entries = sweep(p, targets, ctx.es(4, 100));
    bool monotone = true;
    double prev = INFINITY;
    std::vector<FitPoint> pts;
    for (const auto& e : entries) {
        if (!e.result) {
            monotone = false;
            continue;
        }
        out.notes.push_back(fmt("S=%.4f q_best %.6f", e.target, e.result->q_best));
        monotone = monotone && e.result->q_best <= prev + 1e-3;
        prev = e.result->q_best;
        pts.push_back({e.target, cramer_rao_stddev(e.result->q_best)});
    }
    const double q_top = entries.back().result ? entries.back().result->q_best : NAN;
    const bool top_ok = std::abs(q_top - 32.0 / 3.0) <= 1e-2;
    const double ref[] = {0.028, -0.051, 0.274};
    for (QuadraticReading reading : {QuadraticReading::InverseSqrt, QuadraticReading::Direct}) {
        const auto fit = fit_quadratic(pts, reading);
        std::string line = fmt("INFO quadratic fit (%s reading):", std::string(to_string(reading)).c_str());
        for (int i = 0; i < 3; ++i) {
            const double v = fit.params[static_cast<std::size_t>(i)];
            line += fmt(" %c=%.4f (reference %.3f, %s)", "abc"[i], v, ref[i],
                        std::abs(v / ref[i] - 1.0) <= 0.3 ? "inside 30%" : "outside 30%");
        }
        out.notes.push_back(line);
    }
    out.passed = monotone && top_ok;
    out.summary = fmt("q_best %s; q at S=log2(3) %.6f vs 32/3 (tol 1e-2)",
                      monotone ? "nonincreasing" : "NOT nonincreasing", q_top);
}

void criterion_cross_validation(const Context& ctx, CriterionOutcome& out)
{
    out.title = "measure cross-validation on two qubits";
    auto rng = make_engine(ctx.opt.seed, {10});
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    double worst_closed = 0.0, worst_gm = 0.0;
    for (int i = 0; i < 10000; ++i) {
        std::vector<double> w(4);
        double total = 0.0;
        for (double& v : w) total += (v = uniform(rng));
        for (double& v : w) v /= total;
        const auto s = ProbeState::from_weights(2, 2, w);
        const double g = ggm(s).value;
        worst_closed = std::max(worst_closed, std::abs(g - ggm_two_qubit_closed(s.weights())));
        worst_gm = std::max(worst_gm, std::abs(gm(s).value.value - g));
    }
    double worst_entropy = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double g = 0.005 * i;
        const auto s = optimal_state_ggm(g, 2);
        worst_entropy = std::max(worst_entropy, std::abs(entropy_bipartite(s).value - binary_entropy(g)));
    }
    out.passed = worst_closed <= 1e-12 && worst_gm <= 1e-6 && worst_entropy <= 1e-9;
    out.summary = fmt("|ggm - closed| %.1e (tol 1e-12); |gm - ggm| %.1e (tol 1e-6); |S - h(G)| %.1e (tol 1e-9)",
                      worst_closed, worst_gm, worst_entropy);
}

}  // namespace

std::vector<CriterionOutcome> run_acceptance(const AcceptanceOptions& options, std::ostream& out)
{
    using Check = void (*)(const Context&, CriterionOutcome&);
    const Check checks[] = {criterion_ggm_law,
                            criterion_entropy_law,
                            criterion_qudits,
                            criterion_unequal,
                            criterion_dominance,
                            criterion_multipartite_endpoints,
                            criterion_multipartite_curve,
                            criterion_sampler,
                            criterion_beyond_hl,
                            criterion_cross_validation};
    const Context ctx{options};
    std::vector<CriterionOutcome> results;
    for (int id = 1; id <= 10; ++id) {
        if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), id) == options.only.end())
            continue;
        CriterionOutcome r{id, "", false, "", {}, 0.0};
        const auto t0 = std::chrono::steady_clock::now();
        try {
            checks[id - 1](ctx, r);
        } catch (const std::exception& e) {
            r.passed = false;
            r.summary = std::string("error: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (const auto& n : r.notes) out << "  " << n << "\n";
        out << "criterion " << id << " " << (r.passed ? "PASS" : "FAIL") << " " << r.title << ": " << r.summary
            << fmt(" [%.1fs]", r.seconds) << "\n";
        out.flush();
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace qmetrix
