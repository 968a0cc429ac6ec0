#include "qmetrix/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "qmetrix/parallel.hpp"
#include "qmetrix/rng.hpp"

namespace qmetrix {

std::string_view to_string(SearchSpace s)
{
    return s == SearchSpace::FullSimplex ? "full" : "corner";
}

SearchSpace search_space_from_string(std::string_view name)
{
    if (name == "full" || name == "FullSimplex") return SearchSpace::FullSimplex;
    if (name == "corner" || name == "CornerSimplex") return SearchSpace::CornerSimplex;
    throw std::invalid_argument("unknown search space '" + std::string(name) + "'");
}

std::pair<double, double> measure_range(const ConstrainedProblem& problem)
{
    const int d = problem.generator.local_dim();
    const bool corner = problem.search_space == SearchSpace::CornerSimplex;
    switch (problem.measure) {
    case Measure::GGM:
    case Measure::GM: return {0.0, corner ? 0.5 : (d - 1.0) / d};
    case Measure::Entropy: return {0.0, corner ? 1.0 : std::log2(static_cast<double>(d))};
    }
    throw std::invalid_argument("unknown measure");
}

void validate(const ConstrainedProblem& problem)
{
    const int parties = problem.generator.parties();
    if (parties < 2) throw std::invalid_argument("entanglement-constrained search needs N >= 2");
    if (problem.measure == Measure::GM && parties >= 3)
        throw std::invalid_argument("GM-constrained search for N >= 3 is done by the GM sampler, not the optimizer");
    if (problem.measure == Measure::Entropy && parties != 2)
        throw std::invalid_argument("entropy constraint is defined for N = 2 only");
    if (problem.search_space == SearchSpace::CornerSimplex && parties != 2)
        throw std::invalid_argument("corner search space requires N = 2");
    if (!(problem.constraint_tol > 0.0)) throw std::invalid_argument("constraint_tol must be positive");
    if (!std::isfinite(problem.target)) throw std::invalid_argument("target must be finite");
    const auto [lo, hi] = measure_range(problem);
    if (problem.target < lo - 1e-12 || problem.target > hi + 1e-12)
        throw std::invalid_argument("infeasible target " + std::to_string(problem.target) + " outside ["
                                    + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

double evaluate_measure(const ConstrainedProblem& problem, std::span<const double> amplitudes)
{
    const auto& g = problem.generator;
    switch (problem.measure) {
    case Measure::GGM:
    case Measure::GM: return ggm_from_amplitudes(amplitudes, g.parties(), g.local_dim());
    case Measure::Entropy: return entropy_from_amplitudes(amplitudes, g.local_dim());
    }
    throw std::invalid_argument("unknown measure");
}

void validate(const EsConfig& cfg)
{
    if (cfg.population != 0 && cfg.population < 8) throw std::invalid_argument("population must be >= 8");
    if (cfg.generations < 1) throw std::invalid_argument("generations must be >= 1");
    if (!(cfg.ranking_pressure > 0.0 && cfg.ranking_pressure < 0.5))
        throw std::invalid_argument("ranking pressure must lie in (0, 1/2)");
    if (cfg.restarts < 1) throw std::invalid_argument("restarts must be >= 1");
    for (double s : cfg.mutation_scales)
        if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("mutation scales must be positive");
    if (cfg.polish_max_evals < 0) throw std::invalid_argument("polish budget must be >= 0");
}

namespace {

// Residual the refinement drives the constraint to.
constexpr double kRepairTol = 1e-15;

// Owns the scratch buffers for one search thread. Candidates live on the
// support (all basis states, or the four corners) as nonnegative amplitudes.
class SearchContext {
public:
    explicit SearchContext(const ConstrainedProblem& problem)
        : problem_(problem), spectrum_(collective_spectrum(problem.generator).values)
    {
        const auto n = problem.generator.dimension();
        const auto d = static_cast<std::size_t>(problem.generator.local_dim());
        if (problem.search_space == SearchSpace::CornerSimplex) {
            const std::size_t top = d - 1;
            support_ = {0, top, top * d, top * d + top};
        } else {
            support_.resize(n);
            std::iota(support_.begin(), support_.end(), std::size_t{0});
        }
        full_.assign(n, 0.0);
        support_spectrum_.resize(support_.size());
        for (std::size_t i = 0; i < support_.size(); ++i) support_spectrum_[i] = spectrum_[support_[i]];

        low_anchor_.assign(support_.size(), 1.0);
        high_anchor_.assign(support_.size(), 0.0);
        if (problem.search_space == SearchSpace::CornerSimplex) {
            high_anchor_[0] = high_anchor_[3] = 1.0;
        } else {
            // Generalized GHZ: equal weight on |i i ... i>.
            for (std::size_t i = 0; i < d; ++i) {
                std::size_t p = 0;
                for (int k = 0; k < problem.generator.parties(); ++k) p = p * d + i;
                high_anchor_[p] = 1.0;
            }
        }
    }

    std::size_t dim() const { return support_.size(); }
    std::size_t evaluations() const { return evaluations_; }
    const std::vector<double>& low_anchor() const { return low_anchor_; }
    const std::vector<double>& high_anchor() const { return high_anchor_; }
    double target() const { return problem_.target; }

    double measure(std::span<const double> x)
    {
        ++evaluations_;
        for (std::size_t i = 0; i < support_.size(); ++i) full_[support_[i]] = x[i];
        return evaluate_measure(problem_, full_);
    }

    double qfi(std::span<const double> x) const
    {
        double norm = 0.0;
        for (double a : x) norm += a * a;
        std::vector<double> w(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) w[i] = x[i] * x[i] / norm;
        return 4.0 * variance(w, support_spectrum_);
    }

    // dQ/dx at a unit-norm x: 2 x_i (c_i - sum_j x_j^2 c_j), c_i = 4 (E_i^2 - 2 mu E_i).
    void qfi_gradient(std::span<const double> x, std::vector<double>& grad) const
    {
        double mu = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) mu += x[i] * x[i] * support_spectrum_[i];
        double mean_c = 0.0;
        grad.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double e = support_spectrum_[i];
            grad[i] = 4.0 * (e * e - 2.0 * mu * e);
            mean_c += x[i] * x[i] * grad[i];
        }
        for (std::size_t i = 0; i < x.size(); ++i) grad[i] = 2.0 * x[i] * (grad[i] - mean_c);
    }

    std::vector<double> full_weights(std::span<const double> x) const
    {
        double norm = 0.0;
        for (double a : x) norm += a * a;
        std::vector<double> w(full_.size(), 0.0);
        for (std::size_t i = 0; i < x.size(); ++i) w[support_[i]] = x[i] * x[i] / norm;
        return w;
    }

    std::vector<double> support_amplitudes(const std::vector<double>& full_weights) const
    {
        std::vector<double> x(support_.size());
        for (std::size_t i = 0; i < support_.size(); ++i) x[i] = std::sqrt(std::max(0.0, full_weights[support_[i]]));
        return x;
    }

private:
    const ConstrainedProblem& problem_;
    std::vector<double> spectrum_;
    std::vector<std::size_t> support_;
    std::vector<double> support_spectrum_;
    std::vector<double> full_;
    std::vector<double> low_anchor_;
    std::vector<double> high_anchor_;
    std::size_t evaluations_ = 0;
};

bool normalize(std::vector<double>& x)
{
    double norm = 0.0;
    for (double a : x) norm += a * a;
    if (!(norm > 0.0) || !std::isfinite(norm)) return false;
    const double inv = 1.0 / std::sqrt(norm);
    for (double& a : x) a *= inv;
    return true;
}

// Finite-difference gradient of the measure at x, where f = measure(x).
// Central differences are used away from the boundary so that tangent
// extrema of the constraint (e.g. G = 0) are resolved exactly.
void measure_gradient(SearchContext& ctx, const std::vector<double>& x, double f, std::vector<double>& grad)
{
    const double h = 1e-6;
    std::vector<double> probe = x;
    for (std::size_t j = 0; j < x.size(); ++j) {
        probe[j] = x[j] + h;
        const double fp = ctx.measure(probe);
        if (x[j] >= h) {
            probe[j] = x[j] - h;
            grad[j] = (fp - ctx.measure(probe)) / (2.0 * h);
        } else {
            grad[j] = (fp - f) / h;
        }
        probe[j] = x[j];
    }
}

// Gauss-Newton steps on (measure - target) with backtracking.
bool newton_project(SearchContext& ctx, std::vector<double>& x, int max_iter = 30)
{
    const std::size_t m = x.size();
    std::vector<double> grad(m), trial(m);
    double value = ctx.measure(x);
    double f = value - ctx.target();
    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(f) <= kRepairTol) return true;
        measure_gradient(ctx, x, value, grad);
        double g2 = 0.0;
        for (double g : grad) g2 += g * g;
        if (!(g2 > 1e-300)) return false;
        double scale = -f / g2;
        bool accepted = false;
        for (int half = 0; half < 12; ++half, scale *= 0.5) {
            for (std::size_t j = 0; j < m; ++j) trial[j] = std::max(0.0, x[j] + scale * grad[j]);
            if (!normalize(trial)) continue;
            const double vt = ctx.measure(trial);
            if (std::abs(vt - ctx.target()) < std::abs(f)) {
                x = trial;
                value = vt;
                f = vt - ctx.target();
                accepted = true;
                break;
            }
        }
        if (!accepted) return false;
    }
    return std::abs(f) <= kRepairTol;
}

// Moves x along the normalized segment towards a low- or high-entanglement
// anchor until the constraint holds; continuity of the measure guarantees a
// root whenever the anchor lies on the other side of the target.
bool anchor_repair(SearchContext& ctx, std::vector<double>& x)
{
    const double f0 = ctx.measure(x) - ctx.target();
    if (std::abs(f0) <= kRepairTol) return true;
    const auto& anchor = f0 > 0.0 ? ctx.low_anchor() : ctx.high_anchor();
    std::vector<double> a = anchor;
    normalize(a);
    auto point = [&](double t) {
        std::vector<double> p(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) p[i] = (1.0 - t) * x[i] + t * a[i];
        normalize(p);
        return p;
    };
    const double fa = ctx.measure(a) - ctx.target();
    if (std::abs(fa) > kRepairTol && (fa > 0.0) == (f0 > 0.0)) return false;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
        const double mid = 0.5 * (lo + hi);
        auto p = point(mid);
        const double fm = ctx.measure(p) - ctx.target();
        if (std::abs(fm) <= kRepairTol) {
            x = std::move(p);
            return true;
        }
        ((fm > 0.0) == (f0 > 0.0) ? lo : hi) = mid;
    }
    auto p = point(hi);
    if (std::abs(ctx.measure(p) - ctx.target()) <= kRepairTol) {
        x = std::move(p);
        return true;
    }
    return false;
}

bool repair(SearchContext& ctx, std::vector<double>& x)
{
    if (!normalize(x)) return false;
    std::vector<double> local = x;
    if (newton_project(ctx, local)) {
        x = std::move(local);
        return true;
    }
    return anchor_repair(ctx, x);
}

struct PolishOutcome {
    std::vector<double> x;
    double q;
    bool ok;
};

// Refines a point on the constraint surface in two phases: projected-gradient
// ascent of the QFI along the surface, then a compass search (coordinate and
// random directions) that can also switch on weights sitting at zero. Every
// trial point is repaired before comparison, so accepted points satisfy the
// constraint to kRepairTol.
PolishOutcome polish(SearchContext& ctx, std::vector<double> x, Engine& rng, int budget)
{
    if (!repair(ctx, x)) return {std::move(x), 0.0, false};
    double q = ctx.qfi(x);
    const std::size_t m = x.size();
    const std::size_t start_evals = ctx.evaluations();
    auto within_budget = [&] { return ctx.evaluations() - start_evals < static_cast<std::size_t>(budget); };
    auto improves = [&](double qt) { return qt > q + 1e-15 * std::max(1.0, q); };
    std::vector<double> dir(m), trial(m), gm(m), gq(m);

    double alpha = 0.05;
    for (int it = 0; it < 5000 && alpha > 1e-12 && within_budget(); ++it) {
        ctx.qfi_gradient(x, gq);
        measure_gradient(ctx, x, ctx.measure(x), gm);
        double gm2 = 0.0, dot = 0.0;
        for (std::size_t i = 0; i < m; ++i) gm2 += gm[i] * gm[i], dot += gq[i] * gm[i];
        const double coef = gm2 > 1e-300 ? dot / gm2 : 0.0;
        double norm = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            dir[i] = gq[i] - coef * gm[i];
            if (x[i] <= 0.0 && dir[i] < 0.0) dir[i] = 0.0;
            norm += dir[i] * dir[i];
        }
        norm = std::sqrt(norm);
        if (norm < 1e-14) break;
        for (std::size_t i = 0; i < m; ++i) trial[i] = std::max(0.0, x[i] + alpha * dir[i] / norm);
        double qt = -1.0;
        if (repair(ctx, trial)) qt = ctx.qfi(trial);
        if (qt >= 0.0 && improves(qt)) {
            x = trial;
            q = qt;
            alpha = std::min(0.2, 2.0 * alpha);
        } else {
            alpha *= 0.5;
        }
    }

    std::normal_distribution<double> normal;
    const std::size_t random_dirs = 4;
    double step = 0.02;
    while (step > 1e-9 && within_budget()) {
        bool improved = false;
        for (std::size_t k = 0; k < 2 * m + 2 * random_dirs; ++k) {
            if (k < 2 * m) {
                std::fill(dir.begin(), dir.end(), 0.0);
                dir[k / 2] = (k % 2 == 0) ? 1.0 : -1.0;
            } else if ((k - 2 * m) % 2 == 0) {
                for (double& v : dir) v = normal(rng);
                normalize(dir);
            } else {
                for (double& v : dir) v = -v;
            }
            for (std::size_t i = 0; i < m; ++i) trial[i] = std::max(0.0, x[i] + step * dir[i]);
            if (!repair(ctx, trial)) continue;
            const double qt = ctx.qfi(trial);
            if (improves(qt)) {
                x = trial;
                q = qt;
                improved = true;
            }
        }
        if (!improved) step *= 0.5;
    }
    return {std::move(x), q, true};
}

// Bernoulli draws with probability p, four per 64-bit engine output.
class CoinFlips {
public:
    CoinFlips(Engine& rng, double p) : rng_(rng), threshold_(static_cast<std::uint32_t>(std::lround(p * 65536.0))) {}

    bool operator()()
    {
        if (left_ == 0) {
            bits_ = rng_();
            left_ = 4;
        }
        const auto v = static_cast<std::uint32_t>(bits_ & 0xffffu);
        bits_ >>= 16;
        --left_;
        return v < threshold_;
    }

private:
    Engine& rng_;
    std::uint32_t threshold_;
    std::uint64_t bits_ = 0;
    int left_ = 0;
};

struct Individual {
    std::vector<double> x;
    std::vector<double> sigma;
    double objective = 0.0;  // -QFI
    double penalty = 0.0;    // squared violation beyond the band
    double measure = 0.0;
};

struct RestartOutcome {
    std::vector<double> x;
    double q = 0.0;
    double measure = 0.0;
    double residual = std::numeric_limits<double>::infinity();
    std::size_t evaluations = 0;
    std::size_t feasible_evaluations = 0;
};

// One stochastic-ranking evolution strategy run followed by the polish step.
RestartOutcome run_restart(const ConstrainedProblem& problem, const EsConfig& cfg, Engine& rng,
                           const std::vector<double>* warm)
{
    SearchContext ctx(problem);
    const std::size_t m = ctx.dim();
    const std::size_t lambda = cfg.population > 0 ? static_cast<std::size_t>(cfg.population) : 20 * (m + 1);
    const std::size_t mu = std::max<std::size_t>(2, lambda / 7);
    const double tau = 1.0 / std::sqrt(2.0 * std::sqrt(static_cast<double>(m)));
    const double tau_prime = 1.0 / std::sqrt(2.0 * static_cast<double>(m));
    const double alpha = 0.2;
    const double gamma = 0.85;
    const double target = problem.target;
    const double tol = problem.constraint_tol;

    std::vector<double> sigma0(m, 1.0 / std::sqrt(static_cast<double>(m)));
    if (!cfg.mutation_scales.empty()) {
        if (cfg.mutation_scales.size() == 1)
            std::fill(sigma0.begin(), sigma0.end(), cfg.mutation_scales[0]);
        else if (cfg.mutation_scales.size() == m)
            sigma0 = cfg.mutation_scales;
        else
            throw std::invalid_argument("mutation_scales must have 1 or dim entries");
    }

    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> normal;

    std::vector<Individual> pop(lambda);
    for (std::size_t k = 0; k < lambda; ++k) {
        pop[k].x.resize(m);
        for (double& v : pop[k].x) v = uniform(rng);
        pop[k].sigma = sigma0;
    }
    if (warm != nullptr) pop[0].x = *warm;

    RestartOutcome out;
    Individual best_feasible;
    bool have_feasible = false;
    Individual least_violating;
    bool have_any = false;

    auto evaluate = [&](Individual& ind) {
        double norm = 0.0;
        for (double v : ind.x) norm += v * v;
        ++out.evaluations;
        if (!(norm > 0.0)) {
            ind.objective = 0.0;
            ind.penalty = std::numeric_limits<double>::max();
            ind.measure = std::numeric_limits<double>::quiet_NaN();
            return;
        }
        ind.measure = ctx.measure(ind.x);
        ind.objective = -ctx.qfi(ind.x);
        const double violation = std::max(0.0, std::abs(ind.measure - target) - tol);
        ind.penalty = violation * violation;
        if (ind.penalty == 0.0) {
            ++out.feasible_evaluations;
            if (!have_feasible || ind.objective < best_feasible.objective) {
                best_feasible = ind;
                have_feasible = true;
            }
        }
        if (!have_any || ind.penalty < least_violating.penalty
            || (ind.penalty == least_violating.penalty && ind.objective < least_violating.objective)) {
            least_violating = ind;
            have_any = true;
        }
    };

    std::vector<std::size_t> order(lambda);
    std::vector<Individual> next(lambda);
    CoinFlips by_objective_coin(rng, cfg.ranking_pressure);
    for (int gen = 0; gen < cfg.generations; ++gen) {
        for (auto& ind : pop) evaluate(ind);

        // Stochastic ranking: bubble sort where neighbours are compared by
        // objective when both are feasible or with probability p_f, and by
        // penalty otherwise.
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t sweep = 0; sweep < lambda; ++sweep) {
            bool swapped = false;
            for (std::size_t j = 0; j + 1 < lambda; ++j) {
                const auto& a = pop[order[j]];
                const auto& b = pop[order[j + 1]];
                const bool by_objective = (a.penalty == 0.0 && b.penalty == 0.0) || by_objective_coin();
                const bool out_of_order = by_objective ? a.objective > b.objective : a.penalty > b.penalty;
                if (out_of_order) {
                    std::swap(order[j], order[j + 1]);
                    swapped = true;
                }
            }
            if (!swapped) break;
        }

        for (std::size_t k = 0; k < lambda; ++k) {
            const std::size_t i = k % mu;
            const Individual& parent = pop[order[i]];
            Individual& child = next[k];
            child.x.resize(m);
            child.sigma.resize(m);
            if (k + 1 < mu) {
                // Differential variation towards the best parent.
                const Individual& best = pop[order[0]];
                const Individual& follower = pop[order[i + 1]];
                for (std::size_t j = 0; j < m; ++j) {
                    child.x[j] = std::clamp(parent.x[j] + gamma * (best.x[j] - follower.x[j]), 0.0, 1.0);
                    child.sigma[j] = parent.sigma[j];
                }
            } else {
                const double global = tau_prime * normal(rng);
                for (std::size_t j = 0; j < m; ++j) {
                    const double s = std::min(1.0, parent.sigma[j] * std::exp(global + tau * normal(rng)));
                    double value = parent.x[j];
                    for (int attempt = 0; attempt < 10; ++attempt) {
                        const double candidate = parent.x[j] + s * normal(rng);
                        if (candidate >= 0.0 && candidate <= 1.0) {
                            value = candidate;
                            break;
                        }
                        if (attempt == 9) value = std::clamp(candidate, 0.0, 1.0);
                    }
                    child.x[j] = value;
                    child.sigma[j] = parent.sigma[j] + alpha * (s - parent.sigma[j]);
                }
            }
        }
        std::swap(pop, next);
    }

    const Individual& start = have_feasible ? best_feasible : least_violating;
    out.x = start.x;
    out.q = -start.objective;
    out.measure = start.measure;
    out.residual = std::abs(start.measure - target);
    normalize(out.x);

    if (cfg.polish && cfg.polish_max_evals > 0) {
        auto polished = polish(ctx, out.x, rng, cfg.polish_max_evals);
        if (polished.ok) {
            out.x = std::move(polished.x);
            out.q = polished.q;
            out.measure = ctx.measure(out.x);
            out.residual = std::abs(out.measure - target);
        }
    }
    return out;
}

}  // namespace

OptimizationResult maximize_qfi(const ConstrainedProblem& problem, const EsConfig& cfg,
                                std::optional<std::vector<double>> warm_start, std::uint64_t stream)
{
    validate(problem);
    validate(cfg);

    std::optional<std::vector<double>> warm_x;
    if (warm_start) {
        if (warm_start->size() != problem.generator.dimension())
            throw std::invalid_argument("warm start has the wrong dimension");
        SearchContext ctx(problem);
        auto x = ctx.support_amplitudes(*warm_start);
        if (normalize(x)) warm_x = std::move(x);
    }

    const auto restarts = static_cast<std::size_t>(cfg.restarts);
    std::vector<RestartOutcome> outcomes(restarts);
    parallel_for(restarts, cfg.threads, [&](std::size_t r) {
        auto rng = make_engine(cfg.seed, {stream, static_cast<std::uint64_t>(r)});
        outcomes[r] = run_restart(problem, cfg, rng, (r == 0 && warm_x) ? &*warm_x : nullptr);
    });

    std::size_t best = 0;
    auto feasible = [&](const RestartOutcome& o) { return o.residual <= problem.constraint_tol; };
    for (std::size_t r = 1; r < restarts; ++r) {
        const auto& a = outcomes[r];
        const auto& b = outcomes[best];
        if (feasible(a) != feasible(b)) {
            if (feasible(a)) best = r;
        } else if (feasible(a) ? a.q > b.q : a.residual < b.residual) {
            best = r;
        }
    }

    std::size_t evals = 0, feasible_evals = 0;
    for (const auto& o : outcomes) {
        evals += o.evaluations;
        feasible_evals += o.feasible_evaluations;
    }

    SearchContext ctx(problem);
    const auto& winner = outcomes[best];
    auto weights = ctx.full_weights(winner.x);
    auto state = ProbeState::from_weights(problem.generator.parties(), problem.generator.local_dim(), std::move(weights));
    const double q = qfi(state, problem.generator);
    return OptimizationResult{
        std::move(state),
        q,
        winner.measure,
        winner.residual,
        cfg.generations,
        evals > 0 ? static_cast<double>(feasible_evals) / static_cast<double>(evals) : 0.0,
        cfg.seed,
        feasible(winner),
        static_cast<int>(best),
    };
}

namespace {

double golden_min_abs(const std::function<double(double)>& f, double a, double b, double& t_best)
{
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double fc = std::abs(f(c));
    double fd = std::abs(f(d));
    for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = std::abs(f(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = std::abs(f(d));
        }
    }
    t_best = fc < fd ? c : d;
    return std::min(fc, fd);
}

}  // namespace

GridOracleResult grid_oracle(const ConstrainedProblem& problem, int resolution)
{
    validate(problem);
    if (resolution < 2) throw std::invalid_argument("grid resolution must be >= 2");
    SearchContext ctx(problem);
    if (ctx.dim() != 4)
        throw std::invalid_argument("grid oracle scans four-weight problems only (two qubits or the corner simplex)");

    GridOracleResult best{-1.0, {}, std::numeric_limits<double>::infinity(), 0};
    const int samples = 64;
    std::vector<double> x(4);
    std::vector<double> f(samples + 1);

    for (int i = 0; i <= resolution; ++i) {
        for (int j = 0; i + j <= resolution; ++j) {
            const double w0 = static_cast<double>(i) / resolution;
            const double w1 = static_cast<double>(j) / resolution;
            const double rest = static_cast<double>(resolution - i - j) / resolution;
            // Segment w2 = rest * t, w3 = rest * (1 - t). Along it the
            // coherence sqrt(w1 w2) - sqrt(w0 w3) is monotone, so the roots are
            // transversal and the scan error is second order in the spacing.
            auto residual = [&](double t) {
                x = {std::sqrt(w0), std::sqrt(w1), std::sqrt(rest * t), std::sqrt(rest * (1.0 - t))};
                return ctx.measure(x) - problem.target;
            };
            auto accept = [&](double t) {
                const double r = std::abs(residual(t));
                if (r > kGridOracleRootTol) return;
                ++best.feasible_points;
                const double q = ctx.qfi(x);
                if (q > best.q_max) {
                    best.q_max = q;
                    best.weights = {w0, w1, rest * t, rest * (1.0 - t)};
                    best.residual = r;
                }
            };
            if (rest == 0.0) {
                accept(0.5);
                continue;
            }
            for (int k = 0; k <= samples; ++k) f[static_cast<std::size_t>(k)] = residual(static_cast<double>(k) / samples);
            for (int k = 0; k <= samples; ++k) {
                const auto ku = static_cast<std::size_t>(k);
                const double tk = static_cast<double>(k) / samples;
                if (std::abs(f[ku]) <= kGridOracleRootTol) {
                    accept(tk);
                    continue;
                }
                if (k < samples && (f[ku] > 0.0) != (f[ku + 1] > 0.0) && std::abs(f[ku + 1]) > kGridOracleRootTol) {
                    double lo = tk, hi = static_cast<double>(k + 1) / samples;
                    const bool lo_positive = f[ku] > 0.0;
                    for (int it = 0; it < 100 && hi - lo > 1e-17; ++it) {
                        const double mid = 0.5 * (lo + hi);
                        const double fm = residual(mid);
                        if (std::abs(fm) <= kGridOracleRootTol * 1e-3) {
                            lo = hi = mid;
                            break;
                        }
                        ((fm > 0.0) == lo_positive ? lo : hi) = mid;
                    }
                    accept(0.5 * (lo + hi));
                }
                // Tangential roots (e.g. G = 0, S = 1) show up as local minima
                // of |f| without a sign change.
                const bool left_lower = k > 0 && std::abs(f[ku - 1]) < std::abs(f[ku]);
                const bool right_lower = k < samples && std::abs(f[ku + 1]) < std::abs(f[ku]);
                const bool sign_left = k > 0 && (f[ku - 1] > 0.0) != (f[ku] > 0.0);
                const bool sign_right = k < samples && (f[ku + 1] > 0.0) != (f[ku] > 0.0);
                if (!left_lower && !right_lower && !sign_left && !sign_right) {
                    const double a = static_cast<double>(std::max(k - 1, 0)) / samples;
                    const double b = static_cast<double>(std::min(k + 1, samples)) / samples;
                    double t_best = tk;
                    if (golden_min_abs(residual, a, b, t_best) <= kGridOracleRootTol) accept(t_best);
                }
            }
        }
    }
    if (best.feasible_points == 0) throw std::runtime_error("grid oracle found no feasible grid point");
    return best;
}

std::vector<SweepEntry> sweep(const ConstrainedProblem& problem_template, std::span<const double> targets,
                              const EsConfig& cfg)
{
    std::vector<SweepEntry> out;
    out.reserve(targets.size());
    std::optional<std::vector<double>> warm;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        ConstrainedProblem problem = problem_template;
        problem.target = targets[i];
        SweepEntry entry{targets[i], std::nullopt, {}};
        try {
            auto result = maximize_qfi(problem, cfg, warm, static_cast<std::uint64_t>(i));
            const auto w = result.best_weights.weights();
            warm = std::vector<double>(w.begin(), w.end());
            entry.result = std::move(result);
        } catch (const std::exception& e) {
            entry.error = e.what();
        }
        out.push_back(std::move(entry));
    }
    return out;
}

}  // namespace qmetrix
