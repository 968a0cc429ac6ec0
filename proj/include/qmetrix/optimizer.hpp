#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qmetrix/core_states.hpp"
#include "qmetrix/entanglement.hpp"

namespace qmetrix {

enum class SearchSpace {
    /// All d^N basis weights are free.
    FullSimplex,
    /// Only the four corner states (0,0), (0,d-1), (d-1,0), (d-1,d-1); N = 2.
    CornerSimplex,
};

std::string_view to_string(SearchSpace s);
SearchSpace search_space_from_string(std::string_view name);

struct ConstrainedProblem {
    Generator generator;
    Measure measure;
    double target;
    double constraint_tol = 1e-6;
    SearchSpace search_space = SearchSpace::FullSimplex;
};

/// Closed range of values the measure can take on the problem's search space.
std::pair<double, double> measure_range(const ConstrainedProblem& problem);

/// Throws std::invalid_argument for unsupported combinations or an
/// out-of-range target.
void validate(const ConstrainedProblem& problem);

/// Measure value of a full-length (d^N) amplitude vector under the problem's
/// measure. For N = 2 the geometric measure equals the GGM and is evaluated
/// through it.
double evaluate_measure(const ConstrainedProblem& problem, std::span<const double> amplitudes);

struct EsConfig {
    /// Offspring per generation; 0 selects 20 (dim + 1).
    int population = 0;
    int generations = 300;
    /// Probability of comparing by objective between infeasible neighbours.
    double ranking_pressure = 0.45;
    /// Initial per-coordinate step sizes; empty selects 1/sqrt(dim).
    std::vector<double> mutation_scales;
    int restarts = 8;
    std::uint64_t seed = 1;
    /// Local refinement of each restart's best point onto the exact constraint.
    bool polish = true;
    int polish_max_evals = 60000;
    int threads = 1;
};

/// Throws std::invalid_argument when the configuration is unusable.
void validate(const EsConfig& cfg);

struct OptimizationResult {
    ProbeState best_weights;
    double q_best;
    double measure_value;
    double constraint_residual;
    int generations;
    double feasible_fraction;
    std::uint64_t seed;
    bool converged;
    int best_restart;
};

/// Maximizes the QFI over probe weights at fixed entanglement with a
/// stochastic-ranking evolution strategy, one independent run per restart.
///
/// Candidates are nonnegative amplitudes x in [0,1]^m mapped to weights
/// x^2 / sum x^2, so only the entanglement equality is left as a constraint;
/// it is treated as the band |measure - target| <= constraint_tol. Each
/// restart's best point is then refined by a pattern search whose trial points
/// are pulled back onto the constraint surface.
///
/// `warm_start` (weights on the full basis) seeds one individual of the first
/// restart. `stream` separates RNG streams of different sweep targets.
/// Infeasible targets throw; a search that finds no feasible point returns the
/// least-violating candidate with converged = false.
OptimizationResult maximize_qfi(const ConstrainedProblem& problem, const EsConfig& cfg,
                                std::optional<std::vector<double>> warm_start = std::nullopt,
                                std::uint64_t stream = 0);

/// Largest constraint residual the grid oracle accepts as a root.
inline constexpr double kGridOracleRootTol = 1e-12;

struct GridOracleResult {
    double q_max;
    std::vector<double> weights;
    double residual;
    std::size_t feasible_points;
};

/// Brute-force reference for four-weight problems (two qubits, or the corner
/// simplex of two qudits). Scans (w0, w1) on a grid of step 1/resolution and,
/// on each remaining segment w2 + w3 = 1 - w0 - w1, solves the constraint
/// exactly; returns the best QFI among the roots.
GridOracleResult grid_oracle(const ConstrainedProblem& problem, int resolution);

struct SweepEntry {
    double target;
    std::optional<OptimizationResult> result;
    std::string error;
};

/// Runs maximize_qfi for every target in order. Each search is warm-started
/// from the previous target's best weights; target i uses RNG stream i.
/// A failing target is recorded and the sweep continues.
std::vector<SweepEntry> sweep(const ConstrainedProblem& problem_template, std::span<const double> targets,
                              const EsConfig& cfg);

}  // namespace qmetrix
