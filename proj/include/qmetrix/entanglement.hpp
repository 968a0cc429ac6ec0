#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "qmetrix/core_states.hpp"

namespace qmetrix {

enum class Measure { GGM, Entropy, GM };

std::string_view to_string(Measure m);
Measure measure_from_string(std::string_view name);

struct EntanglementValue {
    Measure measure;
    double value;
};

/// One bipartition A:B, A given by its sorted party indices (always contains
/// party 0), and the largest eigenvalue of the reduced state across that cut.
struct BipartitionReport {
    std::vector<int> partition;
    double max_schmidt_sq;
};

struct GgmReport {
    EntanglementValue value;
    BipartitionReport achieving;
};

/// All 2^(N-1) - 1 bipartitions, as the side containing party 0, in
/// lexicographic order of the sorted index lists.
std::vector<std::vector<int>> bipartitions(int parties);

/// Largest squared Schmidt coefficient of a real amplitude vector across the
/// cut `side_a` : rest.
double max_schmidt_sq(std::span<const double> amplitudes, int parties, int local_dim, std::span<const int> side_a);

/// Eigenvalues of the reduced state of side_a (length min(d^|A|, d^|B|)).
std::vector<double> reduced_spectrum(std::span<const double> amplitudes, int parties, int local_dim,
                                     std::span<const int> side_a);

/// 1 - max over bipartitions of the largest reduced eigenvalue, from amplitudes.
double ggm_from_amplitudes(std::span<const double> amplitudes, int parties, int local_dim);

/// Generalized geometric measure. Requires N >= 2; ties between bipartitions
/// resolve to the lexicographically first one.
EntanglementValue ggm(const ProbeState& state);
GgmReport ggm_report(const ProbeState& state);

/// Closed-form GGM of the two-qubit phaseless state with weights (w0, w1, w2, w3):
/// (1 - sqrt(1 - 4 (sqrt(w1 w2) - sqrt(w0 w3))^2)) / 2.
double ggm_two_qubit_closed(std::span<const double> weights);

/// Base-2 entanglement entropy of a bipartite (N = 2) probe.
EntanglementValue entropy_bipartite(const ProbeState& state);
double entropy_from_amplitudes(std::span<const double> amplitudes, int local_dim);

/// -p log2 p - (1-p) log2 (1-p), with 0 log 0 = 0.
double binary_entropy(double p);

struct GmSearchConfig {
    int restarts = 32;
    int max_sweeps = 500;
    double tol = 1e-12;
    std::uint64_t seed = 0x5eed;
};

struct GmResult {
    EntanglementValue value;
    /// max |<phi|psi>|^2 over the product states visited.
    double max_overlap;
    /// Unit local vectors of the best product state, one per party.
    std::vector<std::vector<double>> factors;
    int best_restart;
    /// False when the best restart used up max_sweeps without meeting tol.
    bool converged;
};

/// Geometric measure: 1 - max overlap with a fully product state, found by
/// alternating single-party updates from `restarts` random real starts.
GmResult gm(const ProbeState& state, const GmSearchConfig& cfg = {});
GmResult gm_from_amplitudes(std::span<const double> amplitudes, int parties, int local_dim,
                            const GmSearchConfig& cfg);

/// One alternating run from explicit starting factors. Returns the squared
/// overlap after every sweep; the sequence is nondecreasing.
std::vector<double> gm_alternating_trace(std::span<const double> amplitudes, int parties, int local_dim,
                                         std::vector<std::vector<double>> factors, int max_sweeps, double tol);

}  // namespace qmetrix
