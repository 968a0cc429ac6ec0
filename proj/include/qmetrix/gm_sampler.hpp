#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qmetrix/core_states.hpp"
#include "qmetrix/entanglement.hpp"

namespace qmetrix {

struct SamplerConfig {
    std::uint64_t samples = 100000;
    int parties = 3;
    int local_dim = 2;
    double bin_width = 0.05;
    std::uint64_t seed = 7;
    int threads = 1;
    /// States per RNG substream. Part of the reproducibility contract.
    std::uint64_t chunk_size = 4096;
    /// Cheap GM search applied to every state.
    GmSearchConfig screening{4, 100, 1e-12, 0x5eed};
    /// Full GM search for states that would become a bin maximum.
    GmSearchConfig escalation{};
};

/// Number of bins covering [0, 1/2]; throws unless bin_width divides it.
int bin_count(const SamplerConfig& cfg);

/// Throws std::invalid_argument for an unusable configuration.
void validate(const SamplerConfig& cfg);

struct BinReport {
    int k;
    double gm_lo;
    double gm_hi;
    std::uint64_t count = 0;
    std::optional<double> q_max;
    std::optional<ProbeState> argmax_weights;
    /// GM of the argmax state as used for binning.
    std::optional<double> argmax_gm;
};

struct SampleReport {
    SamplerConfig config;
    std::vector<BinReport> bins;
    /// States whose GM exceeds 1/2 (outside every bin).
    std::uint64_t out_of_range = 0;
};

/// Weights of chunk `chunk`: uniform [0,1] draws normalized to sum 1. The last
/// chunk may be short.
std::vector<ProbeState> sample_chunk(const SamplerConfig& cfg, std::uint64_t chunk);

/// All cfg.samples states in stream order (chunk by chunk). Intended for
/// moderate sample counts; bin_and_maximize streams instead.
std::vector<ProbeState> sample_states(const SamplerConfig& cfg);

/// Bins [k w - eps, (k+1) w + eps] containing `gm`, as an inclusive range.
/// Returns nullopt above the last bin.
std::optional<std::pair<int, int>> bins_for(double gm, double bin_width, int bins);

/// Generates, measures and bins cfg.samples states in constant memory and
/// keeps the QFI maximum (Pauli-Z generator) of each bin.
SampleReport bin_and_maximize(const SamplerConfig& cfg);

/// Folds an explicit list of states into bins (used for tests and replays).
SampleReport bin_states(const std::vector<ProbeState>& states, const SamplerConfig& cfg);

struct BinComparison {
    int k;
    std::optional<double> q_a;
    std::optional<double> q_b;
    /// |q_a - q_b| / max(|q_a|, |q_b|); absent if either bin is empty.
    std::optional<double> rel_diff;
    bool exceeds;
};

struct ConvergenceReport {
    std::vector<BinComparison> bins;
    double rel_tol;
};

/// Per-bin relative difference of q_max between two runs. The runs may differ
/// in seed and sample count; any other config difference throws.
ConvergenceReport convergence_check(const SampleReport& run_a, const SampleReport& run_b, double rel_tol);

}  // namespace qmetrix
