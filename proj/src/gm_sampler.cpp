#include "qmetrix/gm_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <random>
#include <stdexcept>
#include <string>

#include "qmetrix/parallel.hpp"
#include "qmetrix/rng.hpp"

namespace qmetrix {

namespace {

constexpr double kEdgeEps = 1e-12;

Generator sampler_generator(const SamplerConfig& cfg)
{
    return make_generator(cfg.parties, cfg.local_dim, cfg.local_dim == 2 ? SpectrumKind::PauliZ : SpectrumKind::SpinRescaled);
}

std::vector<BinReport> empty_bins(const SamplerConfig& cfg)
{
    const int k_count = bin_count(cfg);
    std::vector<BinReport> bins;
    bins.reserve(static_cast<std::size_t>(k_count));
    for (int k = 0; k < k_count; ++k) bins.push_back(BinReport{k, 0.5 * k / k_count, 0.5 * (k + 1) / k_count, 0, {}, {}, {}});
    return bins;
}

class BinAccumulator {
public:
    BinAccumulator(const SamplerConfig& cfg, const Generator& g)
        : cfg_(cfg), generator_(g), bins_(empty_bins(cfg))
    {
    }

    void add(const ProbeState& state)
    {
        const auto amps = state.amplitudes();
        double value = gm_from_amplitudes(amps, cfg_.parties, cfg_.local_dim, cfg_.screening).value.value;
        const double q = qfi(state, generator_);
        auto range = bins_for(value, cfg_.bin_width, static_cast<int>(bins_.size()));
        if (range && beats_any(*range, q)) {
            // The screening search can only overestimate GM; settle it before
            // the state is allowed to define a maximum.
            value = gm_from_amplitudes(amps, cfg_.parties, cfg_.local_dim, cfg_.escalation).value.value;
            range = bins_for(value, cfg_.bin_width, static_cast<int>(bins_.size()));
        }
        if (!range) {
            ++out_of_range_;
            return;
        }
        for (int k = range->first; k <= range->second; ++k) {
            auto& bin = bins_[static_cast<std::size_t>(k)];
            ++bin.count;
            if (!bin.q_max || q > *bin.q_max) {
                bin.q_max = q;
                bin.argmax_weights = state;
                bin.argmax_gm = value;
            }
        }
    }

    // Later parts lose ties, so merging in chunk order keeps the earliest state.
    void merge(const BinAccumulator& later)
    {
        out_of_range_ += later.out_of_range_;
        for (std::size_t k = 0; k < bins_.size(); ++k) {
            auto& mine = bins_[k];
            const auto& theirs = later.bins_[k];
            mine.count += theirs.count;
            if (theirs.q_max && (!mine.q_max || *theirs.q_max > *mine.q_max)) {
                mine.q_max = theirs.q_max;
                mine.argmax_weights = theirs.argmax_weights;
                mine.argmax_gm = theirs.argmax_gm;
            }
        }
    }

    SampleReport report() const { return SampleReport{cfg_, bins_, out_of_range_}; }

private:
    bool beats_any(std::pair<int, int> range, double q) const
    {
        for (int k = range.first; k <= range.second; ++k) {
            const auto& bin = bins_[static_cast<std::size_t>(k)];
            if (!bin.q_max || q > *bin.q_max) return true;
        }
        return false;
    }

    const SamplerConfig& cfg_;
    const Generator& generator_;
    std::vector<BinReport> bins_;
    std::uint64_t out_of_range_ = 0;
};

std::uint64_t chunk_count(const SamplerConfig& cfg)
{
    return (cfg.samples + cfg.chunk_size - 1) / cfg.chunk_size;
}

}  // namespace

int bin_count(const SamplerConfig& cfg)
{
    if (!(cfg.bin_width > 0.0) || cfg.bin_width > 0.5) throw std::invalid_argument("bin_width must lie in (0, 1/2]");
    const double ratio = 0.5 / cfg.bin_width;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * ratio)
        throw std::invalid_argument("bin_width must divide [0, 1/2] into a whole number of bins");
    return static_cast<int>(rounded);
}

void validate(const SamplerConfig& cfg)
{
    if (cfg.samples < 1) throw std::invalid_argument("samples must be >= 1");
    if (cfg.parties < 2) throw std::invalid_argument("GM sampling needs N >= 2");
    if (cfg.local_dim < 2) throw std::invalid_argument("local dimension must be >= 2");
    if (cfg.chunk_size < 1) throw std::invalid_argument("chunk_size must be >= 1");
    if (cfg.screening.restarts < 1 || cfg.escalation.restarts < 1)
        throw std::invalid_argument("GM searches need at least one restart");
    (void)basis_size(cfg.parties, cfg.local_dim);
    (void)bin_count(cfg);
}

std::vector<ProbeState> sample_chunk(const SamplerConfig& cfg, std::uint64_t chunk)
{
    const std::uint64_t first = chunk * cfg.chunk_size;
    if (first >= cfg.samples) return {};
    const std::uint64_t n = std::min(cfg.chunk_size, cfg.samples - first);
    const std::size_t dim = basis_size(cfg.parties, cfg.local_dim);
    auto rng = make_engine(cfg.seed, {chunk});
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<ProbeState> out;
    out.reserve(n);
    std::vector<double> w(dim);
    for (std::uint64_t i = 0; i < n; ++i) {
        double total = 0.0;
        for (double& v : w) total += (v = uniform(rng));
        for (double& v : w) v /= total;
        out.push_back(ProbeState::from_weights(cfg.parties, cfg.local_dim, w));
    }
    return out;
}

std::vector<ProbeState> sample_states(const SamplerConfig& cfg)
{
    validate(cfg);
    std::vector<ProbeState> out;
    out.reserve(cfg.samples);
    for (std::uint64_t c = 0; c < chunk_count(cfg); ++c) {
        auto part = sample_chunk(cfg, c);
        std::move(part.begin(), part.end(), std::back_inserter(out));
    }
    return out;
}

std::optional<std::pair<int, int>> bins_for(double gm, double bin_width, int bins)
{
    const int lo = std::max(0, static_cast<int>(std::ceil((gm - kEdgeEps) / bin_width)) - 1);
    const int hi = std::min(bins - 1, static_cast<int>(std::floor((gm + kEdgeEps) / bin_width)));
    if (lo > hi) return std::nullopt;
    return std::pair{lo, hi};
}

SampleReport bin_and_maximize(const SamplerConfig& cfg)
{
    validate(cfg);
    const Generator g = sampler_generator(cfg);
    const std::uint64_t chunks = chunk_count(cfg);
    // Chunks are processed in waves so memory stays bounded by the wave size
    // rather than the sample count.
    const std::uint64_t wave = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::max(1, cfg.threads)) * 4);
    BinAccumulator total(cfg, g);
    for (std::uint64_t base = 0; base < chunks; base += wave) {
        const std::uint64_t n = std::min(wave, chunks - base);
        std::vector<std::optional<BinAccumulator>> parts(n);
        parallel_for(n, cfg.threads, [&](std::size_t i) {
            BinAccumulator acc(cfg, g);
            for (const auto& state : sample_chunk(cfg, base + i)) acc.add(state);
            parts[i].emplace(std::move(acc));
        });
        for (const auto& part : parts) total.merge(*part);
    }
    return total.report();
}

SampleReport bin_states(const std::vector<ProbeState>& states, const SamplerConfig& cfg)
{
    (void)bin_count(cfg);
    const Generator g = sampler_generator(cfg);
    BinAccumulator acc(cfg, g);
    for (const auto& s : states) {
        if (s.parties() != cfg.parties || s.local_dim() != cfg.local_dim)
            throw std::invalid_argument("state shape does not match the sampler config");
        acc.add(s);
    }
    return acc.report();
}

ConvergenceReport convergence_check(const SampleReport& run_a, const SampleReport& run_b, double rel_tol)
{
    const auto& a = run_a.config;
    const auto& b = run_b.config;
    if (a.parties != b.parties || a.local_dim != b.local_dim || a.bin_width != b.bin_width
        || run_a.bins.size() != run_b.bins.size())
        throw std::invalid_argument("convergence check needs runs with the same N, d and bin width");
    if (!(rel_tol >= 0.0)) throw std::invalid_argument("rel_tol must be nonnegative");
    ConvergenceReport out{{}, rel_tol};
    for (std::size_t k = 0; k < run_a.bins.size(); ++k) {
        BinComparison c{static_cast<int>(k), run_a.bins[k].q_max, run_b.bins[k].q_max, std::nullopt, false};
        if (c.q_a && c.q_b) {
            const double scale = std::max(std::abs(*c.q_a), std::abs(*c.q_b));
            c.rel_diff = scale > 0.0 ? std::abs(*c.q_a - *c.q_b) / scale : 0.0;
            c.exceeds = *c.rel_diff > rel_tol;
        } else {
            c.exceeds = c.q_a.has_value() != c.q_b.has_value();
        }
        out.bins.push_back(c);
    }
    return out;
}

}  // namespace qmetrix
