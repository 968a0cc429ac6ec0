#include "qmetrix/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>

#include <Eigen/Dense>

#include "qmetrix/rng.hpp"

namespace qmetrix {

std::string_view to_string(Measure m)
{
    switch (m) {
    case Measure::GGM: return "ggm";
    case Measure::Entropy: return "entropy";
    case Measure::GM: return "gm";
    }
    return "unknown";
}

Measure measure_from_string(std::string_view name)
{
    if (name == "ggm" || name == "GGM") return Measure::GGM;
    if (name == "entropy" || name == "Entropy" || name == "S") return Measure::Entropy;
    if (name == "gm" || name == "GM") return Measure::GM;
    throw std::invalid_argument("unknown entanglement measure '" + std::string(name) + "'");
}

namespace {

// Row/column position of every basis index once the amplitude vector is
// reshaped into a (side A) x (side B) matrix.
struct CutLayout {
    std::vector<std::size_t> row;
    std::vector<std::size_t> col;
    std::size_t rows = 1;
    std::size_t cols = 1;
};

unsigned side_mask(std::span<const int> side_a, int parties)
{
    unsigned mask = 0;
    for (int k : side_a) {
        if (k < 0 || k >= parties) throw std::invalid_argument("bipartition party index out of range");
        mask |= 1u << k;
    }
    if (mask == 0 || mask == (1u << parties) - 1)
        throw std::invalid_argument("bipartition sides must both be nonempty");
    return mask;
}

const CutLayout& cut_layout(int parties, int local_dim, unsigned mask)
{
    thread_local std::map<std::tuple<int, int, unsigned>, CutLayout> cache;
    const auto key = std::make_tuple(parties, local_dim, mask);
    if (auto it = cache.find(key); it != cache.end()) return it->second;

    const std::size_t n = basis_size(parties, local_dim);
    const auto d = static_cast<std::size_t>(local_dim);
    CutLayout layout;
    layout.row.resize(n);
    layout.col.resize(n);
    for (int k = 0; k < parties; ++k) ((mask >> k) & 1u ? layout.rows : layout.cols) *= d;
    for (std::size_t p = 0; p < n; ++p) {
        std::size_t r = 0, c = 0, rem = p;
        std::size_t digits[32];
        for (int k = parties - 1; k >= 0; --k) {
            digits[k] = rem % d;
            rem /= d;
        }
        for (int k = 0; k < parties; ++k) {
            if ((mask >> k) & 1u)
                r = r * d + digits[k];
            else
                c = c * d + digits[k];
        }
        layout.row[p] = r;
        layout.col[p] = c;
    }
    return cache.emplace(key, std::move(layout)).first->second;
}

// Gram matrix of the smaller side; its eigenvalues are the squared Schmidt
// coefficients across the cut.
Eigen::MatrixXd reduced_gram(std::span<const double> amplitudes, int parties, int local_dim, unsigned mask)
{
    const auto& layout = cut_layout(parties, local_dim, mask);
    if (amplitudes.size() != layout.row.size()) throw std::invalid_argument("amplitude vector has wrong length");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(layout.rows),
                                              static_cast<Eigen::Index>(layout.cols));
    for (std::size_t p = 0; p < amplitudes.size(); ++p)
        m(static_cast<Eigen::Index>(layout.row[p]), static_cast<Eigen::Index>(layout.col[p])) = amplitudes[p];
    if (layout.rows <= layout.cols) return m * m.transpose();
    return m.transpose() * m;
}

double largest_eigenvalue(const Eigen::MatrixXd& g)
{
    if (g.rows() == 1) return g(0, 0);
    if (g.rows() == 2) {
        const double mid = 0.5 * (g(0, 0) + g(1, 1));
        const double half = 0.5 * (g(0, 0) - g(1, 1));
        return mid + std::hypot(half, g(0, 1));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().maxCoeff();
}

double norm_sq(std::span<const double> a)
{
    double s = 0.0;
    for (double x : a) s += x * x;
    return s;
}

void require_bipartite_probe(const ProbeState& state)
{
    if (state.parties() < 2) throw std::invalid_argument("entanglement needs at least two parties");
}

}  // namespace

std::vector<std::vector<int>> bipartitions(int parties)
{
    if (parties < 2) throw std::invalid_argument("bipartitions need at least two parties");
    if (parties > 20) throw std::invalid_argument("too many parties for bipartition enumeration");
    std::vector<std::vector<int>> out;
    const unsigned full = (1u << parties) - 1;
    for (unsigned mask = 1; mask < full; mask += 2) {
        std::vector<int> side;
        for (int k = 0; k < parties; ++k)
            if ((mask >> k) & 1u) side.push_back(k);
        out.push_back(std::move(side));
    }
    std::sort(out.begin(), out.end());
    return out;
}

double max_schmidt_sq(std::span<const double> amplitudes, int parties, int local_dim, std::span<const int> side_a)
{
    const unsigned mask = side_mask(side_a, parties);
    return largest_eigenvalue(reduced_gram(amplitudes, parties, local_dim, mask)) / norm_sq(amplitudes);
}

std::vector<double> reduced_spectrum(std::span<const double> amplitudes, int parties, int local_dim,
                                     std::span<const int> side_a)
{
    const unsigned mask = side_mask(side_a, parties);
    const Eigen::MatrixXd g = reduced_gram(amplitudes, parties, local_dim, mask) / norm_sq(amplitudes);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g, Eigen::EigenvaluesOnly);
    std::vector<double> eig(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
    for (double& e : eig) e = std::clamp(e, 0.0, 1.0);
    return eig;
}

namespace {

struct CutMaximum {
    double value = -1.0;
    std::size_t index = 0;
};

// Tie tolerance: values this close count as equal, so the earlier (lexicographic)
// bipartition is kept.
constexpr double kTieTolerance = 1e-13;

CutMaximum max_over_cuts(std::span<const double> amplitudes, int parties, int local_dim,
                         const std::vector<std::vector<int>>& cuts)
{
    const double norm = norm_sq(amplitudes);
    if (!(norm > 0.0)) throw std::invalid_argument("amplitude vector is zero");
    CutMaximum best;
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        const double v = largest_eigenvalue(reduced_gram(amplitudes, parties, local_dim, side_mask(cuts[i], parties))) / norm;
        if (v > best.value + kTieTolerance) best = {v, i};
    }
    best.value = std::clamp(best.value, 0.0, 1.0);
    return best;
}

const std::vector<std::vector<int>>& cached_bipartitions(int parties)
{
    thread_local std::map<int, std::vector<std::vector<int>>> cache;
    auto it = cache.find(parties);
    if (it == cache.end()) it = cache.emplace(parties, bipartitions(parties)).first;
    return it->second;
}

}  // namespace

double ggm_from_amplitudes(std::span<const double> amplitudes, int parties, int local_dim)
{
    const auto best = max_over_cuts(amplitudes, parties, local_dim, cached_bipartitions(parties));
    return std::max(0.0, 1.0 - best.value);
}

GgmReport ggm_report(const ProbeState& state)
{
    require_bipartite_probe(state);
    const auto& cuts = cached_bipartitions(state.parties());
    const auto amps = state.amplitudes();
    const auto best = max_over_cuts(amps, state.parties(), state.local_dim(), cuts);
    return {{Measure::GGM, std::max(0.0, 1.0 - best.value)}, {cuts[best.index], best.value}};
}

EntanglementValue ggm(const ProbeState& state)
{
    require_bipartite_probe(state);
    const auto amps = state.amplitudes();
    return {Measure::GGM, ggm_from_amplitudes(amps, state.parties(), state.local_dim())};
}

double ggm_two_qubit_closed(std::span<const double> weights)
{
    if (weights.size() != 4) throw std::invalid_argument("two-qubit closed form needs 4 weights");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("weights must be nonnegative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > ProbeState::kRenormalizeLimit)
        throw std::invalid_argument("weights must sum to 1");
    const double det = std::sqrt(weights[1] * weights[2]) - std::sqrt(weights[0] * weights[3]);
    return 0.5 * (1.0 - std::sqrt(std::max(0.0, 1.0 - 4.0 * det * det)));
}

double binary_entropy(double p)
{
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("binary entropy needs p in [0, 1]");
    auto term = [](double x) { return x > 0.0 ? -x * std::log2(x) : 0.0; };
    return term(p) + term(1.0 - p);
}

double entropy_from_amplitudes(std::span<const double> amplitudes, int local_dim)
{
    static constexpr int side[] = {0};
    const auto eig = reduced_spectrum(amplitudes, 2, local_dim, side);
    double s = 0.0;
    for (double e : eig)
        if (e > 0.0) s -= e * std::log2(e);
    return std::max(0.0, s);
}

EntanglementValue entropy_bipartite(const ProbeState& state)
{
    if (state.parties() != 2) throw std::invalid_argument("entanglement entropy is defined here for N = 2 only");
    const auto amps = state.amplitudes();
    return {Measure::Entropy, entropy_from_amplitudes(amps, state.local_dim())};
}

namespace {

// Digits of every basis index, party-major: digits[p * N + k].
std::vector<std::size_t> digit_table(std::size_t n, int parties, std::size_t d)
{
    std::vector<std::size_t> digits(n * static_cast<std::size_t>(parties));
    for (std::size_t p = 0; p < n; ++p) {
        std::size_t rem = p;
        for (int k = parties - 1; k >= 0; --k) {
            digits[p * static_cast<std::size_t>(parties) + static_cast<std::size_t>(k)] = rem % d;
            rem /= d;
        }
    }
    return digits;
}

struct AlternatingRun {
    double overlap = 0.0;
    bool converged = false;
};

// Alternating maximization of <phi|psi> over product states. Normalized
// amplitudes in, factors updated in place.
AlternatingRun alternate(std::span<const double> amps, int parties, std::size_t d,
                         const std::vector<std::size_t>& digits, std::vector<std::vector<double>>& factors,
                         int max_sweeps, double tol, Engine* rng, std::vector<double>* trace)
{
    const std::size_t n = amps.size();
    const auto N = static_cast<std::size_t>(parties);
    std::vector<double> contraction(d);
    AlternatingRun run;
    double previous = -1.0;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double overlap_sq = 0.0;
        for (std::size_t k = 0; k < N; ++k) {
            std::fill(contraction.begin(), contraction.end(), 0.0);
            for (std::size_t p = 0; p < n; ++p) {
                if (amps[p] == 0.0) continue;
                const std::size_t* dig = &digits[p * N];
                double prod = amps[p];
                for (std::size_t j = 0; j < N; ++j)
                    if (j != k) prod *= factors[j][dig[j]];
                contraction[dig[k]] += prod;
            }
            double len_sq = 0.0;
            for (double c : contraction) len_sq += c * c;
            if (len_sq > 0.0) {
                const double len = std::sqrt(len_sq);
                for (std::size_t i = 0; i < d; ++i) factors[k][i] = contraction[i] / len;
            } else if (rng != nullptr) {
                // Stuck orthogonal to psi: re-draw this factor.
                std::normal_distribution<double> normal;
                double s = 0.0;
                for (double& x : factors[k]) {
                    x = normal(*rng);
                    s += x * x;
                }
                for (double& x : factors[k]) x /= std::sqrt(s);
            }
            overlap_sq = len_sq;
        }
        if (trace != nullptr) trace->push_back(overlap_sq);
        run.overlap = std::max(run.overlap, overlap_sq);
        if (overlap_sq - previous < tol) {
            run.converged = true;
            break;
        }
        previous = overlap_sq;
    }
    return run;
}

}  // namespace

GmResult gm_from_amplitudes(std::span<const double> amplitudes, int parties, int local_dim,
                            const GmSearchConfig& cfg)
{
    if (parties < 2) throw std::invalid_argument("geometric measure needs at least two parties");
    if (cfg.restarts < 1 || cfg.max_sweeps < 1) throw std::invalid_argument("GM search needs restarts, sweeps >= 1");
    const std::size_t n = basis_size(parties, local_dim);
    if (amplitudes.size() != n) throw std::invalid_argument("amplitude vector has wrong length");
    const auto d = static_cast<std::size_t>(local_dim);

    const double norm = std::sqrt(norm_sq(amplitudes));
    if (!(norm > 0.0)) throw std::invalid_argument("amplitude vector is zero");
    std::vector<double> amps(amplitudes.begin(), amplitudes.end());
    for (double& a : amps) a /= norm;
    const auto digits = digit_table(n, parties, d);

    GmResult best{{Measure::GM, 1.0}, -1.0, {}, 0, false};
    std::vector<std::vector<double>> factors(static_cast<std::size_t>(parties), std::vector<double>(d));
    for (int r = 0; r < cfg.restarts; ++r) {
        auto rng = make_engine(cfg.seed, {static_cast<std::uint64_t>(r)});
        if (r == 0) {
            // First start: the uniform product state.
            for (auto& f : factors) std::fill(f.begin(), f.end(), 1.0 / std::sqrt(static_cast<double>(d)));
        } else {
            std::normal_distribution<double> normal;
            for (auto& f : factors) {
                double s = 0.0;
                for (double& x : f) {
                    x = normal(rng);
                    s += x * x;
                }
                for (double& x : f) x /= std::sqrt(s);
            }
        }
        const auto run = alternate(amps, parties, d, digits, factors, cfg.max_sweeps, cfg.tol, &rng, nullptr);
        if (run.overlap > best.max_overlap) {
            best.max_overlap = run.overlap;
            best.factors = factors;
            best.best_restart = r;
            best.converged = run.converged;
        }
    }
    best.max_overlap = std::clamp(best.max_overlap, 0.0, 1.0);
    best.value.value = 1.0 - best.max_overlap;
    return best;
}

GmResult gm(const ProbeState& state, const GmSearchConfig& cfg)
{
    const auto amps = state.amplitudes();
    return gm_from_amplitudes(amps, state.parties(), state.local_dim(), cfg);
}

std::vector<double> gm_alternating_trace(std::span<const double> amplitudes, int parties, int local_dim,
                                         std::vector<std::vector<double>> factors, int max_sweeps, double tol)
{
    const std::size_t n = basis_size(parties, local_dim);
    const auto d = static_cast<std::size_t>(local_dim);
    if (amplitudes.size() != n) throw std::invalid_argument("amplitude vector has wrong length");
    if (factors.size() != static_cast<std::size_t>(parties)) throw std::invalid_argument("need one factor per party");
    for (const auto& f : factors)
        if (f.size() != d) throw std::invalid_argument("factor has wrong length");
    const double norm = std::sqrt(norm_sq(amplitudes));
    std::vector<double> amps(amplitudes.begin(), amplitudes.end());
    for (double& a : amps) a /= norm;
    std::vector<double> trace;
    alternate(amps, parties, d, digit_table(n, parties, d), factors, max_sweeps, tol, nullptr, &trace);
    return trace;
}

}  // namespace qmetrix
