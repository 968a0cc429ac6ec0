#include "qmetrix/core_states.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qmetrix {

std::string_view to_string(SpectrumKind kind)
{
    switch (kind) {
    case SpectrumKind::PauliZ: return "pauli-z";
    case SpectrumKind::SpinRescaled: return "spin-rescaled";
    case SpectrumKind::Custom: return "custom";
    }
    return "unknown";
}

SpectrumKind spectrum_kind_from_string(std::string_view name)
{
    if (name == "pauli-z" || name == "pauliz" || name == "PauliZ") return SpectrumKind::PauliZ;
    if (name == "spin-rescaled" || name == "spin" || name == "SpinRescaled") return SpectrumKind::SpinRescaled;
    if (name == "custom" || name == "Custom") return SpectrumKind::Custom;
    throw std::invalid_argument("unknown spectrum kind '" + std::string(name) + "'");
}

std::size_t basis_size(int parties, int local_dim)
{
    if (parties < 1) throw std::invalid_argument("parties must be >= 1");
    if (local_dim < 2) throw std::invalid_argument("local_dim must be >= 2");
    std::size_t n = 1;
    for (int k = 0; k < parties; ++k) {
        if (n > (std::size_t{1} << 40) / static_cast<std::size_t>(local_dim))
            throw std::invalid_argument("collective dimension d^N is too large");
        n *= static_cast<std::size_t>(local_dim);
    }
    return n;
}

Generator::Generator(int parties, int local_dim, SpectrumKind kind, std::vector<double> local_eigenvalues)
    : parties_(parties),
      local_dim_(local_dim),
      kind_(kind),
      local_eigenvalues_(std::move(local_eigenvalues)),
      dimension_(basis_size(parties, local_dim))
{
    if (local_eigenvalues_.size() != static_cast<std::size_t>(local_dim_))
        throw std::invalid_argument("expected " + std::to_string(local_dim_) + " local eigenvalues, got "
                                    + std::to_string(local_eigenvalues_.size()));
    for (std::size_t j = 0; j < local_eigenvalues_.size(); ++j) {
        if (!std::isfinite(local_eigenvalues_[j]))
            throw std::invalid_argument("local eigenvalues must be finite");
        if (j > 0 && local_eigenvalues_[j] < local_eigenvalues_[j - 1])
            throw std::invalid_argument("local eigenvalues must be nondecreasing");
    }
    if (kind_ == SpectrumKind::PauliZ
        && (local_dim_ != 2 || local_eigenvalues_[0] != -1.0 || local_eigenvalues_[1] != 1.0))
        throw std::invalid_argument("PauliZ generator requires d = 2 with eigenvalues (-1, +1)");
}

Generator make_generator(int parties, int local_dim, SpectrumKind kind,
                         std::optional<std::vector<double>> custom_eigenvalues)
{
    if (parties < 1) throw std::invalid_argument("parties must be >= 1");
    if (local_dim < 2) throw std::invalid_argument("local_dim must be >= 2");
    if ((kind == SpectrumKind::Custom) != custom_eigenvalues.has_value())
        throw std::invalid_argument("custom eigenvalues are required for, and only for, the Custom kind");

    switch (kind) {
    case SpectrumKind::PauliZ:
        if (local_dim != 2) throw std::invalid_argument("PauliZ generator requires d = 2");
        return Generator(parties, 2, kind, {-1.0, 1.0});
    case SpectrumKind::SpinRescaled: {
        std::vector<double> eig(static_cast<std::size_t>(local_dim));
        const double s = 0.5 * (local_dim - 1);
        for (int j = 0; j < local_dim; ++j)
            eig[static_cast<std::size_t>(j)] = (j - s) / s;
        return Generator(parties, local_dim, kind, std::move(eig));
    }
    case SpectrumKind::Custom:
        return Generator(parties, local_dim, kind, std::move(*custom_eigenvalues));
    }
    throw std::invalid_argument("unknown spectrum kind");
}

CollectiveSpectrum collective_spectrum(const Generator& g)
{
    const auto& eig = g.local_eigenvalues();
    const auto d = static_cast<std::size_t>(g.local_dim());
    // Build level by level: appending one party multiplies the index by d.
    std::vector<double> values{0.0};
    for (int k = 0; k < g.parties(); ++k) {
        std::vector<double> next;
        next.reserve(values.size() * d);
        for (double v : values)
            for (std::size_t j = 0; j < d; ++j)
                next.push_back(v + eig[j]);
        values = std::move(next);
    }
    return {std::move(values)};
}

ProbeState ProbeState::from_weights(int parties, int local_dim, std::vector<double> weights)
{
    const std::size_t n = basis_size(parties, local_dim);
    if (weights.size() != n)
        throw std::invalid_argument("expected " + std::to_string(n) + " weights, got " + std::to_string(weights.size()));
    double sum = 0.0;
    for (double& w : weights) {
        if (!std::isfinite(w)) throw std::invalid_argument("weights must be finite");
        if (w < 0.0) {
            if (w < -kNormTolerance) throw std::invalid_argument("weights must be nonnegative");
            w = 0.0;
        }
        sum += w;
    }
    const double deviation = std::abs(sum - 1.0);
    if (deviation > kRenormalizeLimit)
        throw std::invalid_argument("weights sum to " + std::to_string(sum) + ", not 1");
    if (deviation > 0.0)
        for (double& w : weights) w /= sum;
    for (double& w : weights) w = std::min(w, 1.0);
    return ProbeState(parties, local_dim, std::move(weights));
}

ProbeState ProbeState::from_amplitudes(int parties, int local_dim, std::span<const double> amplitudes)
{
    const std::size_t n = basis_size(parties, local_dim);
    if (amplitudes.size() != n)
        throw std::invalid_argument("expected " + std::to_string(n) + " amplitudes, got "
                                    + std::to_string(amplitudes.size()));
    double norm = 0.0;
    for (double a : amplitudes) {
        if (!std::isfinite(a)) throw std::invalid_argument("amplitudes must be finite");
        norm += a * a;
    }
    if (!(norm > 0.0)) throw std::invalid_argument("amplitude vector is zero");
    std::vector<double> w(n);
    for (std::size_t p = 0; p < n; ++p) w[p] = amplitudes[p] * amplitudes[p] / norm;
    return ProbeState(parties, local_dim, std::move(w));
}

std::vector<double> ProbeState::amplitudes() const
{
    std::vector<double> a(weights_.size());
    for (std::size_t p = 0; p < a.size(); ++p) a[p] = std::sqrt(weights_[p]);
    return a;
}

double variance(std::span<const double> weights, std::span<const double> spectrum)
{
    if (weights.size() != spectrum.size())
        throw std::invalid_argument("state and generator dimensions differ");
    double mean = 0.0;
    for (std::size_t p = 0; p < weights.size(); ++p) mean += weights[p] * spectrum[p];
    double var = 0.0;
    for (std::size_t p = 0; p < weights.size(); ++p) {
        const double dev = spectrum[p] - mean;
        var += weights[p] * dev * dev;
    }
    return var;
}

double variance(const ProbeState& state, const Generator& g)
{
    if (state.parties() != g.parties() || state.local_dim() != g.local_dim())
        throw std::invalid_argument("state (N, d) does not match generator (N, d)");
    const auto spectrum = collective_spectrum(g);
    return variance(state.weights(), spectrum.values);
}

double qfi(const ProbeState& state, const Generator& g)
{
    return 4.0 * variance(state, g);
}

double cramer_rao_stddev(double q)
{
    if (!(q > 0.0) || !std::isfinite(q))
        throw std::domain_error("Cramer-Rao bound needs a positive, finite QFI");
    return 1.0 / std::sqrt(q);
}

}  // namespace qmetrix
