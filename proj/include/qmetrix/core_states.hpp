#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace qmetrix {

/// How the local eigenvalue list of a generator was produced.
enum class SpectrumKind { PauliZ, SpinRescaled, Custom };

std::string_view to_string(SpectrumKind kind);
SpectrumKind spectrum_kind_from_string(std::string_view name);

/// Collective generator h = sum_k Z^(k) acting on N parties of local dimension d.
///
/// Basis states are indexed lexicographically: index p of the local digits
/// (i_0, ..., i_{N-1}) is sum_k i_k d^(N-1-k), so party 0 is the most
/// significant digit. Every module in the library shares this convention.
class Generator {
public:
    /// Validates the eigenvalue list (length d, finite, nondecreasing) and the
    /// kind-specific shape. Throws std::invalid_argument on violation.
    Generator(int parties, int local_dim, SpectrumKind kind, std::vector<double> local_eigenvalues);

    int parties() const noexcept { return parties_; }
    int local_dim() const noexcept { return local_dim_; }
    SpectrumKind kind() const noexcept { return kind_; }
    const std::vector<double>& local_eigenvalues() const noexcept { return local_eigenvalues_; }

    /// d^N, the size of the collective basis.
    std::size_t dimension() const noexcept { return dimension_; }

private:
    int parties_;
    int local_dim_;
    SpectrumKind kind_;
    std::vector<double> local_eigenvalues_;
    std::size_t dimension_;
};

/// Builds a generator. PauliZ gives (-1, +1); SpinRescaled gives d values evenly
/// spaced over [-1, 1] (spin-s eigenvalues divided by s = (d-1)/2); Custom uses
/// `custom_eigenvalues`, which must be given for Custom and only for Custom.
Generator make_generator(int parties, int local_dim, SpectrumKind kind,
                         std::optional<std::vector<double>> custom_eigenvalues = std::nullopt);

struct CollectiveSpectrum {
    std::vector<double> values;
};

CollectiveSpectrum collective_spectrum(const Generator& g);

/// d^N with overflow and sanity checks; throws std::invalid_argument.
std::size_t basis_size(int parties, int local_dim);

/// Phaseless pure probe sum_p sqrt(w_p)|p>, stored as its weights.
class ProbeState {
public:
    static constexpr double kNormTolerance = 1e-12;
    static constexpr double kRenormalizeLimit = 1e-9;

    /// Weights must be finite and nonnegative. A sum within 1e-9 of one is
    /// renormalized; anything further off is rejected.
    static ProbeState from_weights(int parties, int local_dim, std::vector<double> weights);

    /// w_p = a_p^2 / sum a^2. Signs of the amplitudes are discarded.
    static ProbeState from_amplitudes(int parties, int local_dim, std::span<const double> amplitudes);

    int parties() const noexcept { return parties_; }
    int local_dim() const noexcept { return local_dim_; }
    std::size_t size() const noexcept { return weights_.size(); }
    std::span<const double> weights() const noexcept { return weights_; }
    double weight(std::size_t p) const { return weights_.at(p); }

    /// Nonnegative amplitudes sqrt(w_p).
    std::vector<double> amplitudes() const;

private:
    ProbeState(int parties, int local_dim, std::vector<double> weights)
        : parties_(parties), local_dim_(local_dim), weights_(std::move(weights)) {}

    int parties_;
    int local_dim_;
    std::vector<double> weights_;
};

/// Sum_p w_p E_p^2 - (sum_p w_p E_p)^2, evaluated around the mean so the result
/// stays nonnegative in floating point.
double variance(std::span<const double> weights, std::span<const double> spectrum);
double variance(const ProbeState& state, const Generator& g);

/// Quantum Fisher information of the encoded pure state: 4 x variance.
double qfi(const ProbeState& state, const Generator& g);

/// Cramer-Rao standard deviation for a single repetition, q^(-1/2).
/// Throws std::domain_error for q <= 0.
double cramer_rao_stddev(double q);

}  // namespace qmetrix
