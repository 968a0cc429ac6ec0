#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "qmetrix/core_states.hpp"
#include "qmetrix/serialization.hpp"

using namespace qmetrix;
using doctest::Approx;

namespace {

void check_values(const std::vector<double>& got, const std::vector<double>& want)
{
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == Approx(want[i]));
}

ProbeState two_qubit(std::vector<double> w) { return ProbeState::from_weights(2, 2, std::move(w)); }

}  // namespace

TEST_CASE("local eigenvalues of the built-in spectra")
{
    check_values(make_generator(2, 2, SpectrumKind::PauliZ).local_eigenvalues(), {-1, 1});
    check_values(make_generator(2, 3, SpectrumKind::SpinRescaled).local_eigenvalues(), {-1, 0, 1});
    check_values(make_generator(2, 5, SpectrumKind::SpinRescaled).local_eigenvalues(), {-1, -0.5, 0, 0.5, 1});
}

TEST_CASE("collective spectrum is lexicographic with party 0 most significant")
{
    check_values(collective_spectrum(make_generator(2, 2, SpectrumKind::PauliZ)).values, {-2, 0, 0, 2});
    check_values(collective_spectrum(make_generator(3, 2, SpectrumKind::PauliZ)).values,
                 {-3, -1, -1, 1, -1, 1, 1, 3});
    check_values(collective_spectrum(make_generator(2, 3, SpectrumKind::SpinRescaled)).values,
                 {-2, -1, 0, -1, 0, 1, 0, 1, 2});
    check_values(collective_spectrum(make_generator(2, 3, SpectrumKind::Custom, std::vector<double>{0, 2, 3})).values,
                 {0, 2, 3, 2, 4, 5, 3, 5, 6});
}

TEST_CASE("generator validation")
{
    CHECK_THROWS_AS(make_generator(0, 2, SpectrumKind::PauliZ), std::invalid_argument);
    CHECK_THROWS_AS(make_generator(2, 1, SpectrumKind::PauliZ), std::invalid_argument);
    CHECK_THROWS_AS(make_generator(2, 3, SpectrumKind::PauliZ), std::invalid_argument);
    CHECK_THROWS_AS(make_generator(2, 3, SpectrumKind::Custom), std::invalid_argument);
    CHECK_THROWS_AS(make_generator(2, 3, SpectrumKind::Custom, std::vector<double>{0, 2}), std::invalid_argument);
    CHECK_THROWS_AS(make_generator(2, 3, SpectrumKind::Custom, std::vector<double>{0, 3, 2}), std::invalid_argument);
    CHECK_THROWS_AS(make_generator(2, 2, SpectrumKind::Custom, std::vector<double>{0, std::nan("")}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_generator(2, 2, SpectrumKind::PauliZ, std::vector<double>{-1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(basis_size(200, 10), std::invalid_argument);
    CHECK(basis_size(3, 4) == 64);
}

TEST_CASE("variance and qfi of the standard two-qubit probes")
{
    const auto g = make_generator(2, 2, SpectrumKind::PauliZ);
    CHECK(variance(two_qubit({0.25, 0.25, 0.25, 0.25}), g) == Approx(2));
    CHECK(variance(two_qubit({0.5, 0, 0, 0.5}), g) == Approx(4));
    CHECK(variance(two_qubit({0, 0.5, 0.5, 0}), g) == Approx(0));
    CHECK(qfi(two_qubit({0.5, 0, 0, 0.5}), g) == Approx(16));
    CHECK(qfi(two_qubit({0.25, 0.25, 0.25, 0.25}), g) == Approx(8));
    for (int p = 0; p < 4; ++p) {
        std::vector<double> w(4, 0.0);
        w[p] = 1.0;
        CHECK(qfi(two_qubit(w), g) == 0.0);
    }
}

TEST_CASE("variance stays nonnegative and is shift invariant")
{
    const std::vector<double> w{0.1, 0.2, 0.3, 0.4};
    const std::vector<double> e{1e8 + 1, 1e8 + 1, 1e8 + 1, 1e8 + 1};
    CHECK(variance(w, e) >= 0.0);
    const std::vector<double> e1{-2, 0, 0, 2};
    const std::vector<double> e2{3, 5, 5, 7};
    CHECK(variance(w, e1) == Approx(variance(w, e2)));
}

TEST_CASE("variance never exceeds the squared half range of the spectrum")
{
    const auto g = make_generator(3, 2, SpectrumKind::PauliZ);
    std::vector<double> w(8);
    for (int trial = 0; trial < 50; ++trial) {
        double sum = 0;
        for (std::size_t p = 0; p < w.size(); ++p) sum += (w[p] = std::fmod(0.37 * (trial + 1) * (p + 3), 1.0));
        for (auto& x : w) x /= sum;
        CHECK(qfi(ProbeState::from_weights(3, 2, w), g) <= 36.0 + 1e-12);
    }
}

TEST_CASE("cramer rao standard deviation")
{
    CHECK(cramer_rao_stddev(16) == Approx(0.25));
    CHECK(cramer_rao_stddev(8) == Approx(0.35355).epsilon(1e-4));
    CHECK(cramer_rao_stddev(12) == Approx(0.28868).epsilon(1e-4));
    CHECK_THROWS_AS(cramer_rao_stddev(0), std::domain_error);
    CHECK_THROWS_AS(cramer_rao_stddev(-1), std::domain_error);
}

TEST_CASE("probe state normalization rules")
{
    CHECK_THROWS_AS(two_qubit({0.5, 0.5, 0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(two_qubit({0.5, -0.1, 0.1, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(two_qubit({0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(two_qubit({0.5, std::numeric_limits<double>::infinity(), 0, 0}), std::invalid_argument);

    const auto s = two_qubit({0.25 + 1e-10, 0.25, 0.25, 0.25});
    double sum = 0;
    for (double w : s.weights()) sum += w;
    CHECK(sum == Approx(1.0).epsilon(1e-14));

    const std::vector<double> amps{1, -1, 1, -1};
    const auto a = ProbeState::from_amplitudes(2, 2, amps);
    for (double w : a.weights()) CHECK(w == Approx(0.25));
    for (double x : a.amplitudes()) CHECK(x == Approx(0.5));
    const std::vector<double> zeros(4, 0.0);
    CHECK_THROWS_AS(ProbeState::from_amplitudes(2, 2, zeros), std::invalid_argument);
}

TEST_CASE("probe json round trip is bit exact")
{
    const auto g = make_generator(2, 3, SpectrumKind::Custom, std::vector<double>{0, 2, 3});
    std::vector<double> w{0.1, 0.2, 0.05, 0.05, 0.1, 0.1, 0.1, 0.2, 0.1};
    const auto s = ProbeState::from_weights(2, 3, w);
    const auto [g2, s2] = probe_from_json(probe_to_json(g, s));
    CHECK(g2.kind() == SpectrumKind::Custom);
    CHECK(g2.local_eigenvalues() == g.local_eigenvalues());
    REQUIRE(s2.size() == s.size());
    for (std::size_t p = 0; p < s.size(); ++p) CHECK(s2.weight(p) == s.weight(p));

    auto bad = probe_to_json(g, s);
    bad["weights"].erase(0);
    CHECK_THROWS_AS(probe_from_json(bad), std::invalid_argument);
    CHECK_THROWS_AS(probe_from_json(nlohmann::json::object()), std::invalid_argument);
}
