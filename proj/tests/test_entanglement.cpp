#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "qmetrix/entanglement.hpp"

using namespace qmetrix;
using doctest::Approx;

namespace {

ProbeState state(int n, int d, std::vector<double> w) { return ProbeState::from_weights(n, d, std::move(w)); }

std::vector<double> ghz3()
{
    std::vector<double> w(8, 0.0);
    w[0] = w[7] = 0.5;
    return w;
}

std::vector<double> random_weights(std::mt19937_64& rng, std::size_t n)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> w(n);
    double sum = 0;
    for (auto& x : w) sum += (x = u(rng));
    for (auto& x : w) x /= sum;
    return w;
}

// Kronecker product of real local vectors, party 0 most significant.
std::vector<double> product(const std::vector<std::vector<double>>& factors)
{
    std::vector<double> out{1.0};
    for (const auto& f : factors) {
        std::vector<double> next;
        for (double a : out)
            for (double b : f) next.push_back(a * b);
        out = std::move(next);
    }
    return out;
}

}  // namespace

TEST_CASE("ggm of standard states")
{
    CHECK(ggm(state(2, 2, {0.5, 0, 0, 0.5})).value == Approx(0.5));
    CHECK(ggm(state(2, 2, {0.25, 0.25, 0.25, 0.25})).value == Approx(0).epsilon(1e-12));
    CHECK(ggm(state(3, 2, ghz3())).value == Approx(0.5));
    CHECK(ggm(state(3, 2, ghz3())).measure == Measure::GGM);
}

TEST_CASE("ggm requires at least two parties")
{
    CHECK_THROWS_AS(ggm(state(1, 2, {0.5, 0.5})), std::invalid_argument);
}

TEST_CASE("bipartitions enumerate the sides containing party 0")
{
    CHECK(bipartitions(2) == std::vector<std::vector<int>>{{0}});
    CHECK(bipartitions(3) == std::vector<std::vector<int>>{{0}, {0, 1}, {0, 2}});
    CHECK(bipartitions(5).size() == 15);
}

TEST_CASE("ggm report picks the first achieving cut")
{
    // |0>(|00> + |11>)/sqrt2: party 0 is unentangled, so the cut {0} wins.
    std::vector<double> w(8, 0.0);
    w[0] = w[3] = 0.5;
    const auto r = ggm_report(state(3, 2, w));
    CHECK(r.value.value == Approx(0).epsilon(1e-12));
    CHECK(r.achieving.partition == std::vector<int>{0});
    CHECK(r.achieving.max_schmidt_sq == Approx(1));
}

TEST_CASE("closed two-qubit ggm")
{
    CHECK(ggm_two_qubit_closed(std::vector<double>{0.5, 0, 0, 0.5}) == Approx(0.5));
    CHECK(ggm_two_qubit_closed(std::vector<double>{0.25, 0.25, 0.25, 0.25}) == Approx(0).epsilon(1e-12));
    CHECK(ggm_two_qubit_closed(std::vector<double>{0.4, 0.1, 0.1, 0.4}) == Approx(0.1));
}

TEST_CASE("closed form agrees with the spectral ggm on random two-qubit states")
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 500; ++i) {
        const auto w = random_weights(rng, 4);
        CHECK(ggm(state(2, 2, w)).value == Approx(ggm_two_qubit_closed(w)).epsilon(1e-10));
    }
}

TEST_CASE("entanglement entropy")
{
    CHECK(entropy_bipartite(state(2, 2, {0.5, 0, 0, 0.5})).value == Approx(1));
    CHECK(entropy_bipartite(state(2, 2, {0.25, 0.25, 0.25, 0.25})).value == Approx(0).epsilon(1e-12));
    std::vector<double> w(9, 0.0);
    w[0] = w[4] = w[8] = 1.0 / 3.0;
    CHECK(entropy_bipartite(state(2, 3, w)).value == Approx(std::log2(3.0)));
    CHECK_THROWS_AS(entropy_bipartite(state(3, 2, ghz3())), std::invalid_argument);
}

TEST_CASE("entropy of two qubits is the binary entropy of the smaller schmidt weight")
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        const auto w = random_weights(rng, 4);
        const double G = ggm_two_qubit_closed(w);
        CHECK(entropy_bipartite(state(2, 2, w)).value == Approx(binary_entropy(G)).epsilon(1e-8));
    }
}

TEST_CASE("binary entropy")
{
    CHECK(binary_entropy(0.5) == Approx(1));
    CHECK(binary_entropy(0) == 0.0);
    CHECK(binary_entropy(1) == 0.0);
    CHECK(binary_entropy(0.1) == Approx(0.46900).epsilon(1e-5));
    CHECK(binary_entropy(0.3) == Approx(binary_entropy(0.7)));
    CHECK_THROWS_AS(binary_entropy(-0.1), std::domain_error);
    CHECK_THROWS_AS(binary_entropy(1.1), std::domain_error);
}

TEST_CASE("geometric measure")
{
    SUBCASE("product states have zero gm")
    {
        const auto amps = product({{0.6, 0.8}, {0.8, 0.6}, {1.0, 0.0}});
        const auto r = gm_from_amplitudes(amps, 3, 2, GmSearchConfig{});
        CHECK(r.value.value == Approx(0).epsilon(1e-9));
        CHECK(r.max_overlap == Approx(1));
        CHECK(r.factors.size() == 3);
    }
    SUBCASE("bell and ghz weights")
    {
        CHECK(gm(state(2, 2, {0.5, 0, 0, 0.5})).value.value == Approx(0.5));
        const auto r = gm(state(3, 2, ghz3()));
        CHECK(r.value.value == Approx(0.5));
        CHECK(r.value.measure == Measure::GM);
        CHECK(r.converged);
    }
    SUBCASE("gm equals ggm for two parties")
    {
        std::mt19937_64 rng(9);
        for (int i = 0; i < 50; ++i) {
            const auto w = random_weights(rng, 9);
            const auto s = state(2, 3, w);
            CHECK(gm(s).value.value == Approx(ggm(s).value).epsilon(1e-8));
        }
    }
    SUBCASE("gm is at least ggm for three qubits")
    {
        std::mt19937_64 rng(21);
        for (int i = 0; i < 50; ++i) {
            const auto s = state(3, 2, random_weights(rng, 8));
            CHECK(gm(s).value.value >= ggm(s).value - 1e-9);
        }
    }
    SUBCASE("same seed gives the same answer")
    {
        std::mt19937_64 rng(3);
        const auto s = state(3, 2, random_weights(rng, 8));
        CHECK(gm(s).value.value == gm(s).value.value);
    }
    SUBCASE("bad config")
    {
        GmSearchConfig cfg;
        cfg.restarts = 0;
        CHECK_THROWS_AS(gm(state(3, 2, ghz3()), cfg), std::invalid_argument);
    }
}

TEST_CASE("alternating updates never decrease the overlap")
{
    std::mt19937_64 rng(17);
    const auto w = random_weights(rng, 27);
    std::vector<double> amps;
    for (double x : w) amps.push_back(std::sqrt(x));
    std::vector<std::vector<double>> start{{1, 0.2, 0.1}, {0.3, 1, 0.2}, {0.5, 0.5, 0.5}};
    const auto trace = gm_alternating_trace(amps, 3, 3, start, 200, 1e-14);
    REQUIRE(!trace.empty());
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] >= trace[i - 1] - 1e-14);
    CHECK(trace.back() <= 1.0 + 1e-12);
}
