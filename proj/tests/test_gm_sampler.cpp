#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "qmetrix/gm_sampler.hpp"

using namespace qmetrix;
using doctest::Approx;

namespace {

SamplerConfig small(std::uint64_t samples, std::uint64_t seed = 7)
{
    SamplerConfig cfg;
    cfg.samples = samples;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("bin layout")
{
    CHECK(bin_count(SamplerConfig{}) == 10);
    auto cfg = small(10);
    cfg.bin_width = 0.1;
    CHECK(bin_count(cfg) == 5);
    cfg.bin_width = 0.3;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = small(0);
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = small(10);
    cfg.parties = 1;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
}

TEST_CASE("closed bins share their edges")
{
    CHECK(bins_for(0.0, 0.05, 10) == std::pair{0, 0});
    CHECK(bins_for(0.02, 0.05, 10) == std::pair{0, 0});
    CHECK(bins_for(0.05, 0.05, 10) == std::pair{0, 1});
    CHECK(bins_for(0.5, 0.05, 10) == std::pair{9, 9});
    CHECK(!bins_for(0.6, 0.05, 10));
}

TEST_CASE("sampling is reproducible and normalized")
{
    const auto a = sample_states(small(1, 99));
    const auto b = sample_states(small(1, 99));
    REQUIRE(a.size() == 1);
    for (std::size_t p = 0; p < 8; ++p) CHECK(a[0].weight(p) == b[0].weight(p));

    const auto states = sample_states(small(100000));
    REQUIRE(states.size() == 100000);
    std::vector<double> mean(8, 0.0);
    for (const auto& s : states) {
        double sum = 0;
        for (std::size_t p = 0; p < 8; ++p) {
            sum += s.weight(p);
            mean[p] += s.weight(p);
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
    for (double m : mean) CHECK(m / states.size() == Approx(0.125).epsilon(0.01 / 0.125));
}

TEST_CASE("chunks are independent of how they are scheduled")
{
    auto cfg = small(10000);
    cfg.chunk_size = 1000;
    const auto all = sample_states(cfg);
    const auto third = sample_chunk(cfg, 3);
    REQUIRE(third.size() == 1000);
    for (std::size_t p = 0; p < 8; ++p) CHECK(third[17].weight(p) == all[3017].weight(p));
    cfg.samples = 10500;
    CHECK(sample_chunk(cfg, 10).size() == 500);
}

TEST_CASE("product states land only in bin 0")
{
    auto cfg = small(3);
    std::vector<ProbeState> states;
    for (double a : {0.1, 0.5, 0.9}) {
        // (sqrt a |0> + sqrt(1-a) |1>)^(x3)
        std::vector<double> w(8);
        for (int p = 0; p < 8; ++p) {
            const int ones = __builtin_popcount(p);
            w[p] = std::pow(a, 3 - ones) * std::pow(1 - a, ones);
        }
        states.push_back(ProbeState::from_weights(3, 2, w));
    }
    const auto r = bin_states(states, cfg);
    CHECK(r.bins[0].count == 3);
    for (std::size_t k = 1; k < r.bins.size(); ++k) {
        CHECK(r.bins[k].count == 0);
        CHECK(!r.bins[k].q_max);
    }
    CHECK(r.bins[0].q_max.value() == Approx(12));
}

TEST_CASE("ghz weights sit in the top bin")
{
    std::vector<double> w(8, 0.0);
    w[0] = w[7] = 0.5;
    const auto r = bin_states({ProbeState::from_weights(3, 2, w)}, small(1));
    CHECK(r.bins[9].count == 1);
    CHECK(r.bins[9].q_max.value() == Approx(36));
    CHECK(r.bins[9].argmax_gm.value() == Approx(0.5));
    CHECK(r.out_of_range == 0);
    for (int k = 0; k < 9; ++k) CHECK(r.bins[k].count == 0);
}

TEST_CASE("binned maxima respect the sql and hl")
{
    auto cfg = small(20000);
    const auto r = bin_and_maximize(cfg);
    std::uint64_t total = r.out_of_range;
    for (const auto& b : r.bins) {
        total += b.count;
        if (b.q_max) {
            CHECK(*b.q_max <= 36.0 + 1e-9);
            CHECK(b.argmax_weights.has_value());
        }
    }
    CHECK(total >= cfg.samples);
    CHECK(r.bins[0].q_max.has_value());
}

TEST_CASE("thread count does not change the report")
{
    auto cfg = small(6000, 3);
    cfg.chunk_size = 500;
    const auto a = bin_and_maximize(cfg);
    cfg.threads = 4;
    const auto b = bin_and_maximize(cfg);
    REQUIRE(a.bins.size() == b.bins.size());
    for (std::size_t k = 0; k < a.bins.size(); ++k) {
        CHECK(a.bins[k].count == b.bins[k].count);
        CHECK(a.bins[k].q_max == b.bins[k].q_max);
    }
}

TEST_CASE("convergence check")
{
    const auto a = bin_and_maximize(small(3000, 1));
    const auto same = convergence_check(a, a, 0.05);
    for (const auto& c : same.bins) {
        if (c.rel_diff) CHECK(*c.rel_diff == 0.0);
        CHECK(!c.exceeds);
    }

    const auto b = bin_and_maximize(small(6000, 2));
    const auto diff = convergence_check(a, b, 0.05);
    CHECK(diff.bins.size() == a.bins.size());

    auto other = small(3000, 1);
    other.parties = 4;
    const auto c = bin_and_maximize(other);
    CHECK_THROWS_AS(convergence_check(a, c, 0.05), std::invalid_argument);
}
