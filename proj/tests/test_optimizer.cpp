#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "qmetrix/analytic_laws.hpp"
#include "qmetrix/optimizer.hpp"

using namespace qmetrix;
using doctest::Approx;

namespace {

ConstrainedProblem two_qubit(Measure m, double target, SearchSpace space = SearchSpace::FullSimplex)
{
    return {make_generator(2, 2, SpectrumKind::PauliZ), m, target, 1e-6, space};
}

EsConfig small_es(std::uint64_t seed = 1)
{
    EsConfig cfg;
    cfg.restarts = 4;
    cfg.generations = 150;
    cfg.seed = seed;
    return cfg;
}

double off_corner_weight(const ProbeState& s, int d)
{
    double off = 0;
    for (std::size_t p = 0; p < s.size(); ++p) {
        const std::size_t i = p / d, j = p % d;
        const bool corner = (i == 0 || i == static_cast<std::size_t>(d - 1)) && (j == 0 || j == static_cast<std::size_t>(d - 1));
        if (!corner) off += s.weight(p);
    }
    return off;
}

}  // namespace

TEST_CASE("two-qubit ggm target reaches the law")
{
    const auto r = maximize_qfi(two_qubit(Measure::GGM, 0.25), small_es());
    CHECK(r.converged);
    CHECK(r.q_best == Approx(8 * (1 + std::sqrt(0.75))).epsilon(1e-3 / 15));
    CHECK(r.constraint_residual <= 1e-6);
    CHECK(r.measure_value == Approx(0.25).epsilon(1e-5));
    CHECK(qfi(r.best_weights, make_generator(2, 2, SpectrumKind::PauliZ)) == Approx(r.q_best));
    CHECK(r.feasible_fraction >= 0.0);
    CHECK(r.feasible_fraction <= 1.0);
}

TEST_CASE("maximal entropy target gives the cat state")
{
    const auto r = maximize_qfi(two_qubit(Measure::Entropy, 1.0), small_es());
    CHECK(r.q_best == Approx(16).epsilon(1e-4));
    CHECK(r.best_weights.weight(0) == Approx(0.5).epsilon(1e-2));
    CHECK(r.best_weights.weight(3) == Approx(0.5).epsilon(1e-2));
}

TEST_CASE("qutrit search concentrates on the corners")
{
    ConstrainedProblem p{make_generator(2, 3, SpectrumKind::SpinRescaled), Measure::GGM, 0.25};
    const auto r = maximize_qfi(p, small_es(3));
    CHECK(r.converged);
    CHECK(r.q_best == Approx(q_opt_ggm(0.25)).epsilon(1e-4));
    CHECK(off_corner_weight(r.best_weights, 3) < 1e-4);
}

TEST_CASE("corner simplex search matches the full search")
{
    ConstrainedProblem p{make_generator(2, 4, SpectrumKind::SpinRescaled), Measure::GGM, 0.1, 1e-6,
                         SearchSpace::CornerSimplex};
    const auto r = maximize_qfi(p, small_es());
    CHECK(r.best_weights.size() == 16);
    CHECK(off_corner_weight(r.best_weights, 4) == 0.0);
    CHECK(r.q_best == Approx(q_opt_ggm(0.1)).epsilon(1e-4));
}

TEST_CASE("same seed is reproducible, thread count does not matter")
{
    auto cfg = small_es(42);
    cfg.generations = 60;
    const auto a = maximize_qfi(two_qubit(Measure::GGM, 0.3), cfg);
    cfg.threads = 3;
    const auto b = maximize_qfi(two_qubit(Measure::GGM, 0.3), cfg);
    CHECK(a.q_best == b.q_best);
    CHECK(a.best_restart == b.best_restart);
    for (std::size_t p = 0; p < 4; ++p) CHECK(a.best_weights.weight(p) == b.best_weights.weight(p));
}

TEST_CASE("problem validation")
{
    CHECK_THROWS_AS(validate(two_qubit(Measure::GGM, 0.6)), std::invalid_argument);
    CHECK_THROWS_AS(validate(two_qubit(Measure::GGM, -0.1)), std::invalid_argument);
    CHECK_THROWS_AS(validate(two_qubit(Measure::Entropy, 1.2)), std::invalid_argument);
    CHECK_THROWS_AS(maximize_qfi(two_qubit(Measure::GGM, 0.7), small_es()), std::invalid_argument);

    ConstrainedProblem three{make_generator(3, 2, SpectrumKind::PauliZ), Measure::Entropy, 0.5};
    CHECK_THROWS_AS(validate(three), std::invalid_argument);
    three.measure = Measure::GM;
    CHECK_THROWS_AS(validate(three), std::invalid_argument);
    three.measure = Measure::GGM;
    CHECK_NOTHROW(validate(three));
    three.search_space = SearchSpace::CornerSimplex;
    CHECK_THROWS_AS(validate(three), std::invalid_argument);

    // Qutrits allow GGM up to 2/3 in the full simplex, 1/2 on the corners.
    ConstrainedProblem q3{make_generator(2, 3, SpectrumKind::SpinRescaled), Measure::GGM, 0.6};
    CHECK_NOTHROW(validate(q3));
    q3.search_space = SearchSpace::CornerSimplex;
    CHECK_THROWS_AS(validate(q3), std::invalid_argument);

    auto bad_tol = two_qubit(Measure::GGM, 0.2);
    bad_tol.constraint_tol = 0.0;
    CHECK_THROWS_AS(validate(bad_tol), std::invalid_argument);
}

TEST_CASE("es config validation")
{
    EsConfig cfg;
    CHECK_NOTHROW(validate(cfg));
    cfg.generations = 0;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = {};
    cfg.restarts = 0;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = {};
    cfg.ranking_pressure = 0.7;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = {};
    cfg.mutation_scales = {0.1, -1.0};
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
}

TEST_CASE("grid oracle")
{
    SUBCASE("ggm 0.25")
    {
        const auto r = grid_oracle(two_qubit(Measure::GGM, 0.25), 200);
        CHECK(r.q_max == Approx(14.928).epsilon(0.01 / 15));
        CHECK(r.q_max <= q_opt_ggm(0.25) + 1e-9);
        CHECK(r.feasible_points > 0);
        CHECK(r.residual <= kGridOracleRootTol);
    }
    SUBCASE("ggm 0")
    {
        CHECK(grid_oracle(two_qubit(Measure::GGM, 0.0), 200).q_max == Approx(8).epsilon(0.01 / 8));
    }
    SUBCASE("entropy 1")
    {
        CHECK(grid_oracle(two_qubit(Measure::Entropy, 1.0), 200).q_max == Approx(16).epsilon(0.01 / 16));
    }
    SUBCASE("only four-weight problems")
    {
        ConstrainedProblem p{make_generator(3, 2, SpectrumKind::PauliZ), Measure::GGM, 0.2};
        CHECK_THROWS_AS(grid_oracle(p, 50), std::invalid_argument);
        CHECK_THROWS_AS(grid_oracle(two_qubit(Measure::GGM, 0.2), 0), std::invalid_argument);
    }
}

TEST_CASE("sweep follows the law and records failures")
{
    auto cfg = small_es(5);
    cfg.restarts = 2;
    cfg.generations = 80;
    const std::vector<double> targets{0.0, 0.1, 0.2, 0.9, 0.3};
    const auto entries = sweep(two_qubit(Measure::GGM, 0.0), targets, cfg);
    REQUIRE(entries.size() == targets.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        CHECK(entries[i].target == targets[i]);
        if (targets[i] > 0.5) {
            CHECK(!entries[i].result);
            CHECK(!entries[i].error.empty());
            continue;
        }
        REQUIRE(entries[i].result);
        CHECK(entries[i].result->q_best == Approx(q_opt_ggm(targets[i])).epsilon(1e-3 / 16));
    }
}

TEST_CASE("search space names")
{
    CHECK(search_space_from_string("full") == SearchSpace::FullSimplex);
    CHECK(search_space_from_string("corner") == SearchSpace::CornerSimplex);
    CHECK(to_string(SearchSpace::CornerSimplex) == "corner");
    CHECK_THROWS_AS(search_space_from_string("edge"), std::invalid_argument);
}
