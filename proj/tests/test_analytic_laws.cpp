#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "qmetrix/analytic_laws.hpp"

using namespace qmetrix;
using doctest::Approx;

TEST_CASE("ggm law endpoints and the Q = 12 point")
{
    CHECK(q_opt_ggm(0) == Approx(8));
    CHECK(q_opt_ggm(0.5) == Approx(16));
    CHECK(q_opt_ggm(0.5 * (1 - std::sqrt(0.75))) == Approx(12));
    CHECK(q_opt_ggm(0.25) == Approx(8 * (1 + std::sqrt(0.75))));
    CHECK_THROWS_AS(q_opt_ggm(-0.01), std::domain_error);
    CHECK_THROWS_AS(q_opt_ggm(0.51), std::domain_error);
}

TEST_CASE("ggm law is strictly increasing and concave")
{
    double prev = q_opt_ggm(0);
    for (int i = 1; i <= 100; ++i) {
        const double G = 0.005 * i;
        const double q = q_opt_ggm(G);
        CHECK(q > prev);
        prev = q;
    }
    for (int i = 1; i < 100; ++i) {
        const double G = 0.005 * i;
        const double mid = q_opt_ggm(G);
        const double avg = 0.5 * (q_opt_ggm(G - 0.005) + q_opt_ggm(G + 0.005));
        CHECK(mid >= avg);
    }
    // Steep start, flat finish: dQ/dG = 16 (1 - 2G) / sqrt(1 - (1 - 2G)^2).
    const double h = 1e-8;
    CHECK((q_opt_ggm(h) - q_opt_ggm(0)) / h > 1e3);
    CHECK((q_opt_ggm(0.5) - q_opt_ggm(0.5 - h)) / h < 1e-2);
}

TEST_CASE("entropy law")
{
    CHECK(q_opt_entropy(0) == Approx(8));
    CHECK(q_opt_entropy(1) == Approx(16));
    CHECK(q_opt_entropy(binary_entropy(0.1)) == Approx(12.8).epsilon(1e-10));
    CHECK(q_opt_entropy(0.469) == Approx(12.8).epsilon(1e-4));
    CHECK_THROWS_AS(q_opt_entropy(1.01), std::domain_error);
    CHECK_THROWS_AS(q_opt_entropy(-0.01), std::domain_error);
}

TEST_CASE("inverse binary entropy round trips")
{
    for (int i = 0; i <= 100; ++i) {
        const double S = 0.01 * i;
        const double lambda = inverse_binary_entropy(S);
        CHECK(lambda >= 0.0);
        CHECK(lambda <= 0.5);
        CHECK(std::abs(binary_entropy(lambda) - S) <= 1e-10);
    }
}

TEST_CASE("lambda of q inverts the ggm law")
{
    CHECK(lambda_of_q(8) == Approx(0));
    CHECK(lambda_of_q(16) == Approx(0.5));
    for (double G : {0.05, 0.1, 0.25, 0.4}) CHECK(lambda_of_q(q_opt_ggm(G)) == Approx(G));
    CHECK_THROWS_AS(lambda_of_q(7.9), std::domain_error);
}

TEST_CASE("optimal ggm states")
{
    const auto cat = optimal_state_ggm(0.5, 2);
    CHECK(cat.weight(0) == Approx(0.5));
    CHECK(cat.weight(1) == Approx(0));
    CHECK(cat.weight(2) == Approx(0));
    CHECK(cat.weight(3) == Approx(0.5));

    const auto uniform = optimal_state_ggm(0, 2);
    for (double w : uniform.weights()) CHECK(w == Approx(0.25));

    const auto s = optimal_state_ggm(0.25, 3);
    const double x = std::sqrt(0.75);
    CHECK(s.weight(0) == Approx((1 + x) / 4));
    CHECK(s.weight(2) == Approx((1 - x) / 4));
    CHECK(s.weight(6) == Approx((1 - x) / 4));
    CHECK(s.weight(8) == Approx((1 + x) / 4));
    for (std::size_t p : {1, 3, 4, 5, 7}) CHECK(s.weight(p) == 0.0);

    CHECK_THROWS_AS(optimal_state_ggm(0.25, 6), std::domain_error);
}

TEST_CASE("optimal states attain the law")
{
    for (int d = 2; d <= 5; ++d) {
        const auto g = make_generator(2, d, d == 2 ? SpectrumKind::PauliZ : SpectrumKind::SpinRescaled);
        for (double G : {0.0, 0.1, 0.25, 0.45, 0.5}) {
            const auto s = optimal_state_ggm(G, d);
            CHECK(qfi(s, g) == Approx(q_opt_ggm(G)));
            CHECK(ggm(s).value == Approx(G).epsilon(1e-9));
        }
        for (double S : {0.0, 0.3, 1.0}) {
            const auto s = optimal_state_entropy(S, d);
            CHECK(qfi(s, g) == Approx(q_opt_entropy(S)));
            CHECK(entropy_bipartite(s).value == Approx(S).epsilon(1e-9));
        }
    }
}

TEST_CASE("optimal entropy state at S = h(0.1) has smaller schmidt weight 0.1")
{
    const auto s = optimal_state_entropy(binary_entropy(0.1), 2);
    CHECK(ggm(s).value == Approx(0.1));
}

TEST_CASE("unequal d = 3 spectrum law")
{
    CHECK(q_opt_unequal_d3(0) == Approx(4.5));
    CHECK(q_opt_unequal_d3(0.5) == Approx(9));
    CHECK(q_opt_unequal_d3(0.25) == Approx(4.5 * (1 + std::sqrt(0.75))));
    for (double G : {0.0, 0.1, 0.3, 0.5}) CHECK(q_opt_unequal_d3(G) == Approx(0.5625 * q_opt_ggm(G)));
}

TEST_CASE("shot noise and heisenberg limits")
{
    CHECK(sql(2) == 8);
    CHECK(hl(2) == 16);
    CHECK(sql(3) == 12);
    CHECK(hl(3) == 36);
    CHECK(sql(1) == 4);
    CHECK(hl(1) == 4);
    CHECK_THROWS_AS(sql(0), std::domain_error);
}

TEST_CASE("boundary families")
{
    CHECK(boundary_qfi(0.25, BoundaryCase::DiagonalCornerMissing) == Approx(1.8564).epsilon(1e-4));
    CHECK(boundary_qfi(0.25, BoundaryCase::OffDiagonalZeroSymmetric) == Approx(13.856).epsilon(1e-4));
    CHECK(boundary_qfi(0.25, BoundaryCase::OffDiagonalPairZero) == Approx(12));
    CHECK(boundary_qfi(0.25, BoundaryCase::OffDiagonalZeroSplit) == Approx(8));
    CHECK_THROWS_AS(boundary_qfi(0.0, BoundaryCase::OffDiagonalPairZero), std::domain_error);
    CHECK_THROWS_AS(boundary_qfi(0.6, BoundaryCase::OffDiagonalZeroSplit), std::domain_error);
}

TEST_CASE("boundary families never beat the interior optimum")
{
    for (int i = 1; i < 100; ++i) {
        const double G = 0.005 * i;
        for (auto c : {BoundaryCase::DiagonalCornerMissing, BoundaryCase::OffDiagonalZeroSymmetric,
                       BoundaryCase::OffDiagonalPairZero})
            CHECK(boundary_qfi(G, c) <= q_opt_ggm(G) + 1e-12);
    }
}

TEST_CASE("law points")
{
    const auto p = law_point(Measure::GGM, 0.5);
    CHECK(p.q_opt == Approx(16));
    CHECK(p.stddev == Approx(0.25));
    CHECK(law_point(Measure::GGM, 0.5, true).q_opt == Approx(9));
    CHECK(law_point(Measure::Entropy, 1.0).q_opt == Approx(16));
    CHECK(law_point(Measure::GM, 0.2).q_opt == Approx(q_opt_ggm(0.2)));
}
