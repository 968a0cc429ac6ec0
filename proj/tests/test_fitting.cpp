#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "qmetrix/fitting.hpp"

using namespace qmetrix;
using doctest::Approx;

namespace {

std::vector<FitPoint> quadratic_points(double a, double b, double c, const std::vector<double>& xs)
{
    std::vector<FitPoint> pts;
    for (double x : xs) pts.push_back({x, 1.0 / std::sqrt(a * x * x + b * x + c)});
    return pts;
}

std::vector<FitPoint> rational_points(double a, double b, double c, double d, const std::vector<double>& xs)
{
    std::vector<FitPoint> pts;
    for (double x : xs) pts.push_back({x, 1.0 / std::sqrt((a * x * x + b * x + c) / (x + d))});
    return pts;
}

std::vector<double> grid(double lo, double step, int n)
{
    std::vector<double> xs;
    for (int i = 0; i < n; ++i) xs.push_back(lo + step * i);
    return xs;
}

}  // namespace

TEST_CASE("quadratic fit recovers exact parameters")
{
    const auto pts = quadratic_points(1, 2, 3, grid(0.0, 0.1, 11));
    const auto f = fit_quadratic(pts);
    REQUIRE(f.params.size() == 3);
    CHECK(std::abs(f.params[0] - 1) < 1e-10);
    CHECK(std::abs(f.params[1] - 2) < 1e-10);
    CHECK(std::abs(f.params[2] - 3) < 1e-10);
    CHECK(f.points_used == 11);
    CHECK(f.residual_norm < 1e-10);
    CHECK(f.max_rel_stddev_error < 1e-10);
    CHECK(fitted_stddev(f, 0.35) == Approx(1.0 / std::sqrt(0.35 * 0.35 + 0.7 + 3)));
}

TEST_CASE("direct reading fits the standard deviation itself")
{
    std::vector<FitPoint> pts;
    for (double x : grid(1.0, 0.1, 6)) pts.push_back({x, 0.028 * x * x - 0.051 * x + 0.274});
    const auto f = fit_quadratic(pts, QuadraticReading::Direct);
    CHECK(f.reading == QuadraticReading::Direct);
    CHECK(f.params[0] == Approx(0.028));
    CHECK(f.params[1] == Approx(-0.051));
    CHECK(f.params[2] == Approx(0.274));
    CHECK(fitted_stddev(f, 1.2) == Approx(0.028 * 1.44 - 0.051 * 1.2 + 0.274));
}

TEST_CASE("quadratic fit input errors")
{
    const auto two = quadratic_points(1, 2, 3, {0.1, 0.2});
    CHECK_THROWS_AS(fit_quadratic(two), std::invalid_argument);
    const auto repeated = quadratic_points(1, 2, 3, {0.1, 0.1, 0.2, 0.2});
    CHECK_THROWS_AS(fit_quadratic(repeated), std::invalid_argument);
    std::vector<FitPoint> bad{{0.1, 0.3}, {0.2, -0.3}, {0.3, 0.3}};
    CHECK_THROWS_AS(fit_quadratic(bad), std::invalid_argument);
}

TEST_CASE("rational fit recovers exact parameters")
{
    const auto pts = rational_points(4.51, 36.48, 1.4, 0.07, grid(0.0, 0.05, 11));
    const auto f = fit_rational(pts);
    REQUIRE(f.params.size() == 4);
    CHECK(f.converged);
    CHECK(std::abs(f.params[0] - 4.51) < 1e-6);
    CHECK(std::abs(f.params[1] - 36.48) < 1e-6);
    CHECK(std::abs(f.params[2] - 1.4) < 1e-6);
    CHECK(std::abs(f.params[3] - 0.07) < 1e-6);
    CHECK(f.max_rel_stddev_error < 1e-8);
}

TEST_CASE("rational fit is invariant under point order")
{
    auto pts = rational_points(2.0, 10.0, 0.5, 0.2, grid(0.0, 0.05, 11));
    const auto a = fit_rational(pts);
    std::mt19937_64 rng(4);
    std::shuffle(pts.begin(), pts.end(), rng);
    const auto b = fit_rational(pts);
    for (int i = 0; i < 4; ++i) CHECK(a.params[i] == b.params[i]);
}

TEST_CASE("rational fit of noisy data stays close")
{
    auto pts = rational_points(4.51, 36.48, 1.4, 0.07, grid(0.05, 0.05, 10));
    std::mt19937_64 rng(8);
    std::normal_distribution<double> noise(0.0, 1e-4);
    for (auto& p : pts) p.stddev *= 1.0 + noise(rng);
    const auto f = fit_rational(pts);
    CHECK(f.max_rel_stddev_error < 1e-3);
    for (const auto& p : pts) CHECK(fitted_stddev(f, p.x) == Approx(p.stddev).epsilon(1e-3));
}

TEST_CASE("rational fit input errors")
{
    const auto three = rational_points(1, 2, 3, 0.5, {0.1, 0.2, 0.3});
    CHECK_THROWS_AS(fit_rational(three), std::invalid_argument);
    std::vector<FitPoint> flat;
    for (double x : grid(0.0, 0.1, 6)) flat.push_back({x, 0.3});
    CHECK_THROWS_AS(fit_rational(flat), std::runtime_error);
}

TEST_CASE("family and reading names")
{
    CHECK(fit_family_from_string("rational") == FitFamily::RationalInvSqrt);
    CHECK(to_string(FitFamily::QuadraticInvSqrt) == "quadratic");
    CHECK(quadratic_reading_from_string("direct") == QuadraticReading::Direct);
    CHECK(to_string(QuadraticReading::InverseSqrt) == "inverse-sqrt");
    CHECK_THROWS_AS(fit_family_from_string("cubic"), std::invalid_argument);
}
