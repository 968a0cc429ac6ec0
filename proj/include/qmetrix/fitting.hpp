#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace qmetrix {

enum class FitFamily { QuadraticInvSqrt, RationalInvSqrt };

std::string_view to_string(FitFamily f);
FitFamily fit_family_from_string(std::string_view name);

/// How the quadratic family maps onto the standard deviation.
enum class QuadraticReading {
    /// stddev = (a x^2 + b x + c)^(-1/2); fitted as y = stddev^-2.
    InverseSqrt,
    /// stddev = a x^2 + b x + c; fitted directly.
    Direct,
};

std::string_view to_string(QuadraticReading r);
QuadraticReading quadratic_reading_from_string(std::string_view name);

struct FitPoint {
    double x;
    double stddev;
};

struct FitResult {
    FitFamily family;
    QuadraticReading reading = QuadraticReading::InverseSqrt;
    /// (a, b, c) or (a, b, c, d).
    std::vector<double> params;
    /// Euclidean residual in the fitted ordinate (the minimized quantity).
    double residual_norm;
    /// Euclidean residual of the predicted standard deviations.
    double stddev_residual_norm;
    /// max |predicted / observed - 1| over the points.
    double max_rel_stddev_error;
    std::size_t points_used;
    /// False when the final Gauss-Newton polish did not report convergence.
    bool converged = true;
};

/// Linear least squares of y against (x^2, x, 1). Needs >= 3 distinct x.
/// Throws std::invalid_argument for too few points and std::runtime_error for
/// a rank-deficient design matrix.
FitResult fit_quadratic(std::span<const FitPoint> points, QuadraticReading reading = QuadraticReading::InverseSqrt);

/// y = stddev^-2 = (a x^2 + b x + c) / (x + d), with x + d > 0 on the data.
/// d is profiled over a bracket with the inner linear problem solved exactly,
/// then all four parameters are refined by Levenberg-Marquardt.
/// Throws std::invalid_argument for fewer than 4 distinct x and
/// std::runtime_error for degenerate data (numerator divisible by x + d).
FitResult fit_rational(std::span<const FitPoint> points);

/// Predicted standard deviation at x.
double fitted_stddev(const FitResult& fit, double x);

}  // namespace qmetrix
