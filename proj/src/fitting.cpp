#include "qmetrix/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>

namespace qmetrix {

std::string_view to_string(FitFamily f)
{
    return f == FitFamily::QuadraticInvSqrt ? "quadratic" : "rational";
}

FitFamily fit_family_from_string(std::string_view name)
{
    if (name == "quadratic") return FitFamily::QuadraticInvSqrt;
    if (name == "rational") return FitFamily::RationalInvSqrt;
    throw std::invalid_argument("unknown fit family '" + std::string(name) + "'");
}

std::string_view to_string(QuadraticReading r)
{
    return r == QuadraticReading::InverseSqrt ? "inverse-sqrt" : "direct";
}

QuadraticReading quadratic_reading_from_string(std::string_view name)
{
    if (name == "inverse-sqrt") return QuadraticReading::InverseSqrt;
    if (name == "direct") return QuadraticReading::Direct;
    throw std::invalid_argument("unknown quadratic reading '" + std::string(name) + "'");
}

namespace {

std::vector<FitPoint> prepared(std::span<const FitPoint> points, std::size_t min_distinct)
{
    std::vector<FitPoint> p(points.begin(), points.end());
    for (const auto& pt : p)
        if (!std::isfinite(pt.x) || !std::isfinite(pt.stddev) || !(pt.stddev > 0.0))
            throw std::invalid_argument("fit points need finite x and positive stddev");
    // Canonical order makes the result independent of the input order.
    std::sort(p.begin(), p.end(), [](const FitPoint& a, const FitPoint& b) {
        return a.x != b.x ? a.x < b.x : a.stddev < b.stddev;
    });
    std::size_t distinct = p.empty() ? 0 : 1;
    for (std::size_t i = 1; i < p.size(); ++i)
        if (p[i].x != p[i - 1].x) ++distinct;
    if (distinct < min_distinct)
        throw std::invalid_argument("fit needs at least " + std::to_string(min_distinct) + " distinct abscissae");
    return p;
}

double inv_sq(double s) { return 1.0 / (s * s); }

void fill_stddev_residuals(FitResult& r, const std::vector<FitPoint>& p)
{
    double sq = 0.0;
    double worst = 0.0;
    for (const auto& pt : p) {
        const double pred = fitted_stddev(r, pt.x);
        sq += (pred - pt.stddev) * (pred - pt.stddev);
        worst = std::max(worst, std::abs(pred / pt.stddev - 1.0));
    }
    r.stddev_residual_norm = std::sqrt(sq);
    r.max_rel_stddev_error = worst;
}

struct InnerFit {
    Eigen::Vector3d coef;
    double sse;
};

InnerFit rational_inner(const std::vector<FitPoint>& p, double d)
{
    const auto n = static_cast<Eigen::Index>(p.size());
    Eigen::MatrixXd a(n, 3);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = p[static_cast<std::size_t>(i)].x;
        const double den = x + d;
        a(i, 0) = x * x / den;
        a(i, 1) = x / den;
        a(i, 2) = 1.0 / den;
        y(i) = inv_sq(p[static_cast<std::size_t>(i)].stddev);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < 3) return {Eigen::Vector3d::Zero(), std::numeric_limits<double>::infinity()};
    const Eigen::Vector3d coef = qr.solve(y);
    return {coef, (a * coef - y).squaredNorm()};
}

struct RationalFunctor {
    using Scalar = double;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;

    const std::vector<FitPoint>& points;

    int inputs() const { return 4; }
    int values() const { return static_cast<int>(points.size()); }

    int operator()(const Eigen::VectorXd& q, Eigen::VectorXd& f) const
    {
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double x = points[i].x;
            f(static_cast<Eigen::Index>(i)) = (q(0) * x * x + q(1) * x + q(2)) / (x + q(3)) - inv_sq(points[i].stddev);
        }
        return 0;
    }

    int df(const Eigen::VectorXd& q, Eigen::MatrixXd& jac) const
    {
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double x = points[i].x;
            const double den = x + q(3);
            const auto r = static_cast<Eigen::Index>(i);
            jac(r, 0) = x * x / den;
            jac(r, 1) = x / den;
            jac(r, 2) = 1.0 / den;
            jac(r, 3) = -(q(0) * x * x + q(1) * x + q(2)) / (den * den);
        }
        return 0;
    }
};

}  // namespace

double fitted_stddev(const FitResult& fit, double x)
{
    const auto& q = fit.params;
    if (fit.family == FitFamily::QuadraticInvSqrt) {
        const double v = q[0] * x * x + q[1] * x + q[2];
        return fit.reading == QuadraticReading::Direct ? v : 1.0 / std::sqrt(v);
    }
    return 1.0 / std::sqrt((q[0] * x * x + q[1] * x + q[2]) / (x + q[3]));
}

FitResult fit_quadratic(std::span<const FitPoint> points, QuadraticReading reading)
{
    const auto p = prepared(points, 3);
    const auto n = static_cast<Eigen::Index>(p.size());
    Eigen::MatrixXd a(n, 3);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& pt = p[static_cast<std::size_t>(i)];
        a(i, 0) = pt.x * pt.x;
        a(i, 1) = pt.x;
        a(i, 2) = 1.0;
        y(i) = reading == QuadraticReading::Direct ? pt.stddev : inv_sq(pt.stddev);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < 3) throw std::runtime_error("rank-deficient design matrix");
    const Eigen::Vector3d coef = qr.solve(y);
    FitResult r{FitFamily::QuadraticInvSqrt, reading, {coef(0), coef(1), coef(2)}, (a * coef - y).norm(), 0.0, 0.0,
                p.size()};
    fill_stddev_residuals(r, p);
    return r;
}

FitResult fit_rational(std::span<const FitPoint> points)
{
    const auto p = prepared(points, 4);
    const double x_min = p.front().x;
    const double span = std::max(1.0, p.back().x - x_min);

    // d = -x_min + s with s > 0 keeps every denominator positive.
    const int scan = 600;
    const double log_lo = std::log(1e-8 * span);
    const double log_hi = std::log(1e4 * span);
    auto sse_at = [&](double log_s) { return rational_inner(p, -x_min + std::exp(log_s)).sse; };
    int best = -1;
    double best_sse = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= scan; ++i) {
        const double v = sse_at(log_lo + (log_hi - log_lo) * i / scan);
        if (v < best_sse) {
            best_sse = v;
            best = i;
        }
    }
    if (best < 0) throw std::runtime_error("no bracket with a positive denominator gives a solvable fit");

    const double step = (log_hi - log_lo) / scan;
    double lo = log_lo + step * std::max(0, best - 1);
    double hi = log_lo + step * std::min(scan, best + 1);
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - ratio * (hi - lo), d = lo + ratio * (hi - lo);
    double fc = sse_at(c), fd = sse_at(d);
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        if (fc < fd) {
            hi = d, d = c, fd = fc;
            c = hi - ratio * (hi - lo);
            fc = sse_at(c);
        } else {
            lo = c, c = d, fc = fd;
            d = lo + ratio * (hi - lo);
            fd = sse_at(d);
        }
    }
    const double d_best = -x_min + std::exp(fc < fd ? c : d);
    const auto inner = rational_inner(p, d_best);
    Eigen::VectorXd q(4);
    q << inner.coef(0), inner.coef(1), inner.coef(2), d_best;
    double sse = inner.sse;

    bool converged = true;
    if (sse > 0.0) {
        RationalFunctor functor{p};
        Eigen::LevenbergMarquardt<RationalFunctor> lm(functor);
        lm.parameters.xtol = 1e-15;
        lm.parameters.ftol = 1e-15;
        Eigen::VectorXd polished = q;
        const auto status = lm.minimize(polished);
        Eigen::VectorXd f(static_cast<Eigen::Index>(p.size()));
        functor(polished, f);
        const bool valid = polished.allFinite() && x_min + polished(3) > 0.0 && f.squaredNorm() <= sse;
        if (valid) {
            q = polished;
            sse = f.squaredNorm();
        }
        // Codes 6-8 mean the tolerances hit machine precision, which is fine here.
        using Space = Eigen::LevenbergMarquardtSpace::Status;
        converged = status != Space::ImproperInputParameters && status != Space::TooManyFunctionEvaluation
                    && status != Space::UserAsked;
    }

    // A numerator with root -d cancels the pole, leaving d unidentifiable.
    const double dd = q(3);
    const double at_pole = q(0) * dd * dd - q(1) * dd + q(2);
    const double scale = std::abs(q(0)) * dd * dd + std::abs(q(1) * dd) + std::abs(q(2));
    if (!(scale > 0.0) || std::abs(at_pole) <= 1e-8 * scale)
        throw std::runtime_error("degenerate rational fit: numerator cancels the denominator");

    FitResult r{FitFamily::RationalInvSqrt, QuadraticReading::InverseSqrt, {q(0), q(1), q(2), q(3)}, std::sqrt(sse),
                0.0, 0.0, p.size(), converged};
    fill_stddev_residuals(r, p);
    return r;
}

}  // namespace qmetrix
