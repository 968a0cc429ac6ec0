#include "qmetrix/analytic_laws.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace qmetrix {

namespace {

void require_ggm_range(double G)
{
    if (!(G >= 0.0 && G <= 0.5)) throw std::domain_error("GGM must lie in [0, 1/2]");
}

double corner_coherence(double G)
{
    const double u = 1.0 - 2.0 * G;
    return std::sqrt(std::max(0.0, 1.0 - u * u));
}

}  // namespace

double q_opt_ggm(double G)
{
    require_ggm_range(G);
    return 8.0 * (1.0 + corner_coherence(G));
}

double inverse_binary_entropy(double S)
{
    if (!(S >= 0.0 && S <= 1.0)) throw std::domain_error("entropy must lie in [0, 1]");
    if (S == 0.0) return 0.0;
    if (S == 1.0) return 0.5;
    double lo = 0.0;
    double hi = 0.5;
    for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (binary_entropy(mid) < S ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double lambda_of_q(double q)
{
    if (!(q >= 8.0 && q <= 16.0)) throw std::domain_error("lambda_Q is defined for Q in [8, 16]");
    const double u = 1.0 - q / 8.0;
    return 0.5 * (1.0 - std::sqrt(std::max(0.0, 1.0 - u * u)));
}

double q_opt_entropy(double S)
{
    return q_opt_ggm(inverse_binary_entropy(S));
}

ProbeState optimal_state_ggm(double G, int local_dim)
{
    require_ggm_range(G);
    if (local_dim < 2 || local_dim > 5) throw std::domain_error("optimal corner states are provided for d in 2..5");
    const auto d = static_cast<std::size_t>(local_dim);
    const double x = corner_coherence(G);
    std::vector<double> w(d * d, 0.0);
    const std::size_t top = d - 1;
    w[0] = 0.25 * (1.0 + x);
    w[top * d + top] = 0.25 * (1.0 + x);
    w[top] = 0.25 * (1.0 - x);
    w[top * d] = 0.25 * (1.0 - x);
    return ProbeState::from_weights(2, local_dim, std::move(w));
}

ProbeState optimal_state_entropy(double S, int local_dim)
{
    return optimal_state_ggm(inverse_binary_entropy(S), local_dim);
}

double q_opt_unequal_d3(double G)
{
    require_ggm_range(G);
    return 4.5 * (1.0 + corner_coherence(G));
}

double sql(int parties)
{
    if (parties < 1) throw std::domain_error("N must be >= 1");
    return 4.0 * parties;
}

double hl(int parties)
{
    if (parties < 1) throw std::domain_error("N must be >= 1");
    return 4.0 * parties * parties;
}

std::string_view to_string(BoundaryCase c)
{
    switch (c) {
    case BoundaryCase::DiagonalCornerMissing: return "diagonal-corner-missing";
    case BoundaryCase::OffDiagonalZeroSplit: return "off-diagonal-zero-split";
    case BoundaryCase::OffDiagonalZeroSymmetric: return "off-diagonal-zero-symmetric";
    case BoundaryCase::OffDiagonalPairZero: return "off-diagonal-pair-zero";
    }
    return "unknown";
}

double boundary_qfi(double param, BoundaryCase c)
{
    if (c == BoundaryCase::OffDiagonalZeroSplit) {
        if (!(param >= 0.0 && param <= 0.5)) throw std::domain_error("w0 must lie in [0, 1/2]");
        const double u = 1.0 - 4.0 * param;
        return 8.0 - 4.0 * u * u;
    }
    if (!(param > 0.0 && param < 0.5)) throw std::domain_error("boundary families need G in (0, 1/2)");
    const double x = corner_coherence(param);
    switch (c) {
    case BoundaryCase::DiagonalCornerMissing: return 16.0 * (x - x * x);
    case BoundaryCase::OffDiagonalZeroSymmetric: return 16.0 * x;
    case BoundaryCase::OffDiagonalPairZero: return 16.0 * x * x;
    default: break;
    }
    throw std::invalid_argument("unknown boundary case");
}

LawCurvePoint law_point(Measure measure, double value, bool unequal_d3)
{
    double q = 0.0;
    switch (measure) {
    case Measure::GGM:
    case Measure::GM:  // GM and GGM coincide for two parties.
        q = unequal_d3 ? q_opt_unequal_d3(value) : q_opt_ggm(value);
        break;
    case Measure::Entropy:
        if (unequal_d3) {
            const double lambda = inverse_binary_entropy(value);
            q = q_opt_unequal_d3(lambda);
        } else {
            q = q_opt_entropy(value);
        }
        break;
    }
    return {{measure, value}, q, cramer_rao_stddev(q)};
}

}  // namespace qmetrix
