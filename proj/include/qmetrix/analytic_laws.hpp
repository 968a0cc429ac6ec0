#pragma once

#include <string_view>

#include "qmetrix/core_states.hpp"
#include "qmetrix/entanglement.hpp"

namespace qmetrix {

struct LawCurvePoint {
    EntanglementValue entanglement;
    double q_opt;
    double stddev;
};

/// Optimal QFI of a two-party probe at fixed GGM G in [0, 1/2]:
/// 8 (1 + sqrt(1 - (1 - 2G)^2)). Holds for d = 2 Pauli-Z and for rescaled
/// spin generators with d = 3, 4, 5.
double q_opt_ggm(double G);

/// Optimal QFI at fixed entanglement entropy S in [0, 1]. Inverts the binary
/// entropy on [0, 1/2] by bisection, then evaluates the GGM law at the root.
double q_opt_entropy(double S);

/// lambda such that binary_entropy(lambda) = S, lambda in [0, 1/2].
double inverse_binary_entropy(double S);

/// lambda_Q = (1 - sqrt(1 - (1 - Q/8)^2)) / 2 for Q in [8, 16].
double lambda_of_q(double q);

/// Optimal two-party probe at fixed GGM: weight (1 + x)/4 on the corners
/// (0,0), (d-1,d-1) and (1 - x)/4 on (0,d-1), (d-1,0), x = sqrt(1-(1-2G)^2).
/// Every other weight is zero. d in {2, ..., 5}.
ProbeState optimal_state_ggm(double G, int local_dim);

/// Same corner family at fixed entropy S in [0, 1].
ProbeState optimal_state_entropy(double S, int local_dim);

/// Law quoted for the d = 3 local spectrum (0, 2, 3):
/// 4.5 (1 + sqrt(1 - (1 - 2G)^2)) = 0.5625 q_opt_ggm(G).
double q_opt_unequal_d3(double G);

/// Product-probe and cat-probe limits for N Pauli-Z qubits: 4N and 4N^2.
double sql(int parties);
double hl(int parties);

/// Boundary families of the two-qubit weight simplex.
enum class BoundaryCase {
    /// w1 = w2 with w0 or w3 vanishing: 16 (x - x^2).
    DiagonalCornerMissing,
    /// w1 or w2 vanishing, w3 = 1/2 - w0: 8 - 4 (1 - 4 w0)^2. Parametrized by w0.
    OffDiagonalZeroSplit,
    /// w1 or w2 vanishing, w3 = w0: 16 x.
    OffDiagonalZeroSymmetric,
    /// w1 = w2 = 0: 16 x^2.
    OffDiagonalPairZero,
};

inline constexpr BoundaryCase kAllBoundaryCases[] = {
    BoundaryCase::DiagonalCornerMissing,
    BoundaryCase::OffDiagonalZeroSplit,
    BoundaryCase::OffDiagonalZeroSymmetric,
    BoundaryCase::OffDiagonalPairZero,
};

std::string_view to_string(BoundaryCase c);

/// QFI along a boundary family. `param` is G in (0, 1/2), except for
/// OffDiagonalZeroSplit where it is w0 in [0, 1/2].
double boundary_qfi(double param, BoundaryCase c);

/// Tabulated law curve for the CLI. `unequal_d3` applies only to GGM.
LawCurvePoint law_point(Measure measure, double value, bool unequal_d3 = false);

}  // namespace qmetrix
