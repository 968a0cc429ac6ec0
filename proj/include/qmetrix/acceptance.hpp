#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace qmetrix {

struct AcceptanceOptions {
    int threads = 1;
    std::uint64_t seed = 20240611;
    std::uint64_t nu_small = 100000;
    std::uint64_t nu_large = 1000000;
    /// Criterion ids to run; empty runs all ten.
    std::vector<int> only;
};

struct CriterionOutcome {
    int id;
    std::string title;
    bool passed;
    std::string summary;
    /// Per-point diagnostics and informational comparisons.
    std::vector<std::string> notes;
    double seconds;
};

/// Runs the end-to-end acceptance checks. Writes one "criterion <id> PASS|FAIL"
/// line per criterion to `out` as each finishes, preceded by its notes.
std::vector<CriterionOutcome> run_acceptance(const AcceptanceOptions& options, std::ostream& out);

}  // namespace qmetrix
