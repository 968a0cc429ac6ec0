#include "qmetrix/serialization.hpp"

#include <stdexcept>
#include <string>

namespace qmetrix {

nlohmann::json probe_to_json(const Generator& g, const ProbeState& state)
{
    if (state.parties() != g.parties() || state.local_dim() != g.local_dim())
        throw std::invalid_argument("state (N, d) does not match generator (N, d)");
    nlohmann::json j;
    j["parties"] = g.parties();
    j["local_dim"] = g.local_dim();
    j["kind"] = std::string(to_string(g.kind()));
    j["local_eigenvalues"] = g.local_eigenvalues();
    j["weights"] = std::vector<double>(state.weights().begin(), state.weights().end());
    return j;
}

std::pair<Generator, ProbeState> probe_from_json(const nlohmann::json& j)
{
    try {
        const int parties = j.at("parties").get<int>();
        const int local_dim = j.at("local_dim").get<int>();
        const auto kind = spectrum_kind_from_string(j.at("kind").get<std::string>());
        auto eig = j.at("local_eigenvalues").get<std::vector<double>>();
        Generator g(parties, local_dim, kind, std::move(eig));
        if (kind == SpectrumKind::SpinRescaled) {
            const auto expected = make_generator(parties, local_dim, kind);
            if (expected.local_eigenvalues() != g.local_eigenvalues())
                throw std::invalid_argument("spin-rescaled eigenvalues are not evenly spaced over [-1, 1]");
        }
        auto state = ProbeState::from_weights(parties, local_dim, j.at("weights").get<std::vector<double>>());
        return {std::move(g), std::move(state)};
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed probe JSON: ") + e.what());
    }
}

}  // namespace qmetrix
