#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mmot/costs.hpp"
#include "mmot/measures.hpp"

namespace mmot {

// One JSON document drives every CLI subcommand. Marginals are either
// explicit point clouds or grid specs; the cost is selected by name.
struct RunConfig {
    std::vector<DiscreteMarginal> marginals;
    std::string cost_name;
    std::vector<double> lambda; // barycenter weights, optional
    std::vector<double> eps_list;
    std::optional<double> epsilon;
    std::optional<double> delta;
    std::optional<double> slack;
    std::optional<double> mot0_override;
    std::optional<std::pair<double, double>> fit_window;
    std::uint64_t seed = 0;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text);

ProductSpace space_from_config(const RunConfig& cfg);

// Builds the named cost for the config's arity/dimension and runs the
// attach-time shift check against the space.
CostModel cost_from_config(const RunConfig& cfg, const ProductSpace& space);

} // namespace mmot
