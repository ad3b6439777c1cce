#include "mmot/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mmot {

namespace {

using nlohmann::json;

DiscreteMarginal marginal_from_json(const json& j) {
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        return grid_marginal(g.at("low").get<std::vector<double>>(),
                             g.at("high").get<std::vector<double>>(),
                             g.at("n_per_axis").get<std::size_t>(),
                             g.value("density", std::string("uniform")));
    }
    auto points = j.at("points").get<std::vector<std::vector<double>>>();
    auto weights = j.at("weights").get<std::vector<double>>();
    const int dim = j.contains("dim") ? j.at("dim").get<int>()
                                      : static_cast<int>(points.at(0).size());
    return make_marginal(std::move(points), std::move(weights), dim);
}

} // namespace

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig cfg;
    if (!j.contains("marginals") || !j.at("marginals").is_array() ||
        j.at("marginals").size() < 2)
        throw std::invalid_argument("config needs a \"marginals\" array with >= 2 entries");
    for (const auto& m : j.at("marginals")) cfg.marginals.push_back(marginal_from_json(m));

    if (!j.contains("cost") || !j.at("cost").contains("name"))
        throw std::invalid_argument("config needs {\"cost\": {\"name\": ...}}");
    cfg.cost_name = j.at("cost").at("name").get<std::string>();
    if (j.at("cost").contains("lambda"))
        cfg.lambda = j.at("cost").at("lambda").get<std::vector<double>>();

    if (j.contains("eps_list")) cfg.eps_list = j.at("eps_list").get<std::vector<double>>();
    if (j.contains("epsilon")) cfg.epsilon = j.at("epsilon").get<double>();
    if (j.contains("delta")) cfg.delta = j.at("delta").get<double>();
    if (j.contains("slack")) cfg.slack = j.at("slack").get<double>();
    if (j.contains("mot0_override")) cfg.mot0_override = j.at("mot0_override").get<double>();
    if (j.contains("fit_window")) {
        auto w = j.at("fit_window").get<std::vector<double>>();
        if (w.size() != 2) throw std::invalid_argument("fit_window must be [lo, hi]");
        cfg.fit_window = std::make_pair(w[0], w[1]);
    }
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config(buf.str());
}

ProductSpace space_from_config(const RunConfig& cfg) {
    return make_space(cfg.marginals);
}

CostModel cost_from_config(const RunConfig& cfg, const ProductSpace& space) {
    const int m = static_cast<int>(space.arity());
    const int d = space.marginals[0].dim;
    CostModel cost = make_cost(cfg.cost_name, m, d, cfg.lambda);
    configure_shift(cost, space);
    return cost;
}

} // namespace mmot
