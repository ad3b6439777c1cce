#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmot/analysis.hpp"
#include "mmot/approx.hpp"
#include "mmot/costs.hpp"
#include "mmot/entropic.hpp"
#include "mmot/exact.hpp"
#include "mmot/harness.hpp"
#include "mmot/io.hpp"
#include "mmot/measures.hpp"

namespace {

using nlohmann::json;

void write_json(const std::string& path, const json& j) {
    if (path.empty()) return;
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << j.dump(2) << '\n';
}

json potentials_json(const mmot::PotentialSet& p) {
    json out = json::array();
    for (const auto& phi : p.phis) out.push_back(phi);
    return out;
}

// LP support tuples when the instance fits the LP guard, plus seeded random
// grid tuples.
std::vector<mmot::PointTuple> sample_points(const mmot::ProductSpace& space,
                                            const mmot::Tensor& cost, int extra,
                                            std::uint64_t seed) {
    std::vector<mmot::PointTuple> pts;
    if (cost.size() <= mmot::kLPVariableGuard) {
        const auto lp = mmot::lp_solve(space, cost);
        if (lp.status == mmot::LPStatus::optimal)
            for (const auto& idx : lp.support) pts.push_back(tuple_points(space, idx));
    }
    std::mt19937_64 rng(seed);
    const auto shape = space.shape();
    for (int t = 0; t < extra; ++t) {
        std::vector<std::size_t> idx(shape.size());
        for (std::size_t i = 0; i < shape.size(); ++i) idx[i] = rng() % shape[i];
        pts.push_back(tuple_points(space, idx));
    }
    return pts;
}

int cmd_solve(const std::string& config_path, std::optional<double> eps_flag,
              const std::string& out) {
    const auto cfg = mmot::load_config(config_path);
    const auto space = mmot::space_from_config(cfg);
    auto cost = mmot::cost_from_config(cfg, space);
    const auto tensor = mmot::evaluate_on_grid(cost, space);
    mmot::SinkhornConfig sc;
    if (eps_flag)
        sc.epsilon = *eps_flag;
    else if (cfg.epsilon)
        sc.epsilon = *cfg.epsilon;
    else
        throw std::invalid_argument("solve needs --epsilon or \"epsilon\" in the config");
    const auto sol = mmot::sinkhorn_solve(space, tensor, sc);
    std::cout << "epsilon        " << sol.epsilon << "\n"
              << "dual value     " << sol.dual_value << "\n"
              << "primal value   " << sol.primal_value << "\n"
              << "entropy        " << sol.entropy << "\n"
              << "sweeps         " << sol.sweeps << (sol.converged ? "" : " (not converged)")
              << "\n";
    std::cout << "marginal errors";
    for (double e : sol.marginal_errors) std::cout << ' ' << e;
    std::cout << "\n";
    json j{{"epsilon", sol.epsilon},
           {"dual_value", sol.dual_value},
           {"primal_value", sol.primal_value},
           {"entropy", sol.entropy},
           {"sweeps", sol.sweeps},
           {"converged", sol.converged},
           {"marginal_errors", sol.marginal_errors},
           {"potentials", potentials_json(sol.potentials)}};
    write_json(out, j);
    return sol.converged ? 0 : 2;
}

int cmd_exact(const std::string& config_path, const std::string& out) {
    const auto cfg = mmot::load_config(config_path);
    const auto space = mmot::space_from_config(cfg);
    auto cost = mmot::cost_from_config(cfg, space);
    const auto tensor = mmot::evaluate_on_grid(cost, space);
    const auto sol = mmot::lp_solve(space, tensor);
    if (sol.status != mmot::LPStatus::optimal)
        throw std::runtime_error(sol.status == mmot::LPStatus::infeasible_guard
                                     ? "instance exceeds the LP variable guard"
                                     : "LP hit its pivot limit");
    std::cout << "value      " << sol.value << "\n"
              << "iterations " << sol.iterations << "\n"
              << "support    " << sol.support.size() << " tuples\n";
    json support = json::array();
    for (const auto& idx : sol.support)
        support.push_back({{"index", idx}, {"mass", sol.coupling.density.at(idx)}});
    json j{{"value", sol.value},
           {"iterations", sol.iterations},
           {"support", support},
           {"potentials", potentials_json(sol.potentials)}};
    write_json(out, j);
    return 0;
}

int cmd_rate(const std::string& config_path, std::vector<double> eps_list,
             const std::string& out, const std::string& svg, int samples,
             std::uint64_t seed) {
    const auto cfg = mmot::load_config(config_path);
    const auto space = mmot::space_from_config(cfg);
    auto cost = mmot::cost_from_config(cfg, space);
    const auto tensor = mmot::evaluate_on_grid(cost, space);
    if (eps_list.empty()) eps_list = cfg.eps_list;
    if (eps_list.empty())
        throw std::invalid_argument("rate needs --eps-list or \"eps_list\" in the config");

    const auto table = mmot::rate_sweep(space, tensor, eps_list, {}, cfg.mot0_override);
    auto fit = cfg.fit_window ? mmot::fit_rate(table, *cfg.fit_window) : mmot::fit_rate(table);

    std::vector<int> dims;
    for (const auto& m : space.marginals) dims.push_back(m.dim);
    const auto points = sample_points(space, tensor, samples, seed);
    const auto kappa = mmot::kappa_estimate(cost, points, 32, seed);
    fit = mmot::compare_bounds(fit, dims, kappa.kappa, cfg.slack.value_or(0.3));

    std::string csv;
    if (!out.empty()) {
        csv = out;
        const auto dot = csv.find_last_of('.');
        if (dot != std::string::npos) csv.resize(dot);
        csv += ".csv";
    }
    mmot::emit_outputs(table, fit, csv, out, svg);

    std::cout << "MOT_0     " << table.mot_0 << "\n"
              << "fitted C  " << fit.C << "  (b " << fit.b << ", rms " << fit.residual_rms
              << ")\n"
              << "bounds    [" << fit.lower_bound << ", " << fit.upper_bound << "] slack "
              << fit.slack << (fit.matching ? "  (matching)" : "") << "\n"
              << "verdict   " << (fit.pass_lower && fit.pass_upper ? "pass" : "FAIL") << "\n";
    return (fit.pass_lower && fit.pass_upper) ? 0 : 2;
}

int cmd_signature(const std::string& config_path, int samples, std::uint64_t seed,
                  const std::string& out) {
    const auto cfg = mmot::load_config(config_path);
    const auto space = mmot::space_from_config(cfg);
    auto cost = mmot::cost_from_config(cfg, space);
    const auto tensor = mmot::evaluate_on_grid(cost, space);
    const auto points = sample_points(space, tensor, samples, seed);
    const auto est = mmot::kappa_estimate(cost, points, 32, seed);
    std::cout << "kappa    " << est.kappa << "\n"
              << "points   " << est.per_point.size() << "\n"
              << "strategy " << est.strategy << "\n";
    for (std::size_t k = 0; k < est.per_point.size(); ++k) {
        const auto& r = est.per_point[k];
        std::cout << "  point " << k << "  signature (" << r.sig[0] << ',' << r.sig[1] << ','
                  << r.sig[2] << ")  weights";
        for (double w : r.weights) std::cout << ' ' << w;
        std::cout << "\n";
    }
    json per_point = json::array();
    for (const auto& r : est.per_point)
        per_point.push_back({{"point", r.point},
                             {"weights", r.weights},
                             {"signature", r.sig},
                             {"eigenvalues", r.eigenvalues},
                             {"zero_threshold", r.zero_threshold}});
    write_json(out, json{{"kappa", est.kappa},
                         {"strategy", est.strategy},
                         {"per_point", per_point}});
    return 0;
}

int cmd_block(const std::string& config_path, std::optional<double> delta_flag,
              std::optional<double> eps_flag, const std::string& out) {
    const auto cfg = mmot::load_config(config_path);
    const auto space = mmot::space_from_config(cfg);
    auto cost = mmot::cost_from_config(cfg, space);
    const auto tensor = mmot::evaluate_on_grid(cost, space);
    const double delta = delta_flag ? *delta_flag
                                    : cfg.delta ? *cfg.delta
                                                : throw std::invalid_argument(
                                                      "block needs --delta or \"delta\"");
    const double eps = eps_flag ? *eps_flag
                                : cfg.epsilon ? *cfg.epsilon
                                              : throw std::invalid_argument(
                                                    "block needs --epsilon or \"epsilon\"");
    const auto lp = mmot::lp_solve(space, tensor);
    if (lp.status != mmot::LPStatus::optimal)
        throw std::runtime_error("block verification needs an exact LP plan");
    std::vector<mmot::BoxPartition> parts;
    for (const auto& m : space.marginals) parts.push_back(mmot::box_partition(m, delta));
    const auto plan = mmot::block_approximation(lp.coupling, parts);
    const auto rep = mmot::verify_block_bounds(plan, lp.coupling, tensor, eps, delta);
    std::cout << "Ent(gamma_delta)  " << rep.entropy_gamma_delta << "\n"
              << "entropy bound     " << rep.entropy_bound << " ("
              << (rep.entropy_bound_ok ? "ok" : "VIOLATED") << ")\n"
              << "cost increase     " << rep.cost_increase << " (Lipschitz estimate "
              << rep.lipschitz_estimate << ")\n"
              << "competitor        " << rep.competitor << " vs MOT_eps " << rep.mot_eps
              << " (" << (rep.competitor_ok ? "ok" : "VIOLATED") << ")\n";
    write_json(out, json{{"entropy_gamma_delta", rep.entropy_gamma_delta},
                         {"entropy_bound", rep.entropy_bound},
                         {"excluded_marginal", rep.excluded_marginal},
                         {"cost_gamma0", rep.cost_gamma0},
                         {"cost_gamma_delta", rep.cost_gamma_delta},
                         {"cost_increase", rep.cost_increase},
                         {"lipschitz_estimate", rep.lipschitz_estimate},
                         {"competitor", rep.competitor},
                         {"mot_eps", rep.mot_eps},
                         {"entropy_bound_ok", rep.entropy_bound_ok},
                         {"competitor_ok", rep.competitor_ok}});
    return (rep.entropy_bound_ok && rep.competitor_ok) ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"discrete multi-marginal optimal transport toolkit"};
    app.require_subcommand(1);

    std::string config_path, out, svg;
    std::optional<double> epsilon, delta;
    std::vector<double> eps_list;
    int samples = 16;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config path")->required();
        sub->add_option("--out", out, "output JSON path");
        sub->add_option("--seed", seed, "seed for all randomness");
    };

    auto* solve = app.add_subcommand("solve", "entropic solve at one epsilon");
    add_common(solve);
    solve->add_option("--epsilon", epsilon, "regularization strength");

    auto* exact = app.add_subcommand("exact", "exact LP solve");
    add_common(exact);

    auto* rate = app.add_subcommand("rate", "rate sweep, fit and bound check");
    add_common(rate);
    rate->add_option("--eps-list", eps_list, "descending epsilon list")->delimiter(',');
    rate->add_option("--svg", svg, "SVG chart path");
    rate->add_option("--samples", samples, "extra random sample points for kappa");

    auto* sig = app.add_subcommand("signature", "signature and kappa report");
    add_common(sig);
    sig->add_option("--samples", samples, "extra random sample points");

    auto* block = app.add_subcommand("block", "block approximation verification");
    add_common(block);
    block->add_option("--delta", delta, "partition diameter");
    block->add_option("--epsilon", epsilon, "regularization strength");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(config_path, epsilon, out);
        if (exact->parsed()) return cmd_exact(config_path, out);
        if (rate->parsed()) return cmd_rate(config_path, eps_list, out, svg, samples, seed);
        if (sig->parsed()) return cmd_signature(config_path, samples, seed, out);
        if (block->parsed()) return cmd_block(config_path, delta, epsilon, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
