#include "mmot/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>

namespace mmot {

BoxPartition box_partition(const DiscreteMarginal& marginal, double delta) {
    if (delta <= 0.0) throw std::invalid_argument("delta must be positive");
    const int d = marginal.dim;
    const double edge = delta / std::sqrt(static_cast<double>(d));
    BoxPartition part;
    part.delta = delta;
    part.anchor.assign(d, std::numeric_limits<double>::infinity());
    for (const auto& p : marginal.points)
        for (int a = 0; a < d; ++a) part.anchor[a] = std::min(part.anchor[a], p[a]);

    std::map<std::vector<long long>, std::size_t> ids;
    part.cell_of.resize(marginal.size());
    for (std::size_t k = 0; k < marginal.size(); ++k) {
        std::vector<long long> key(d);
        for (int a = 0; a < d; ++a)
            key[a] = static_cast<long long>(
                std::floor((marginal.points[k][a] - part.anchor[a]) / edge));
        auto [it, inserted] = ids.try_emplace(key, part.cells.size());
        if (inserted) part.cells.emplace_back();
        part.cell_of[k] = it->second;
        part.cells[it->second].push_back(k);
    }
    return part;
}

double entropy_H_delta(const DiscreteMarginal& marginal, double delta) {
    const BoxPartition part = box_partition(marginal, delta);
    double h = 0.0;
    for (const auto& cell : part.cells) {
        double mass = 0.0;
        for (std::size_t k : cell) mass += marginal.weights[k];
        if (mass > 0.0) h -= mass * std::log(mass);
    }
    return h;
}

BlockPlan block_approximation(const Coupling& gamma0,
                              const std::vector<BoxPartition>& partitions) {
    const std::size_t m = gamma0.space.arity();
    if (partitions.size() != m)
        throw std::invalid_argument("need one partition per marginal");
    const auto shape = gamma0.space.shape();
    for (std::size_t i = 0; i < m; ++i)
        if (partitions[i].cell_of.size() != shape[i])
            throw std::invalid_argument("partition does not match marginal atom count");

    BlockPlan plan;
    plan.cell_counts.resize(m);
    std::vector<std::size_t> cstride(m, 1);
    for (std::size_t i = 0; i < m; ++i) plan.cell_counts[i] = partitions[i].cells.size();
    for (std::size_t a = m; a-- > 1;)
        cstride[a - 1] = cstride[a] * plan.cell_counts[a];
    plan.block_masses.assign(cstride[0] * plan.cell_counts[0], 0.0);

    auto block_of = [&](const std::vector<std::size_t>& idx) {
        std::size_t f = 0;
        for (std::size_t i = 0; i < m; ++i) f += partitions[i].cell_of[idx[i]] * cstride[i];
        return f;
    };

    std::vector<std::size_t> idx(m, 0);
    std::size_t flat = 0;
    do {
        plan.block_masses[block_of(idx)] += gamma0.density[flat++];
    } while (next_index(idx, shape));

    // Per-marginal cell masses for the normalized restrictions.
    std::vector<std::vector<double>> cell_mass(m);
    for (std::size_t i = 0; i < m; ++i) {
        cell_mass[i].assign(plan.cell_counts[i], 0.0);
        const auto& w = gamma0.space.marginals[i].weights;
        for (std::size_t k = 0; k < shape[i]; ++k)
            cell_mass[i][partitions[i].cell_of[k]] += w[k];
    }

    Tensor density(shape);
    idx.assign(m, 0);
    flat = 0;
    do {
        const double bm = plan.block_masses[block_of(idx)];
        if (bm > 0.0) {
            double v = bm;
            for (std::size_t i = 0; i < m; ++i) {
                const auto& w = gamma0.space.marginals[i].weights;
                const double cm = cell_mass[i][partitions[i].cell_of[idx[i]]];
                v *= (cm > 0.0) ? w[idx[i]] / cm : 0.0;
            }
            density[flat] = v;
        }
        ++flat;
    } while (next_index(idx, shape));

    plan.coupling = Coupling{gamma0.space, std::move(density)};
    plan.partitions = partitions;
    return plan;
}

BlockBoundsReport verify_block_bounds(const BlockPlan& plan, const Coupling& gamma0,
                                      const Tensor& cost, double eps, double delta,
                                      const SinkhornConfig& solver) {
    BlockBoundsReport rep;
    const std::size_t m = gamma0.space.arity();

    rep.entropy_gamma_delta = relative_entropy(plan.coupling);
    std::size_t jstar = 0;
    for (std::size_t i = 1; i < m; ++i)
        if (gamma0.space.marginals[i].dim > gamma0.space.marginals[jstar].dim) jstar = i;
    rep.excluded_marginal = jstar;
    rep.entropy_bound = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (i == jstar) continue;
        rep.entropy_bound += entropy_H_delta(gamma0.space.marginals[i], delta);
    }
    rep.entropy_bound_ok = rep.entropy_gamma_delta <= rep.entropy_bound + 1e-9;

    rep.cost_gamma0 = cost_integral(gamma0, cost);
    rep.cost_gamma_delta = cost_integral(plan.coupling, cost);
    rep.cost_increase = rep.cost_gamma_delta - rep.cost_gamma0;

    // Sampled Lipschitz estimate from within-block pairs: both tuples share
    // every coordinate cell, so their displacement is <= delta per factor.
    std::mt19937_64 rng(12345);
    double lip = 0.0;
    for (int trial = 0; trial < 512; ++trial) {
        std::vector<std::size_t> a(m), b(m);
        double disp = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const auto& cells = plan.partitions[i].cells;
            const auto& cell = cells[rng() % cells.size()];
            a[i] = cell[rng() % cell.size()];
            b[i] = cell[rng() % cell.size()];
            const auto& pa = gamma0.space.marginals[i].points[a[i]];
            const auto& pb = gamma0.space.marginals[i].points[b[i]];
            double s = 0.0;
            for (std::size_t k = 0; k < pa.size(); ++k) s += (pa[k] - pb[k]) * (pa[k] - pb[k]);
            disp = std::max(disp, std::sqrt(s));
        }
        if (disp <= 0.0) continue;
        const double dc = std::fabs(cost.at(a) - cost.at(b));
        lip = std::max(lip, dc / disp);
    }
    rep.lipschitz_estimate = lip * delta;

    rep.competitor = rep.cost_gamma_delta + eps * rep.entropy_gamma_delta;
    SinkhornConfig cfg = solver;
    cfg.epsilon = eps;
    rep.mot_eps = sinkhorn_solve(gamma0.space, cost, cfg).dual_value;
    rep.competitor_ok = rep.mot_eps <= rep.competitor + 1e-7;
    return rep;
}

} // namespace mmot
