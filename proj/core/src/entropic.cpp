#include "mmot/entropic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mmot {

namespace {

// Streaming max-subtracted log-sum-exp accumulators per slice along axis i.
// Walks the tensor once in flat order; for every entry the slice id is the
// i-th index. At the end phi_i[k] = -(M[k] + eps * log(S[k])).
void softmin_update(std::vector<std::vector<double>>& phis, const Tensor& cost,
                    const ProductSpace& space, double eps, std::size_t i) {
    const auto& shape = cost.shape();
    const std::size_t m = shape.size();
    const std::size_t n_i = shape[i];
    const std::size_t n_last = shape[m - 1];
    const std::size_t outer = cost.size() / n_last;
    std::vector<double> M(n_i, -std::numeric_limits<double>::infinity());
    std::vector<double> S(n_i, 0.0);

    std::vector<std::size_t> idx(m, 0);
    const bool i_is_last = (i == m - 1);
    const double* c = cost.data().data();
    const double* phi_last = phis[m - 1].data();
    const double* w_last = space.marginals[m - 1].weights.data();
    std::size_t flat = 0;
    for (std::size_t o = 0; o < outer; ++o) {
        double base_phi = 0.0, base_w = 1.0;
        for (std::size_t a = 0; a + 1 < m; ++a) {
            if (a == i) continue;
            base_phi += phis[a][idx[a]];
            base_w *= space.marginals[a].weights[idx[a]];
        }
        if (i_is_last) {
            for (std::size_t k = 0; k < n_last; ++k) {
                const double arg = base_phi - c[flat + k];
                if (arg <= M[k]) {
                    S[k] += base_w * std::exp((arg - M[k]) / eps);
                } else {
                    S[k] = S[k] * std::exp((M[k] - arg) / eps) + base_w;
                    M[k] = arg;
                }
            }
        } else {
            const std::size_t ki = idx[i];
            double lm = M[ki], ls = S[ki];
            for (std::size_t k = 0; k < n_last; ++k) {
                const double arg = base_phi + phi_last[k] - c[flat + k];
                const double w = base_w * w_last[k];
                if (arg <= lm) {
                    ls += w * std::exp((arg - lm) / eps);
                } else {
                    ls = ls * std::exp((lm - arg) / eps) + w;
                    lm = arg;
                }
            }
            M[ki] = lm;
            S[ki] = ls;
        }
        flat += n_last;
        for (std::size_t a = m - 1; a-- > 0;) {
            if (++idx[a] < shape[a]) break;
            idx[a] = 0;
        }
    }

    auto& phi = phis[i];
    for (std::size_t k = 0; k < n_i; ++k) {
        const double v = -(M[k] + eps * std::log(S[k]));
        if (!std::isfinite(v))
            throw std::runtime_error(
                "sinkhorn produced a non-finite potential (epsilon too small "
                "for double range) at marginal " + std::to_string(i));
        phi[k] = v;
    }
}

// L1 marginal errors of the plan induced by the potentials, one pass.
std::vector<double> plan_marginal_errors(const std::vector<std::vector<double>>& phis,
                                         const Tensor& cost, const ProductSpace& space,
                                         double eps) {
    const auto& shape = cost.shape();
    const std::size_t m = shape.size();
    std::vector<std::vector<double>> proj(m);
    for (std::size_t i = 0; i < m; ++i) proj[i].assign(shape[i], 0.0);
    const std::size_t n_last = shape[m - 1];
    const std::size_t outer = cost.size() / n_last;
    std::vector<std::size_t> idx(m, 0);
    const double* c = cost.data().data();
    const double* phi_last = phis[m - 1].data();
    const double* w_last = space.marginals[m - 1].weights.data();
    std::size_t flat = 0;
    for (std::size_t o = 0; o < outer; ++o) {
        double base_phi = 0.0, base_w = 1.0;
        for (std::size_t a = 0; a + 1 < m; ++a) {
            base_phi += phis[a][idx[a]];
            base_w *= space.marginals[a].weights[idx[a]];
        }
        double row_sum = 0.0;
        double* proj_last = proj[m - 1].data();
        for (std::size_t k = 0; k < n_last; ++k) {
            const double g =
                base_w * w_last[k] * std::exp((base_phi + phi_last[k] - c[flat + k]) / eps);
            row_sum += g;
            proj_last[k] += g;
        }
        for (std::size_t a = 0; a + 1 < m; ++a) proj[a][idx[a]] += row_sum;
        flat += n_last;
        for (std::size_t a = m - 1; a-- > 0;) {
            if (++idx[a] < shape[a]) break;
            idx[a] = 0;
        }
    }
    std::vector<double> errs(m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < shape[i]; ++k)
            errs[i] += std::fabs(proj[i][k] - space.marginals[i].weights[k]);
    return errs;
}

} // namespace

PotentialSet sinkhorn_sweep(const PotentialSet& p, const Tensor& cost,
                            const ProductSpace& space, double eps) {
    if (cost.shape() != space.shape())
        throw std::invalid_argument("cost tensor shape does not match space");
    if (p.phis.size() != space.arity())
        throw std::invalid_argument("potential arity mismatch");
    PotentialSet out = p;
    for (std::size_t i = 0; i < space.arity(); ++i)
        softmin_update(out.phis, cost, space, eps, i);
    return out;
}

Coupling plan_from_potentials(const PotentialSet& p, const Tensor& cost,
                              const ProductSpace& space, double eps) {
    const auto& shape = cost.shape();
    Tensor density(shape);
    std::vector<std::size_t> idx(shape.size(), 0);
    std::size_t flat = 0;
    do {
        double s = 0.0, w = 1.0;
        for (std::size_t a = 0; a < shape.size(); ++a) {
            s += p.phis[a][idx[a]];
            w *= space.marginals[a].weights[idx[a]];
        }
        const double expo = (s - cost[flat]) / eps;
        if (expo > 700.0)
            throw std::runtime_error("plan exponent overflow (eps too small for grid)");
        density[flat] = w * std::exp(expo);
        ++flat;
    } while (next_index(idx, shape));
    return Coupling{space, std::move(density)};
}

EntropicSolution sinkhorn_solve(const ProductSpace& space, const Tensor& cost,
                                const SinkhornConfig& config) {
    if (config.epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");
    if (config.marginal_tol <= 0.0 || config.resolved_potential_tol() <= 0.0)
        throw std::invalid_argument("tolerances must be positive");
    if (cost.shape() != space.shape())
        throw std::invalid_argument("cost tensor shape does not match space");

    // Zero-weight atoms would put a log(0) into every update; strip them and
    // re-embed the potentials afterwards.
    bool has_zero = false;
    for (const auto& m : space.marginals)
        for (double w : m.weights)
            if (w == 0.0) has_zero = true;
    if (has_zero) {
        const std::size_t m = space.arity();
        std::vector<std::vector<std::size_t>> keep(m);
        std::vector<DiscreteMarginal> reduced(m);
        for (std::size_t i = 0; i < m; ++i) {
            const auto& mi = space.marginals[i];
            for (std::size_t k = 0; k < mi.size(); ++k)
                if (mi.weights[k] > 0.0) {
                    keep[i].push_back(k);
                    reduced[i].points.push_back(mi.points[k]);
                    reduced[i].weights.push_back(mi.weights[k]);
                }
            reduced[i].dim = mi.dim;
        }
        ProductSpace rspace{std::move(reduced)};
        Tensor rcost(rspace.shape());
        std::vector<std::size_t> ridx(m, 0);
        std::size_t rflat = 0;
        do {
            std::vector<std::size_t> full(m);
            for (std::size_t i = 0; i < m; ++i) full[i] = keep[i][ridx[i]];
            rcost[rflat++] = cost.at(full);
        } while (next_index(ridx, rspace.shape()));
        SinkhornConfig rconfig = config;
        if (rconfig.warm_start) {
            PotentialSet rw;
            rw.phis.resize(m);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t k : keep[i])
                    rw.phis[i].push_back(config.warm_start->phis[i][k]);
            rconfig.warm_start = std::move(rw);
        }
        EntropicSolution rsol = sinkhorn_solve(rspace, rcost, rconfig);
        EntropicSolution sol = rsol;
        sol.potentials.phis.assign(space.arity(), {});
        for (std::size_t i = 0; i < m; ++i) {
            sol.potentials.phis[i].assign(space.marginals[i].size(), 0.0);
            for (std::size_t k = 0; k < keep[i].size(); ++k)
                sol.potentials.phis[i][keep[i][k]] = rsol.potentials.phis[i][k];
        }
        return sol;
    }

    const double eps = config.epsilon;
    const double ptol = config.resolved_potential_tol();
    PotentialSet p;
    if (config.warm_start) {
        p = *config.warm_start;
        if (p.phis.size() != space.arity())
            throw std::invalid_argument("warm start arity mismatch");
    } else {
        p.phis.resize(space.arity());
        for (std::size_t i = 0; i < space.arity(); ++i)
            p.phis[i].assign(space.marginals[i].size(), 0.0);
    }

    EntropicSolution sol;
    sol.epsilon = eps;
    sol.converged = false;
    std::vector<double> errs;
    std::size_t sweep = 0;
    while (sweep < config.max_sweeps) {
        PotentialSet prev = p;
        for (std::size_t i = 0; i < space.arity(); ++i)
            softmin_update(p.phis, cost, space, eps, i);
        ++sweep;
        double delta = 0.0;
        for (std::size_t i = 0; i < p.phis.size(); ++i)
            for (std::size_t k = 0; k < p.phis[i].size(); ++k)
                delta = std::max(delta, std::fabs(p.phis[i][k] - prev.phis[i][k]));
        if (delta <= ptol) {
            errs = plan_marginal_errors(p.phis, cost, space, eps);
            double emax = 0.0;
            for (double e : errs) emax = std::max(emax, e);
            if (emax <= config.marginal_tol) {
                sol.converged = true;
                break;
            }
        }
    }
    if (errs.empty()) errs = plan_marginal_errors(p.phis, cost, space, eps);

    sol.sweeps = sweep;
    sol.marginal_errors = errs;
    gauge_fix(p, space);
    sol.potentials = p;
    sol.dual_value = dual_value(p, space);

    Coupling plan = plan_from_potentials(p, cost, space, eps);
    double cost_term = 0.0, ent = 0.0;
    const auto& shape = cost.shape();
    std::vector<std::size_t> idx(shape.size(), 0);
    std::size_t flat = 0;
    do {
        const double g = plan.density[flat];
        if (g > 0.0) {
            double s = 0.0;
            for (std::size_t a = 0; a < shape.size(); ++a) s += p.phis[a][idx[a]];
            cost_term += g * cost[flat];
            ent += g * (s - cost[flat]) / eps;
        }
        ++flat;
    } while (next_index(idx, shape));
    sol.entropy = ent;
    sol.primal_value = cost_term + eps * ent;
    return sol;
}

std::vector<EntropicSolution> eps_scaling_solve(const ProductSpace& space,
                                                const Tensor& cost,
                                                const std::vector<double>& eps_list,
                                                SinkhornConfig base) {
    if (eps_list.empty()) throw std::invalid_argument("epsilon list must be nonempty");
    for (std::size_t k = 0; k < eps_list.size(); ++k) {
        if (eps_list[k] <= 0.0)
            throw std::invalid_argument("epsilon list must be positive");
        if (k > 0 && eps_list[k] >= eps_list[k - 1])
            throw std::invalid_argument("epsilon list must be strictly decreasing");
    }
    std::vector<EntropicSolution> out;
    out.reserve(eps_list.size());
    for (double eps : eps_list) {
        SinkhornConfig cfg = base;
        cfg.epsilon = eps;
        cfg.potential_tol = base.potential_tol; // auto-resolves per epsilon if unset
        if (!out.empty()) cfg.warm_start = out.back().potentials;
        try {
            out.push_back(sinkhorn_solve(space, cost, cfg));
        } catch (const std::exception& e) {
            throw std::runtime_error("eps_scaling_solve failed at epsilon=" +
                                     std::to_string(eps) + ": " + e.what());
        }
    }
    return out;
}

} // namespace mmot
