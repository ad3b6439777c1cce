#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mmot/exact.hpp"
#include "mmot/measures.hpp"
#include "mmot/tensor.hpp"

namespace mmot {

struct SinkhornConfig {
    double epsilon = 0.0;
    std::size_t max_sweeps = 10'000;
    // L1 error per marginal.
    double marginal_tol = 1e-9;
    // Sup-norm potential change per sweep; defaults to 1e-10 * epsilon.
    std::optional<double> potential_tol;
    std::optional<PotentialSet> warm_start;

    double resolved_potential_tol() const {
        return potential_tol ? *potential_tol : 1e-10 * epsilon;
    }
};

struct EntropicSolution {
    PotentialSet potentials;
    double epsilon = 0.0;
    double dual_value = 0.0;
    double primal_value = 0.0;
    double entropy = 0.0;
    std::size_t sweeps = 0;
    std::vector<double> marginal_errors;
    bool converged = false;
};

// One Schroedinger-system sweep: for i = 0..m-1 in order, replaces phi_i by
// the softmin update -eps * log sum over the other axes of
// exp(((+)_{j != i} phi_j - c)/eps) * prod_{j != i} mu_j, computed with a
// running-max log-sum-exp. Throws on non-finite updates.
PotentialSet sinkhorn_sweep(const PotentialSet& p, const Tensor& cost,
                            const ProductSpace& space, double eps);

EntropicSolution sinkhorn_solve(const ProductSpace& space, const Tensor& cost,
                                const SinkhornConfig& config);

// gamma = exp(((+)phi_i - c)/eps) * (x) mu_i. Throws when an exponent
// exceeds 700 (double overflow guard).
Coupling plan_from_potentials(const PotentialSet& p, const Tensor& cost,
                              const ProductSpace& space, double eps);

// Warm-started continuation over a strictly decreasing epsilon list.
std::vector<EntropicSolution> eps_scaling_solve(const ProductSpace& space,
                                                const Tensor& cost,
                                                const std::vector<double>& eps_list,
                                                SinkhornConfig base);

} // namespace mmot
