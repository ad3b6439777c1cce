#pragma once

#include <cstddef>
#include <vector>

#include "mmot/measures.hpp"
#include "mmot/tensor.hpp"

namespace mmot {

// Dual potentials, one vector per marginal. gauge_fix shifts the first m-1
// to zero mu-mean and absorbs the constants into the last.
struct PotentialSet {
    std::vector<std::vector<double>> phis;
};

void gauge_fix(PotentialSet& p, const ProductSpace& space);

// Sum of <phi_i, mu_i>, the dual objective.
double dual_value(const PotentialSet& p, const ProductSpace& space);

enum class LPStatus { optimal, infeasible_guard, iteration_limit };

struct LPSolution {
    Coupling coupling;
    double value = 0.0;
    PotentialSet potentials;
    std::size_t iterations = 0;
    LPStatus status = LPStatus::optimal;
    // Index tuples carrying strictly positive mass.
    std::vector<std::vector<std::size_t>> support;
};

inline constexpr std::size_t kLPVariableGuard = 300'000;

// Minimizes <cost, gamma> over couplings with the space's marginals by dense
// revised simplex on the transportation equality system (m-1 dependent rows
// dropped). Throws std::invalid_argument on nonpositive weights or shape
// mismatch; returns status infeasible_guard when the variable count exceeds
// the guard and iteration_limit after 50 * variable-count pivots.
LPSolution lp_solve(const ProductSpace& space, const Tensor& cost);

// North-west-corner comonotone coupling of two sorted 1D marginals; optimal
// for costs like |x-y|^2 (submodular in 1D).
Coupling monotone_oracle_1d(const DiscreteMarginal& mu, const DiscreteMarginal& nu);

// Replaces phi_i pointwise by min over the other coordinates of
// c - sum_{j != i} phi_j.
PotentialSet c_conjugate_update(const PotentialSet& p, const Tensor& cost, std::size_t i);

// One full cycle of c_conjugate_update over i = 0..m-1.
PotentialSet c_conjugate_refine(PotentialSet p, const Tensor& cost);

// E = c - (+)phi_i over the full grid.
Tensor duality_gap_field(const PotentialSet& p, const Tensor& cost);

} // namespace mmot
