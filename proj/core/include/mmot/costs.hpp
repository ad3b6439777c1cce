#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mmot/matrix.hpp"
#include "mmot/measures.hpp"
#include "mmot/tensor.hpp"

namespace mmot {

using PointTuple = std::vector<std::vector<double>>;

// Cost c on m-tuples of coordinate vectors, plus (optionally) its analytic
// mixed second-derivative blocks. The grid value is always
// evaluate(x) + nonneg_shift, which must be >= 0 on any attached space.
struct CostModel {
    std::string name;
    int arity = 0;
    std::vector<int> dims;
    std::function<double(const PointTuple&)> evaluate;
    // Empty when only finite differences are available.
    std::function<Matrix(int i, int j, const PointTuple&)> analytic_mixed_hessian;
    double nonneg_shift = 0.0;
};

CostModel make_quadratic2(int d);
CostModel make_gangbo_swiech(int m, int d);
// nonneg_shift starts at 0; configure_shift sets K = max grid value of the
// pairwise sum once a space is attached.
CostModel make_negative_harmonic(int m, int d);
CostModel make_degenerate_projection();
CostModel make_barycenter(std::vector<double> lambda, int d);

CostModel make_cost(const std::string& name, int m, int d,
                    const std::vector<double>& lambda = {});

// Attach-time check that evaluate + nonneg_shift >= 0 on the whole grid; for
// negative_harmonic this first sets the shift to the grid maximum of the
// pairwise sum. Throws if the shifted cost still goes negative.
void configure_shift(CostModel& cost, const ProductSpace& space);

// Mixed second-derivative block d_i x d_j; analytic when available, central
// finite differences otherwise. i == j is rejected.
Matrix mixed_hessian(const CostModel& cost, int i, int j, const PointTuple& point);

// Finite-difference version regardless of the analytic block (used to
// cross-check the analytic formulas).
Matrix mixed_hessian_fd(const CostModel& cost, int i, int j, const PointTuple& point);

Tensor evaluate_on_grid(const CostModel& cost, const ProductSpace& space);

} // namespace mmot
