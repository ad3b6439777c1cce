#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mmot/tensor.hpp"

namespace mmot {

// Weighted point cloud in R^d. `dim` is carried explicitly: it is the
// intrinsic dimension the bound formulas use, not inferred from the points.
struct DiscreteMarginal {
    std::vector<std::vector<double>> points;
    std::vector<double> weights;
    int dim = 0;

    std::size_t size() const { return points.size(); }
};

// Validates the marginal invariants (weights >= 0 summing to 1 within 1e-12,
// consistent dimensions, pairwise-distinct points) and throws on violation.
void validate(const DiscreteMarginal& m);

DiscreteMarginal make_marginal(std::vector<std::vector<double>> points,
                               std::vector<double> weights, int dim);

// Product grid on an axis-aligned box with n points per axis at cell
// midpoints. density "uniform" gives equal weights; "cos2" weights each
// midpoint by the product over axes of cos^2(pi*(t - 1/2)) with t the
// normalized coordinate, renormalized to sum 1.
DiscreteMarginal grid_marginal(const std::vector<double>& low,
                               const std::vector<double>& high,
                               std::size_t n_per_axis,
                               const std::string& density);

struct ProductSpace {
    std::vector<DiscreteMarginal> marginals;

    std::size_t arity() const { return marginals.size(); }
    std::vector<std::size_t> shape() const;
};

ProductSpace make_space(std::vector<DiscreteMarginal> marginals);

struct Coupling {
    ProductSpace space;
    Tensor density;
};

std::vector<double> marginal_projection(const Coupling& c, std::size_t axis);

Coupling product_coupling(const ProductSpace& space);

// Relative entropy of the coupling against the product of its space's
// marginals, with 0*log 0 = 0. Returns +infinity (the sentinel) when the
// coupling charges a point the product measure does not.
double relative_entropy(const Coupling& c);

double cost_integral(const Coupling& c, const Tensor& cost);

// Points of the product space at a multi-index, one coordinate vector per
// marginal.
std::vector<std::vector<double>> tuple_points(const ProductSpace& s,
                                              const std::vector<std::size_t>& idx);

} // namespace mmot
