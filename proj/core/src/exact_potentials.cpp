#include "mmot/exact.hpp"

#include <limits>
#include <stdexcept>

namespace mmot {

void gauge_fix(PotentialSet& p, const ProductSpace& space) {
    const std::size_t m = p.phis.size();
    if (m != space.arity()) throw std::invalid_argument("potential/space arity mismatch");
    double carried = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const auto& w = space.marginals[i].weights;
        double mean = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k) mean += p.phis[i][k] * w[k];
        for (double& v : p.phis[i]) v -= mean;
        carried += mean;
    }
    for (double& v : p.phis[m - 1]) v += carried;
}

double dual_value(const PotentialSet& p, const ProductSpace& space) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.phis.size(); ++i) {
        const auto& w = space.marginals[i].weights;
        for (std::size_t k = 0; k < w.size(); ++k) s += p.phis[i][k] * w[k];
    }
    return s;
}

PotentialSet c_conjugate_update(const PotentialSet& p, const Tensor& cost, std::size_t i) {
    const auto& shape = cost.shape();
    const std::size_t m = shape.size();
    if (i >= m) throw std::out_of_range("conjugate update index out of range");
    PotentialSet out = p;
    auto& phi = out.phis[i];
    phi.assign(shape[i], std::numeric_limits<double>::infinity());
    std::vector<std::size_t> idx(m, 0);
    std::size_t flat = 0;
    do {
        double others = 0.0;
        for (std::size_t j = 0; j < m; ++j)
            if (j != i) others += p.phis[j][idx[j]];
        const double v = cost[flat++] - others;
        if (v < phi[idx[i]]) phi[idx[i]] = v;
    } while (next_index(idx, shape));
    return out;
}

PotentialSet c_conjugate_refine(PotentialSet p, const Tensor& cost) {
    for (std::size_t i = 0; i < p.phis.size(); ++i) p = c_conjugate_update(p, cost, i);
    return p;
}

Tensor duality_gap_field(const PotentialSet& p, const Tensor& cost) {
    Tensor e(cost.shape());
    const auto& shape = cost.shape();
    std::vector<std::size_t> idx(shape.size(), 0);
    std::size_t flat = 0;
    do {
        double s = 0.0;
        for (std::size_t j = 0; j < shape.size(); ++j) s += p.phis[j][idx[j]];
        e[flat] = cost[flat] - s;
        ++flat;
    } while (next_index(idx, shape));
    return e;
}

} // namespace mmot
