#include "mmot/measures.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mmot {

void validate(const DiscreteMarginal& m) {
    if (m.dim <= 0) throw std::invalid_argument("marginal dim must be positive");
    if (m.points.empty()) throw std::invalid_argument("marginal must have atoms");
    if (m.points.size() != m.weights.size())
        throw std::invalid_argument("points/weights length mismatch");
    long double total = 0.0L;
    for (double w : m.weights) {
        if (w < 0.0) throw std::invalid_argument("marginal weights must be nonnegative");
        total += w;
    }
    if (std::fabs(static_cast<double>(total - 1.0L)) > 1e-12)
        throw std::invalid_argument("marginal weights must sum to 1 within 1e-12");
    for (const auto& p : m.points)
        if (p.size() != static_cast<std::size_t>(m.dim))
            throw std::invalid_argument("point dimension mismatch");
    for (std::size_t i = 0; i < m.points.size(); ++i)
        for (std::size_t j = i + 1; j < m.points.size(); ++j)
            if (m.points[i] == m.points[j])
                throw std::invalid_argument("marginal points must be pairwise distinct");
}

DiscreteMarginal make_marginal(std::vector<std::vector<double>> points,
                               std::vector<double> weights, int dim) {
    DiscreteMarginal m{std::move(points), std::move(weights), dim};
    validate(m);
    return m;
}

DiscreteMarginal grid_marginal(const std::vector<double>& low,
                               const std::vector<double>& high,
                               std::size_t n_per_axis,
                               const std::string& density) {
    if (low.size() != high.size() || low.empty())
        throw std::invalid_argument("grid low/high must be nonempty and equal length");
    if (n_per_axis == 0) throw std::invalid_argument("grid needs n_per_axis >= 1");
    if (density != "uniform" && density != "cos2")
        throw std::invalid_argument("unknown grid density: " + density);
    const std::size_t d = low.size();
    for (std::size_t a = 0; a < d; ++a)
        if (!(high[a] > low[a])) throw std::invalid_argument("grid needs high > low");

    std::vector<std::size_t> shape(d, n_per_axis);
    checked_entry_count(shape);
    std::vector<std::vector<double>> points;
    std::vector<double> weights;
    std::vector<std::size_t> idx(d, 0);
    long double total = 0.0L;
    do {
        std::vector<double> p(d);
        double w = 1.0;
        for (std::size_t a = 0; a < d; ++a) {
            double t = (static_cast<double>(idx[a]) + 0.5) / static_cast<double>(n_per_axis);
            p[a] = low[a] + t * (high[a] - low[a]);
            if (density == "cos2") {
                double c = std::cos(std::numbers::pi * (t - 0.5));
                w *= c * c;
            }
        }
        points.push_back(std::move(p));
        weights.push_back(w);
        total += w;
    } while (next_index(idx, shape));
    for (double& w : weights) w = static_cast<double>(w / total);
    // Renormalized midpoint-quadrature weights can miss 1 by a few ulps of
    // accumulated rounding; shave the residue off the largest weight.
    long double s = 0.0L;
    for (double w : weights) s += w;
    std::size_t imax = 0;
    for (std::size_t i = 1; i < weights.size(); ++i)
        if (weights[i] > weights[imax]) imax = i;
    weights[imax] += static_cast<double>(1.0L - s);
    return make_marginal(std::move(points), std::move(weights), static_cast<int>(d));
}

std::vector<std::size_t> ProductSpace::shape() const {
    std::vector<std::size_t> s(marginals.size());
    for (std::size_t i = 0; i < marginals.size(); ++i) s[i] = marginals[i].size();
    return s;
}

ProductSpace make_space(std::vector<DiscreteMarginal> marginals) {
    if (marginals.size() < 2) throw std::invalid_argument("product space needs m >= 2");
    for (const auto& m : marginals) validate(m);
    return ProductSpace{std::move(marginals)};
}

std::vector<double> marginal_projection(const Coupling& c, std::size_t axis) {
    const auto shape = c.space.shape();
    if (axis >= shape.size()) throw std::out_of_range("marginal axis out of range");
    std::vector<double> proj(shape[axis], 0.0);
    const std::size_t stride = c.density.stride(axis);
    const std::size_t extent = shape[axis];
    const std::size_t block = stride * extent;
    const auto& data = c.density.data();
    for (std::size_t base = 0; base < data.size(); base += block)
        for (std::size_t k = 0; k < extent; ++k) {
            const std::size_t off = base + k * stride;
            double s = 0.0;
            for (std::size_t t = 0; t < stride; ++t) s += data[off + t];
            proj[k] += s;
        }
    return proj;
}

Coupling product_coupling(const ProductSpace& space) {
    Tensor density(space.shape());
    std::vector<std::size_t> idx(space.arity(), 0);
    std::size_t flat = 0;
    do {
        double w = 1.0;
        for (std::size_t i = 0; i < space.arity(); ++i) w *= space.marginals[i].weights[idx[i]];
        density[flat++] = w;
    } while (next_index(idx, space.shape()));
    return Coupling{space, std::move(density)};
}

double relative_entropy(const Coupling& c) {
    const auto shape = c.space.shape();
    std::vector<std::size_t> idx(shape.size(), 0);
    std::size_t flat = 0;
    double ent = 0.0;
    do {
        const double g = c.density[flat++];
        if (g == 0.0) continue;
        double prod = 1.0;
        for (std::size_t i = 0; i < shape.size(); ++i)
            prod *= c.space.marginals[i].weights[idx[i]];
        if (prod == 0.0) return std::numeric_limits<double>::infinity();
        ent += g * std::log(g / prod);
    } while (next_index(idx, shape));
    return ent;
}

double cost_integral(const Coupling& c, const Tensor& cost) {
    if (cost.shape() != c.space.shape())
        throw std::invalid_argument("cost tensor shape mismatch");
    double s = 0.0;
    const auto& g = c.density.data();
    const auto& cc = cost.data();
    for (std::size_t k = 0; k < g.size(); ++k) s += g[k] * cc[k];
    return s;
}

std::vector<std::vector<double>> tuple_points(const ProductSpace& s,
                                              const std::vector<std::size_t>& idx) {
    std::vector<std::vector<double>> pts(s.arity());
    for (std::size_t i = 0; i < s.arity(); ++i) pts[i] = s.marginals[i].points[idx[i]];
    return pts;
}

} // namespace mmot
