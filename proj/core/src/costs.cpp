#include "mmot/costs.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mmot {

namespace {

double sqdist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

double pairwise_sum(const PointTuple& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) s += sqdist(x[i], x[j]);
    return s;
}

Matrix scaled_identity(int d, double v) {
    Matrix m(d, d);
    for (int k = 0; k < d; ++k) m(k, k) = v;
    return m;
}

void check_pair(const CostModel& c, int i, int j) {
    if (i == j) throw std::invalid_argument("mixed Hessian needs i != j");
    if (i < 0 || j < 0 || i >= c.arity || j >= c.arity)
        throw std::out_of_range("mixed Hessian marginal index out of range");
}

} // namespace

CostModel make_quadratic2(int d) {
    CostModel c;
    c.name = "quadratic2";
    c.arity = 2;
    c.dims = {d, d};
    c.evaluate = [](const PointTuple& x) { return sqdist(x[0], x[1]); };
    c.analytic_mixed_hessian = [d](int, int, const PointTuple&) {
        return scaled_identity(d, -2.0);
    };
    return c;
}

CostModel make_gangbo_swiech(int m, int d) {
    if (m < 2) throw std::invalid_argument("gangbo_swiech needs m >= 2");
    CostModel c;
    c.name = "gangbo_swiech";
    c.arity = m;
    c.dims.assign(m, d);
    c.evaluate = pairwise_sum;
    c.analytic_mixed_hessian = [d](int, int, const PointTuple&) {
        return scaled_identity(d, -2.0);
    };
    return c;
}

CostModel make_negative_harmonic(int m, int d) {
    if (m < 2) throw std::invalid_argument("negative_harmonic needs m >= 2");
    CostModel c;
    c.name = "negative_harmonic";
    c.arity = m;
    c.dims.assign(m, d);
    c.evaluate = [](const PointTuple& x) { return -pairwise_sum(x); };
    c.analytic_mixed_hessian = [d](int, int, const PointTuple&) {
        return scaled_identity(d, 2.0);
    };
    return c;
}

CostModel make_degenerate_projection() {
    CostModel c;
    c.name = "degenerate_projection";
    c.arity = 2;
    c.dims = {2, 2};
    c.evaluate = [](const PointTuple& x) {
        const double d = x[0][0] - x[1][0];
        return d * d;
    };
    c.analytic_mixed_hessian = [](int, int, const PointTuple&) {
        Matrix m(2, 2);
        m(0, 0) = -2.0;
        return m;
    };
    return c;
}

CostModel make_barycenter(std::vector<double> lambda, int d) {
    const int m = static_cast<int>(lambda.size());
    if (m < 2) throw std::invalid_argument("barycenter needs m >= 2 weights");
    double sum = 0.0;
    for (double l : lambda) {
        if (l <= 0.0) throw std::invalid_argument("barycenter weights must be positive");
        sum += l;
    }
    if (std::fabs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("barycenter weights must sum to 1");
    CostModel c;
    c.name = "barycenter";
    c.arity = m;
    c.dims.assign(m, d);
    c.evaluate = [lambda, d](const PointTuple& x) {
        std::vector<double> t(d, 0.0);
        for (std::size_t i = 0; i < lambda.size(); ++i)
            for (int k = 0; k < d; ++k) t[k] += lambda[i] * x[i][k];
        double s = 0.0;
        for (std::size_t i = 0; i < lambda.size(); ++i) s += lambda[i] * sqdist(x[i], t);
        return s;
    };
    c.analytic_mixed_hessian = [lambda, d](int i, int j, const PointTuple&) {
        return scaled_identity(d, -2.0 * lambda[i] * lambda[j]);
    };
    return c;
}

CostModel make_cost(const std::string& name, int m, int d,
                    const std::vector<double>& lambda) {
    if (name == "quadratic2") return make_quadratic2(d);
    if (name == "gangbo_swiech") return make_gangbo_swiech(m, d);
    if (name == "negative_harmonic") return make_negative_harmonic(m, d);
    if (name == "degenerate_projection") return make_degenerate_projection();
    if (name == "barycenter") {
        if (!lambda.empty()) return make_barycenter(lambda, d);
        std::vector<double> uniform(m, 1.0 / static_cast<double>(m));
        // Nudge so the uniform default still sums to 1 exactly for m = 3 etc.
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < uniform.size(); ++i) s += uniform[i];
        uniform.back() = 1.0 - s;
        return make_barycenter(uniform, d);
    }
    throw std::invalid_argument("unknown cost model: " + name);
}

void configure_shift(CostModel& cost, const ProductSpace& space) {
    if (static_cast<int>(space.arity()) != cost.arity)
        throw std::invalid_argument("cost arity does not match space");
    for (std::size_t i = 0; i < space.arity(); ++i)
        if (space.marginals[i].dim != cost.dims[i])
            throw std::invalid_argument("cost dims do not match space");
    if (cost.name == "negative_harmonic") {
        double mx = -std::numeric_limits<double>::infinity();
        std::vector<std::size_t> idx(space.arity(), 0);
        do {
            mx = std::max(mx, pairwise_sum(tuple_points(space, idx)));
        } while (next_index(idx, space.shape()));
        cost.nonneg_shift = mx;
    }
    std::vector<std::size_t> idx(space.arity(), 0);
    do {
        if (cost.evaluate(tuple_points(space, idx)) + cost.nonneg_shift < 0.0)
            throw std::invalid_argument("cost is negative on the grid after shift");
    } while (next_index(idx, space.shape()));
}

Matrix mixed_hessian_fd(const CostModel& cost, int i, int j, const PointTuple& point) {
    check_pair(cost, i, j);
    const int di = cost.dims[i], dj = cost.dims[j];
    Matrix h(di, dj);
    // Fourth root of machine epsilon balances truncation against roundoff for
    // the 4-point second-derivative stencil (error ~ h^2 + eps/h^2).
    const double root_eps = std::pow(std::numeric_limits<double>::epsilon(), 0.25);
    PointTuple x = point;
    for (int a = 0; a < di; ++a) {
        const double ha = std::max(1.0, std::fabs(point[i][a])) * root_eps;
        for (int b = 0; b < dj; ++b) {
            const double hb = std::max(1.0, std::fabs(point[j][b])) * root_eps;
            double s = 0.0;
            for (int sa : {+1, -1})
                for (int sb : {+1, -1}) {
                    x[i][a] = point[i][a] + sa * ha;
                    x[j][b] = point[j][b] + sb * hb;
                    s += sa * sb * cost.evaluate(x);
                }
            x[i][a] = point[i][a];
            x[j][b] = point[j][b];
            h(a, b) = s / (4.0 * ha * hb);
        }
    }
    return h;
}

Matrix mixed_hessian(const CostModel& cost, int i, int j, const PointTuple& point) {
    check_pair(cost, i, j);
    if (cost.analytic_mixed_hessian) return cost.analytic_mixed_hessian(i, j, point);
    return mixed_hessian_fd(cost, i, j, point);
}

Tensor evaluate_on_grid(const CostModel& cost, const ProductSpace& space) {
    if (static_cast<int>(space.arity()) != cost.arity)
        throw std::invalid_argument("cost arity does not match space");
    Tensor t(space.shape());
    std::vector<std::size_t> idx(space.arity(), 0);
    std::size_t flat = 0;
    do {
        const double v = cost.evaluate(tuple_points(space, idx)) + cost.nonneg_shift;
        if (v < 0.0) throw std::invalid_argument("negative cost entry; configure_shift first");
        t[flat++] = v;
    } while (next_index(idx, space.shape()));
    return t;
}

} // namespace mmot
