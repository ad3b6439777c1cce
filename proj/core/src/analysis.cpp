#include "mmot/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace mmot {

bool Bipartition::straddles(int i, int j) const {
    const bool i_left = std::find(left.begin(), left.end(), i) != left.end();
    const bool j_left = std::find(left.begin(), left.end(), j) != left.end();
    return i_left != j_left;
}

std::vector<Bipartition> enumerate_bipartitions(int m) {
    if (m < 2) throw std::invalid_argument("bipartitions need m >= 2");
    if (m > 6) throw std::invalid_argument("bipartition enumeration guarded at m <= 6");
    std::vector<Bipartition> out;
    const unsigned total = 1u << (m - 1);
    // Bit b of `mask` decides the side of index b+1; index 0 stays left.
    for (unsigned mask = 0; mask + 1 < total; ++mask) {
        Bipartition p;
        p.left.push_back(0);
        for (int i = 1; i < m; ++i) {
            if (mask & (1u << (i - 1)))
                p.left.push_back(i);
            else
                p.right.push_back(i);
        }
        out.push_back(std::move(p));
    }
    return out;
}

Matrix assemble_g(const CostModel& cost, const PointTuple& point,
                  const std::vector<double>& weights) {
    const int m = cost.arity;
    const auto parts = enumerate_bipartitions(m);
    if (weights.size() != parts.size())
        throw std::invalid_argument("weight count must match the bipartition enumeration");
    double sum = 0.0;
    for (double t : weights) {
        if (t < 0.0) throw std::invalid_argument("bipartition weights must be nonnegative");
        sum += t;
    }
    if (std::fabs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("bipartition weights must sum to 1 within 1e-12");

    std::vector<int> offset(m + 1, 0);
    for (int i = 0; i < m; ++i) offset[i + 1] = offset[i] + cost.dims[i];
    const int D = offset[m];
    Matrix g(D, D);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            double t = 0.0;
            for (std::size_t p = 0; p < parts.size(); ++p)
                if (parts[p].straddles(i, j)) t += weights[p];
            if (t == 0.0) continue;
            const Matrix h = mixed_hessian(cost, i, j, point);
            for (int a = 0; a < cost.dims[i]; ++a)
                for (int b = 0; b < cost.dims[j]; ++b) {
                    g(offset[i] + a, offset[j] + b) = t * h(a, b);
                    g(offset[j] + b, offset[i] + a) = t * h(a, b);
                }
        }
    return g;
}

std::vector<double> jacobi_eigenvalues(Matrix a) {
    if (a.rows != a.cols) throw std::invalid_argument("jacobi needs a square matrix");
    const std::size_t n = a.rows;
    double asym = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            asym = std::max(asym, std::fabs(a(i, j) - a(j, i)));
    if (asym > 1e-8 * (1.0 + frobenius_norm(a)))
        throw std::invalid_argument("jacobi input is not symmetric");

    const double norm = frobenius_norm(a);
    const double target = 1e-12 * norm;
    auto offdiag = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
        return std::sqrt(s);
    };
    for (int sweep = 0; sweep < 100 && offdiag() > target; ++sweep) {
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

std::array<int, 3> signature(const Matrix& a, double threshold) {
    const auto ev = jacobi_eigenvalues(a);
    const double thr =
        threshold >= 0.0 ? threshold
                         : static_cast<double>(a.rows) * frobenius_norm(a) * 1e-10;
    std::array<int, 3> sig{0, 0, 0};
    for (double v : ev) {
        if (v > thr)
            ++sig[0];
        else if (v < -thr)
            ++sig[1];
        else
            ++sig[2];
    }
    return sig;
}

SignatureReport signature_at(const CostModel& cost, const PointTuple& point,
                             const std::vector<double>& weights) {
    SignatureReport r;
    r.point = point;
    r.weights = weights;
    const Matrix g = assemble_g(cost, point, weights);
    r.zero_threshold = static_cast<double>(g.rows) * frobenius_norm(g) * 1e-10;
    r.eigenvalues = jacobi_eigenvalues(g);
    r.sig = {0, 0, 0};
    for (double v : r.eigenvalues) {
        if (v > r.zero_threshold)
            ++r.sig[0];
        else if (v < -r.zero_threshold)
            ++r.sig[1];
        else
            ++r.sig[2];
    }
    return r;
}

KappaEstimate kappa_estimate(const CostModel& cost,
                             const std::vector<PointTuple>& sample_points,
                             int extra_samples, std::uint64_t seed) {
    if (sample_points.empty())
        throw std::invalid_argument("kappa_estimate needs at least one sample point");
    const auto parts = enumerate_bipartitions(cost.arity);
    const std::size_t np = parts.size();

    std::vector<std::vector<double>> candidates;
    for (std::size_t p = 0; p < np; ++p) {
        std::vector<double> v(np, 0.0);
        v[p] = 1.0;
        candidates.push_back(std::move(v));
    }
    if (np > 1)
        candidates.emplace_back(np, 1.0 / static_cast<double>(np));
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> expdist(1.0);
    for (int s = 0; s < extra_samples && np > 1; ++s) {
        std::vector<double> v(np);
        double total = 0.0;
        for (auto& x : v) {
            x = expdist(rng);
            total += x;
        }
        for (auto& x : v) x /= total;
        candidates.push_back(std::move(v));
    }
    // Re-close each candidate so the simplex check passes exactly.
    for (auto& v : candidates) {
        double s = 0.0;
        for (std::size_t k = 0; k + 1 < v.size(); ++k) s += v[k];
        v.back() = 1.0 - s;
    }

    int dim_bound = 0, dmax = 0;
    for (int d : cost.dims) {
        dim_bound += d;
        dmax = std::max(dmax, d);
    }
    dim_bound -= dmax;

    KappaEstimate est;
    est.kappa = std::numeric_limits<int>::max();
    for (const auto& point : sample_points) {
        SignatureReport best;
        int best_dplus = -1;
        for (const auto& w : candidates) {
            SignatureReport r = signature_at(cost, point, w);
            if (r.sig[0] > best_dplus) {
                best_dplus = r.sig[0];
                best = std::move(r);
            }
        }
        est.per_point.push_back(std::move(best));
        est.kappa = std::min(est.kappa, best_dplus);
    }
    if (est.kappa > dim_bound)
        throw std::runtime_error("signature exceeded the dimension bound; Hessian is broken");
    est.strategy = "finite search (lower estimate of the true max): " +
                   std::to_string(np) + " vertices + uniform + " +
                   std::to_string(extra_samples) + " Dirichlet draws, seed " +
                   std::to_string(seed);
    return est;
}

LaplaceFit laplace_exponent_fit(const Tensor& E,
                                const std::vector<DiscreteMarginal>& marginals,
                                const std::vector<double>& eps_list) {
    if (marginals.size() != E.rank())
        throw std::invalid_argument("marginal count must match E tensor rank");
    if (eps_list.size() < 4)
        throw std::invalid_argument("laplace fit needs at least 4 epsilon values");
    const auto& shape = E.shape();
    for (std::size_t a = 0; a < shape.size(); ++a)
        if (marginals[a].size() != shape[a])
            throw std::invalid_argument("marginal size mismatch with E tensor");
    for (double v : E.data())
        if (v < -1e-10)
            throw std::invalid_argument("E must be nonnegative up to 1e-10");

    LaplaceFit fit;
    std::size_t underflowed = 0;
    for (double eps : eps_list) {
        if (eps <= 0.0) throw std::invalid_argument("epsilon must be positive");
        double integral = 0.0;
        std::vector<std::size_t> idx(shape.size(), 0);
        std::size_t flat = 0;
        do {
            double w = 1.0;
            for (std::size_t a = 0; a < shape.size(); ++a) w *= marginals[a].weights[idx[a]];
            integral += w * std::exp(-std::max(E[flat], 0.0) / eps);
            ++flat;
        } while (next_index(idx, shape));
        if (integral <= 0.0) {
            ++underflowed;
            continue;
        }
        fit.log_eps.push_back(std::log(eps));
        fit.log_integral.push_back(std::log(integral));
    }
    if (underflowed == eps_list.size())
        throw std::runtime_error(
            "exp(-E/eps) underflowed for every epsilon; E has no zero set on the grid");
    if (fit.log_eps.size() < 4)
        throw std::runtime_error("fewer than 4 usable epsilon values after underflow");

    const std::size_t n = fit.log_eps.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sx += fit.log_eps[k];
        sy += fit.log_integral[k];
        sxx += fit.log_eps[k] * fit.log_eps[k];
        sxy += fit.log_eps[k] * fit.log_integral[k];
    }
    const double denom = n * sxx - sx * sx;
    fit.s = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - fit.s * sx) / n;
    fit.constant = std::exp(intercept);
    double rss = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double r = fit.log_integral[k] - (fit.s * fit.log_eps[k] + intercept);
        rss += r * r;
    }
    fit.residual_rms = std::sqrt(rss / n);
    return fit;
}

} // namespace mmot
