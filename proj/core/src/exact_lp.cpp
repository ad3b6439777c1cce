#include "mmot/exact.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace mmot {

namespace {

// Revised simplex on the axial transportation system. Rows: all atoms of
// marginal 0, atoms 0..n_i-2 of each later marginal (the dropped rows are
// dependent; their duals are 0). Columns are implicit: the tuple
// (k_1,...,k_m) has a 1 in each of its kept rows.
class TransportSimplex {
public:
    TransportSimplex(const ProductSpace& space, const Tensor& cost)
        : shape_(space.shape()), cost_(cost.data()) {
        m_ = shape_.size();
        nvars_ = cost.size();
        row_offset_.resize(m_);
        std::size_t rows = 0;
        for (std::size_t i = 0; i < m_; ++i) {
            row_offset_[i] = rows;
            rows += (i == 0) ? shape_[i] : shape_[i] - 1;
        }
        rank_ = rows;
        b_.assign(rank_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            const auto& w = space.marginals[i].weights;
            const std::size_t kept = (i == 0) ? shape_[i] : shape_[i] - 1;
            for (std::size_t k = 0; k < kept; ++k) b_[row_offset_[i] + k] = w[k];
        }
        double mx = 0.0;
        for (double v : cost_) mx = std::max(mx, std::fabs(v));
        scale_ = 1.0 + mx;
        strides_.assign(m_, 1);
        for (std::size_t a = m_; a-- > 1;) strides_[a - 1] = strides_[a] * shape_[a];
    }

    LPSolution run(const ProductSpace& space) {
        const std::size_t pivot_limit = 50 * nvars_;
        basis_.resize(rank_);
        in_basis_.assign(nvars_, 0);
        binv_.assign(rank_ * rank_, 0.0);
        for (std::size_t r = 0; r < rank_; ++r) {
            basis_[r] = nvars_ + r;
            binv_[r * rank_ + r] = 1.0;
        }
        xb_ = b_;
        iterations_ = 0;
        bland_ = false;
        degenerate_run_ = 0;

        phase1_ = true;
        bool limit = !iterate(pivot_limit);
        if (!limit) {
            double artificial_mass = 0.0;
            for (std::size_t r = 0; r < rank_; ++r)
                if (basis_[r] >= nvars_) artificial_mass += xb_[r];
            if (artificial_mass > 1e-9)
                throw std::runtime_error("transportation phase 1 failed to reach feasibility");
            drive_out_artificials();
            phase1_ = false;
            limit = !iterate(pivot_limit);
        }

        LPSolution sol;
        sol.status = limit ? LPStatus::iteration_limit : LPStatus::optimal;
        sol.iterations = iterations_;
        Tensor density(shape_);
        double value = 0.0;
        for (std::size_t r = 0; r < rank_; ++r) {
            if (basis_[r] >= nvars_) continue;
            double v = xb_[r];
            if (v < 0.0) {
                if (v < -1e-9) throw std::runtime_error("simplex left feasibility");
                v = 0.0;
            }
            density[basis_[r]] = v;
            value += v * cost_[basis_[r]];
            if (v > 0.0) sol.support.push_back(unflatten(basis_[r]));
        }
        sol.value = value;
        sol.coupling = Coupling{space, std::move(density)};

        compute_duals();
        sol.potentials.phis.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            auto& phi = sol.potentials.phis[i];
            phi.assign(shape_[i], 0.0);
            const std::size_t kept = (i == 0) ? shape_[i] : shape_[i] - 1;
            for (std::size_t k = 0; k < kept; ++k) phi[k] = y_[row_offset_[i] + k];
        }
        return sol;
    }

private:
    std::vector<std::size_t> unflatten(std::size_t flat) const {
        std::vector<std::size_t> idx(m_);
        for (std::size_t a = 0; a < m_; ++a) {
            idx[a] = flat / strides_[a];
            flat %= strides_[a];
        }
        return idx;
    }

    double basis_cost(std::size_t var) const {
        if (var >= nvars_) return phase1_ ? 1.0 : 0.0;
        return phase1_ ? 0.0 : cost_[var];
    }

    // y = c_B * Binv, recomputed exactly each pivot.
    void compute_duals() {
        y_.assign(rank_, 0.0);
        for (std::size_t r = 0; r < rank_; ++r) {
            const double cb = basis_cost(basis_[r]);
            if (cb == 0.0) continue;
            const double* row = &binv_[r * rank_];
            for (std::size_t t = 0; t < rank_; ++t) y_[t] += cb * row[t];
        }
    }

    // Per-marginal dual lookups, 0 on dropped rows.
    void build_dual_lookup() {
        yv_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            yv_[i].assign(shape_[i], 0.0);
            const std::size_t kept = (i == 0) ? shape_[i] : shape_[i] - 1;
            for (std::size_t k = 0; k < kept; ++k) yv_[i][k] = y_[row_offset_[i] + k];
        }
    }

    // Most negative reduced cost (Dantzig) or first negative (Bland).
    // Returns nvars_ when none qualifies.
    std::size_t price() {
        const double tol = -1e-10 * scale_;
        const std::size_t n_last = shape_[m_ - 1];
        const std::size_t outer = nvars_ / n_last;
        std::vector<std::size_t> idx(m_, 0);
        std::size_t best = nvars_;
        double best_rc = tol;
        std::size_t flat = 0;
        for (std::size_t o = 0; o < outer; ++o) {
            double base = 0.0;
            for (std::size_t a = 0; a + 1 < m_; ++a) base += yv_[a][idx[a]];
            const double* clast = &cost_[flat];
            const double* ylast = yv_[m_ - 1].data();
            for (std::size_t k = 0; k < n_last; ++k) {
                const double cj = phase1_ ? 0.0 : clast[k];
                const double rc = cj - base - ylast[k];
                if (rc < best_rc && !in_basis_[flat + k]) {
                    best = flat + k;
                    best_rc = rc;
                    if (bland_) return best;
                }
            }
            flat += n_last;
            // odometer over the leading m-1 axes
            for (std::size_t a = m_ - 1; a-- > 0;) {
                if (++idx[a] < shape_[a]) break;
                idx[a] = 0;
            }
        }
        return best;
    }

    void column_times_binv(std::size_t var, std::vector<double>& d) const {
        d.assign(rank_, 0.0);
        auto add_col = [&](std::size_t row) {
            for (std::size_t r = 0; r < rank_; ++r) d[r] += binv_[r * rank_ + row];
        };
        if (var >= nvars_) {
            add_col(var - nvars_);
            return;
        }
        std::size_t flat = var;
        for (std::size_t a = 0; a < m_; ++a) {
            const std::size_t k = flat / strides_[a];
            flat %= strides_[a];
            const std::size_t kept = (a == 0) ? shape_[a] : shape_[a] - 1;
            if (k < kept) add_col(row_offset_[a] + k);
        }
    }

    // Pivot `entering` into the basis; returns false when the column is
    // unbounded (impossible on this polytope, signals numerical failure).
    bool pivot(std::size_t entering) {
        std::vector<double> d;
        column_times_binv(entering, d);
        const double piv_tol = 1e-11;
        std::size_t leave = rank_;
        double theta = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < rank_; ++r) {
            if (d[r] <= piv_tol) continue;
            const double ratio = std::max(xb_[r], 0.0) / d[r];
            if (ratio < theta - 1e-15) {
                theta = ratio;
                leave = r;
            } else if (ratio < theta + 1e-15 && leave < rank_) {
                if (bland_) {
                    if (basis_[r] < basis_[leave]) leave = r;
                } else {
                    // prefer kicking artificials, then the steepest pivot
                    const bool r_art = basis_[r] >= nvars_;
                    const bool l_art = basis_[leave] >= nvars_;
                    if (r_art != l_art ? r_art : d[r] > d[leave]) leave = r;
                }
            }
        }
        if (leave == rank_) return false;

        if (theta <= 1e-12) {
            if (++degenerate_run_ > 3 * rank_ && !bland_) bland_ = true;
        } else {
            degenerate_run_ = 0;
        }

        const double dr = d[leave];
        double* prow = &binv_[leave * rank_];
        for (std::size_t t = 0; t < rank_; ++t) prow[t] /= dr;
        for (std::size_t r = 0; r < rank_; ++r) {
            if (r == leave) continue;
            const double f = d[r];
            if (f == 0.0) continue;
            double* row = &binv_[r * rank_];
            for (std::size_t t = 0; t < rank_; ++t) row[t] -= f * prow[t];
            xb_[r] -= theta * f;
            if (xb_[r] < 0.0 && xb_[r] > -1e-12) xb_[r] = 0.0;
        }
        xb_[leave] = theta;
        if (basis_[leave] < nvars_) in_basis_[basis_[leave]] = 0;
        if (entering < nvars_) in_basis_[entering] = 1;
        basis_[leave] = entering;
        return true;
    }

    void refactorize() {
        // Rebuild Binv by Gauss-Jordan on the basis matrix with partial
        // pivoting, then refresh xb from b.
        std::vector<double> a(rank_ * rank_, 0.0);
        for (std::size_t c = 0; c < rank_; ++c) {
            const std::size_t var = basis_[c];
            if (var >= nvars_) {
                a[(var - nvars_) * rank_ + c] = 1.0;
                continue;
            }
            std::size_t flat = var;
            for (std::size_t ax = 0; ax < m_; ++ax) {
                const std::size_t k = flat / strides_[ax];
                flat %= strides_[ax];
                const std::size_t kept = (ax == 0) ? shape_[ax] : shape_[ax] - 1;
                if (k < kept) a[(row_offset_[ax] + k) * rank_ + c] = 1.0;
            }
        }
        std::vector<double> inv(rank_ * rank_, 0.0);
        for (std::size_t r = 0; r < rank_; ++r) inv[r * rank_ + r] = 1.0;
        for (std::size_t c = 0; c < rank_; ++c) {
            std::size_t piv = c;
            for (std::size_t r = c + 1; r < rank_; ++r)
                if (std::fabs(a[r * rank_ + c]) > std::fabs(a[piv * rank_ + c])) piv = r;
            if (std::fabs(a[piv * rank_ + c]) < 1e-12)
                throw std::runtime_error("singular basis during refactorization");
            if (piv != c) {
                for (std::size_t t = 0; t < rank_; ++t) {
                    std::swap(a[piv * rank_ + t], a[c * rank_ + t]);
                    std::swap(inv[piv * rank_ + t], inv[c * rank_ + t]);
                }
            }
            const double p = a[c * rank_ + c];
            for (std::size_t t = 0; t < rank_; ++t) {
                a[c * rank_ + t] /= p;
                inv[c * rank_ + t] /= p;
            }
            for (std::size_t r = 0; r < rank_; ++r) {
                if (r == c) continue;
                const double f = a[r * rank_ + c];
                if (f == 0.0) continue;
                for (std::size_t t = 0; t < rank_; ++t) {
                    a[r * rank_ + t] -= f * a[c * rank_ + t];
                    inv[r * rank_ + t] -= f * inv[c * rank_ + t];
                }
            }
        }
        // Binv = P^{-1} applied through the elimination is already folded in:
        // inv now holds the inverse of the (row-permuted) basis; rows of a
        // were swapped in lockstep so inv is B^{-1} directly.
        binv_ = std::move(inv);
        xb_.assign(rank_, 0.0);
        for (std::size_t r = 0; r < rank_; ++r) {
            double s = 0.0;
            const double* row = &binv_[r * rank_];
            for (std::size_t t = 0; t < rank_; ++t) s += row[t] * b_[t];
            xb_[r] = (s < 0.0 && s > -1e-9) ? 0.0 : s;
            if (xb_[r] < 0.0) throw std::runtime_error("refactorization lost feasibility");
        }
    }

    // Price/pivot until optimal for the current phase. Returns false when
    // the pivot limit is hit.
    bool iterate(std::size_t pivot_limit) {
        while (true) {
            compute_duals();
            build_dual_lookup();
            const std::size_t entering = price();
            if (entering == nvars_) return true;
            if (iterations_ >= pivot_limit) return false;
            ++iterations_;
            if (!pivot(entering))
                throw std::runtime_error("transportation LP reported an unbounded ray");
            if (iterations_ % 1000 == 0) refactorize();
        }
    }

    void drive_out_artificials() {
        for (std::size_t r = 0; r < rank_; ++r) {
            if (basis_[r] < nvars_) continue;
            // Find the real nonbasic column with the largest pivot magnitude
            // in this row of the simplex tableau.
            const double* row = &binv_[r * rank_];
            std::size_t best = nvars_;
            double best_abs = 1e-7;
            std::vector<std::size_t> idx(m_, 0);
            // Per-marginal lookup of this Binv row, mirroring the dual trick.
            std::vector<std::vector<double>> rv(m_);
            for (std::size_t i = 0; i < m_; ++i) {
                rv[i].assign(shape_[i], 0.0);
                const std::size_t kept = (i == 0) ? shape_[i] : shape_[i] - 1;
                for (std::size_t k = 0; k < kept; ++k) rv[i][k] = row[row_offset_[i] + k];
            }
            const std::size_t n_last = shape_[m_ - 1];
            const std::size_t outer = nvars_ / n_last;
            std::size_t flat = 0;
            for (std::size_t o = 0; o < outer; ++o) {
                double base = 0.0;
                for (std::size_t a = 0; a + 1 < m_; ++a) base += rv[a][idx[a]];
                const double* rlast = rv[m_ - 1].data();
                for (std::size_t k = 0; k < n_last; ++k) {
                    const double v = std::fabs(base + rlast[k]);
                    if (v > best_abs && !in_basis_[flat + k]) {
                        best_abs = v;
                        best = flat + k;
                    }
                }
                flat += n_last;
                for (std::size_t a = m_ - 1; a-- > 0;) {
                    if (++idx[a] < shape_[a]) break;
                    idx[a] = 0;
                }
            }
            if (best == nvars_)
                throw std::runtime_error("could not drive an artificial out of the basis");
            std::vector<double> d;
            column_times_binv(best, d);
            const double dr = d[r];
            double* prow = &binv_[r * rank_];
            for (std::size_t t = 0; t < rank_; ++t) prow[t] /= dr;
            for (std::size_t s = 0; s < rank_; ++s) {
                if (s == r) continue;
                const double f = d[s];
                if (f == 0.0) continue;
                double* srow = &binv_[s * rank_];
                for (std::size_t t = 0; t < rank_; ++t) srow[t] -= f * prow[t];
            }
            // The artificial sits at zero level, so xb is unchanged apart
            // from this slot staying 0.
            xb_[r] = 0.0;
            in_basis_[best] = 1;
            basis_[r] = best;
        }
    }

    std::vector<std::size_t> shape_;
    const std::vector<double>& cost_;
    std::size_t m_ = 0, nvars_ = 0, rank_ = 0;
    std::vector<std::size_t> row_offset_, strides_;
    std::vector<double> b_;
    double scale_ = 1.0;

    std::vector<std::size_t> basis_;
    std::vector<std::uint8_t> in_basis_;
    std::vector<double> binv_, xb_, y_;
    std::vector<std::vector<double>> yv_;
    std::size_t iterations_ = 0, degenerate_run_ = 0;
    bool bland_ = false, phase1_ = true;
};

} // namespace

LPSolution lp_solve(const ProductSpace& space, const Tensor& cost) {
    if (cost.shape() != space.shape())
        throw std::invalid_argument("cost tensor shape does not match space");
    for (const auto& m : space.marginals)
        for (double w : m.weights)
            if (w <= 0.0)
                throw std::invalid_argument(
                    "lp_solve needs strictly positive weights; drop zero atoms upstream");
    if (cost.size() > kLPVariableGuard) {
        LPSolution sol;
        sol.status = LPStatus::infeasible_guard;
        sol.value = std::numeric_limits<double>::quiet_NaN();
        return sol;
    }
    TransportSimplex simplex(space, cost);
    LPSolution sol = simplex.run(space);
    if (sol.status == LPStatus::optimal) {
        sol.potentials = c_conjugate_refine(std::move(sol.potentials), cost);
        gauge_fix(sol.potentials, space);
    }
    return sol;
}

Coupling monotone_oracle_1d(const DiscreteMarginal& mu, const DiscreteMarginal& nu) {
    if (mu.dim != 1 || nu.dim != 1)
        throw std::invalid_argument("monotone oracle needs 1D marginals");
    for (std::size_t k = 1; k < mu.size(); ++k)
        if (mu.points[k][0] <= mu.points[k - 1][0])
            throw std::invalid_argument("monotone oracle needs sorted ascending points");
    for (std::size_t k = 1; k < nu.size(); ++k)
        if (nu.points[k][0] <= nu.points[k - 1][0])
            throw std::invalid_argument("monotone oracle needs sorted ascending points");

    ProductSpace space{{mu, nu}};
    Tensor density(space.shape());
    std::size_t i = 0, j = 0;
    double a = mu.weights[0], b = nu.weights[0];
    while (true) {
        const double t = std::min(a, b);
        density.at({i, j}) += t;
        a -= t;
        b -= t;
        const bool last_i = (i + 1 == mu.size());
        const bool last_j = (j + 1 == nu.size());
        if (last_i && last_j) break;
        if (a <= b && !last_i) {
            ++i;
            a = mu.weights[i];
        } else if (!last_j) {
            ++j;
            b = nu.weights[j];
        } else {
            ++i;
            a = mu.weights[i];
        }
    }
    return Coupling{std::move(space), std::move(density)};
}

} // namespace mmot
