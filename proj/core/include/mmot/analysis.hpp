#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mmot/costs.hpp"
#include "mmot/matrix.hpp"
#include "mmot/measures.hpp"
#include "mmot/tensor.hpp"

namespace mmot {

// Two-block partition of {0,...,m-1} in canonical form (index 0 on the
// left), so the enumeration has 2^{m-1} - 1 members.
struct Bipartition {
    std::vector<int> left, right;

    bool straddles(int i, int j) const;
};

// Throws for m > 6 (enumeration guard) or m < 2.
std::vector<Bipartition> enumerate_bipartitions(int m);

// Block matrix of size D x D, D = sum d_i: off-diagonal block (i,j) is
// (sum of t_p over partitions separating i from j) * D^2_{x_i x_j} c at the
// point; diagonal blocks are zero. Weights live on the simplex over the
// canonical bipartition enumeration.
Matrix assemble_g(const CostModel& cost, const PointTuple& point,
                  const std::vector<double>& weights);

// Eigenvalues by cyclic Jacobi, iterated until the off-diagonal Frobenius
// norm is <= 1e-12 * ||A||_F. Input must be symmetric within 1e-8.
std::vector<double> jacobi_eigenvalues(Matrix a);

// (d+, d-, d0) with the default zero threshold D * ||A||_F * 1e-10 when
// `threshold` is negative.
std::array<int, 3> signature(const Matrix& a, double threshold = -1.0);

struct SignatureReport {
    PointTuple point;
    std::vector<double> weights;
    std::array<int, 3> sig{0, 0, 0};
    std::vector<double> eigenvalues;
    double zero_threshold = 0.0;
};

SignatureReport signature_at(const CostModel& cost, const PointTuple& point,
                             const std::vector<double>& weights);

struct KappaEstimate {
    int kappa = 0;
    // One entry per sample point: the weights achieving the best d+ there.
    std::vector<SignatureReport> per_point;
    std::string strategy;
};

// min over sample points of max over a finite weight candidate set of d+.
// Candidates: simplex vertices, uniform weights, and `extra_samples` seeded
// Dirichlet draws. A lower estimate of the true max, and says so.
KappaEstimate kappa_estimate(const CostModel& cost,
                             const std::vector<PointTuple>& sample_points,
                             int extra_samples = 32, std::uint64_t seed = 0);

struct LaplaceFit {
    double s = 0.0;
    double constant = 0.0;
    double residual_rms = 0.0;
    std::vector<double> log_eps, log_integral;
};

// Fits log I(eps) = s log eps + log C where I(eps) is the integral of
// exp(-E/eps) against the product of the marginals. `marginals` must match
// the axes of E (a single marginal is allowed for one-axis E tensors).
LaplaceFit laplace_exponent_fit(const Tensor& E,
                                const std::vector<DiscreteMarginal>& marginals,
                                const std::vector<double>& eps_list);

} // namespace mmot
