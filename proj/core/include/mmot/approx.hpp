#pragma once

#include <cstddef>
#include <vector>

#include "mmot/entropic.hpp"
#include "mmot/measures.hpp"
#include "mmot/tensor.hpp"

namespace mmot {

// Axis-aligned cubical cells of edge delta/sqrt(d) anchored at the support's
// min corner, so each cell has Euclidean diameter <= delta. Empty cells are
// dropped; cell ids are dense.
struct BoxPartition {
    double delta = 0.0;
    std::vector<double> anchor;
    // Atom index -> cell id.
    std::vector<std::size_t> cell_of;
    // Cell id -> atom indices.
    std::vector<std::vector<std::size_t>> cells;
};

BoxPartition box_partition(const DiscreteMarginal& marginal, double delta);

// Partition entropy sum_cells mu(A) log(1/mu(A)) for the box partition (an
// upper estimate of the infimum over all partitions).
double entropy_H_delta(const DiscreteMarginal& marginal, double delta);

struct BlockPlan {
    Coupling coupling;
    std::vector<BoxPartition> partitions;
    // Flattened cell-id tuple -> block mass of gamma0; same strides as
    // cell_counts in block order.
    std::vector<double> block_masses;
    std::vector<std::size_t> cell_counts;
};

// gamma_delta: within every block (product of cells), replaces gamma0 by
// gamma0(block) times the product of the normalized restricted marginals.
// Preserves the m marginals atomwise and every block mass.
BlockPlan block_approximation(const Coupling& gamma0,
                              const std::vector<BoxPartition>& partitions);

struct BlockBoundsReport {
    double entropy_gamma_delta = 0.0;
    // sum over marginals except the max-dimension one of the cell entropies.
    double entropy_bound = 0.0;
    std::size_t excluded_marginal = 0;
    double cost_gamma0 = 0.0;
    double cost_gamma_delta = 0.0;
    double cost_increase = 0.0;
    double lipschitz_estimate = 0.0; // L * delta with sampled L
    double competitor = 0.0;         // cost(gamma_delta) + eps * Ent(gamma_delta)
    double mot_eps = 0.0;
    bool entropy_bound_ok = false;
    bool competitor_ok = false;
};

// Checks the proof-side inequalities: (a) Ent(gamma_delta | (x)mu) against
// the partition-entropy bound, (b) the cost increase against a sampled
// Lipschitz estimate L * delta (reported, not asserted), (c) MOT_eps <=
// competitor + 1e-7 with MOT_eps solved internally at `eps`.
BlockBoundsReport verify_block_bounds(const BlockPlan& plan, const Coupling& gamma0,
                                      const Tensor& cost, double eps, double delta,
                                      const SinkhornConfig& solver = {});

} // namespace mmot
