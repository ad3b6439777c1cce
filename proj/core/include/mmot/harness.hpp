#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mmot/costs.hpp"
#include "mmot/entropic.hpp"
#include "mmot/exact.hpp"
#include "mmot/measures.hpp"

namespace mmot {

struct RateRow {
    double epsilon = 0.0;
    double mot_eps = 0.0;
    double mot_0 = 0.0;
    double gap = 0.0;
    std::size_t sweeps = 0;
    double marginal_error = 0.0;
    bool converged = true;
};

struct RateTable {
    std::vector<RateRow> rows; // epsilon descending
    double mot_0 = 0.0;
    double cost_scale = 1.0; // max grid cost, used by the default fit window
};

struct RateFit {
    double C = 0.0;          // coefficient of eps*log(1/eps)
    double b = 0.0;          // coefficient of eps
    double residual_rms = 0.0;
    std::pair<double, double> eps_window{0.0, 0.0};
    std::size_t rows_used = 0;
    // Filled by compare_bounds.
    double lower_bound = 0.0; // kappa/2
    double upper_bound = 0.0; // (sum d_i - max d_i)/2
    double slack = 0.0;
    bool pass_lower = false;
    bool pass_upper = false;
    bool matching = false; // kappa == sum d_i - max d_i
};

// MOT_0 once by lp_solve (or the override, e.g. an LP on a coarser grid),
// MOT_eps by warm-started continuation over the descending eps list.
// Non-converged rows are kept but flagged; fits skip them.
RateTable rate_sweep(const ProductSpace& space, const Tensor& cost,
                     const std::vector<double>& eps_list,
                     const SinkhornConfig& base = {},
                     std::optional<double> mot0_override = {});

// OLS of gap/eps against log(1/eps) over rows with eps inside the window
// and gap above the discretization floor (1e-7).
RateFit fit_rate(const RateTable& table, std::pair<double, double> eps_window);

// Default window [0.02, 0.4] * cost_scale.
RateFit fit_rate(const RateTable& table);

// Sets bounds kappa/2 and (sum d_i - max d_i)/2, the pass verdicts with the
// given slack, and the matching-bound flag.
RateFit compare_bounds(RateFit fit, const std::vector<int>& dims, int kappa,
                       double slack = 0.3);

// CSV (header epsilon,mot_eps,mot_0,gap,sweeps,marginal_error), a JSON fit
// record, and optionally an SVG chart of gap/eps vs log(1/eps) with the
// fitted line and the two bound slopes. Empty paths are skipped.
void emit_outputs(const RateTable& table, const RateFit& fit,
                  const std::string& csv_path, const std::string& json_path,
                  const std::string& svg_path);

} // namespace mmot
