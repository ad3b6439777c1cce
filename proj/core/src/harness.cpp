#include "mmot/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mmot {

RateTable rate_sweep(const ProductSpace& space, const Tensor& cost,
                     const std::vector<double>& eps_list, const SinkhornConfig& base,
                     std::optional<double> mot0_override) {
    RateTable table;
    double mx = 0.0;
    for (double v : cost.data()) mx = std::max(mx, v);
    table.cost_scale = mx > 0.0 ? mx : 1.0;

    if (mot0_override) {
        table.mot_0 = *mot0_override;
    } else {
        LPSolution lp = lp_solve(space, cost);
        if (lp.status == LPStatus::infeasible_guard)
            throw std::runtime_error("rate_sweep: LP variable guard exceeded; pass a "
                                     "precomputed MOT_0 override");
        if (lp.status == LPStatus::iteration_limit)
            throw std::runtime_error("rate_sweep: LP hit its pivot limit");
        table.mot_0 = lp.value;
    }

    const auto sols = eps_scaling_solve(space, cost, eps_list, base);
    for (const auto& s : sols) {
        RateRow row;
        row.epsilon = s.epsilon;
        row.mot_eps = s.dual_value;
        row.mot_0 = table.mot_0;
        row.gap = s.dual_value - table.mot_0;
        row.sweeps = s.sweeps;
        row.converged = s.converged;
        for (double e : s.marginal_errors) row.marginal_error = std::max(row.marginal_error, e);
        table.rows.push_back(row);
    }

    for (const auto& row : table.rows)
        if (row.converged && row.gap < -1e-7)
            throw std::runtime_error("rate table violates MOT_0 <= MOT_eps");
    for (std::size_t k = 1; k < table.rows.size(); ++k)
        if (table.rows[k].converged && table.rows[k - 1].converged &&
            table.rows[k].gap > table.rows[k - 1].gap + 1e-7)
            throw std::runtime_error("rate table violates monotonicity in epsilon");
    return table;
}

namespace {
constexpr double kGapFloor = 1e-7;
}

RateFit fit_rate(const RateTable& table, std::pair<double, double> eps_window) {
    std::vector<double> x, y;
    for (const auto& row : table.rows) {
        if (!row.converged) continue;
        if (row.epsilon < eps_window.first || row.epsilon > eps_window.second) continue;
        if (row.gap <= kGapFloor) continue;
        x.push_back(std::log(1.0 / row.epsilon));
        y.push_back(row.gap / row.epsilon);
    }
    if (x.size() < 4)
        throw std::runtime_error("fit_rate needs at least 4 in-window rows with usable gaps");

    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sx += x[k];
        sy += y[k];
        sxx += x[k] * x[k];
        sxy += x[k] * y[k];
    }
    RateFit fit;
    fit.eps_window = eps_window;
    fit.rows_used = x.size();
    const double denom = n * sxx - sx * sx;
    fit.C = (n * sxy - sx * sy) / denom;
    fit.b = (sy - fit.C * sx) / n;
    double rss = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double r = y[k] - (fit.C * x[k] + fit.b);
        rss += r * r;
    }
    fit.residual_rms = std::sqrt(rss / n);
    return fit;
}

RateFit fit_rate(const RateTable& table) {
    return fit_rate(table, {0.02 * table.cost_scale, 0.4 * table.cost_scale});
}

RateFit compare_bounds(RateFit fit, const std::vector<int>& dims, int kappa, double slack) {
    if (dims.empty()) throw std::invalid_argument("compare_bounds needs dimensions");
    int total = 0, dmax = 0;
    for (int d : dims) {
        total += d;
        dmax = std::max(dmax, d);
    }
    fit.lower_bound = 0.5 * kappa;
    fit.upper_bound = 0.5 * (total - dmax);
    fit.slack = slack;
    fit.pass_lower = fit.C >= fit.lower_bound - slack;
    fit.pass_upper = fit.C <= fit.upper_bound + slack;
    fit.matching = (kappa == total - dmax);
    return fit;
}

void emit_outputs(const RateTable& table, const RateFit& fit, const std::string& csv_path,
                  const std::string& json_path, const std::string& svg_path) {
    if (!csv_path.empty()) {
        std::ofstream f(csv_path);
        if (!f) throw std::runtime_error("cannot open " + csv_path);
        f << "epsilon,mot_eps,mot_0,gap,sweeps,marginal_error\n";
        f.precision(17);
        for (const auto& r : table.rows)
            f << r.epsilon << ',' << r.mot_eps << ',' << r.mot_0 << ',' << r.gap << ','
              << r.sweeps << ',' << r.marginal_error << '\n';
        if (!f) throw std::runtime_error("write failed for " + csv_path);
    }

    if (!json_path.empty()) {
        nlohmann::json j;
        j["C"] = fit.C;
        j["b"] = fit.b;
        j["residual_rms"] = fit.residual_rms;
        j["eps_window"] = {fit.eps_window.first, fit.eps_window.second};
        j["rows_used"] = fit.rows_used;
        j["lower_bound"] = fit.lower_bound;
        j["upper_bound"] = fit.upper_bound;
        j["slack"] = fit.slack;
        j["pass_lower"] = fit.pass_lower;
        j["pass_upper"] = fit.pass_upper;
        j["matching"] = fit.matching;
        j["mot_0"] = table.mot_0;
        std::ofstream f(json_path);
        if (!f) throw std::runtime_error("cannot open " + json_path);
        f << j.dump(2) << '\n';
        if (!f) throw std::runtime_error("write failed for " + json_path);
    }

    if (!svg_path.empty()) {
        // gap/eps against log(1/eps): data points, the fitted line and the
        // two bound slopes anchored at the fit's value mid-window.
        std::vector<double> xs, ys;
        for (const auto& r : table.rows) {
            if (!r.converged || r.gap <= kGapFloor) continue;
            xs.push_back(std::log(1.0 / r.epsilon));
            ys.push_back(r.gap / r.epsilon);
        }
        if (xs.empty()) {
            xs = {0.0, 1.0};
            ys = {0.0, 1.0};
        }
        double xmin = xs[0], xmax = xs[0], ymin = ys[0], ymax = ys[0];
        for (double v : xs) {
            xmin = std::min(xmin, v);
            xmax = std::max(xmax, v);
        }
        auto consider = [&](double v) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        };
        for (double v : ys) consider(v);
        const double xc = 0.5 * (xmin + xmax);
        const double yc = fit.C * xc + fit.b;
        for (double slope : {fit.C, fit.lower_bound, fit.upper_bound}) {
            consider(yc + slope * (xmin - xc));
            consider(yc + slope * (xmax - xc));
        }
        if (xmax == xmin) xmax = xmin + 1.0;
        if (ymax == ymin) ymax = ymin + 1.0;
        const double W = 640.0, H = 480.0, pad = 50.0;
        auto px = [&](double v) { return pad + (v - xmin) / (xmax - xmin) * (W - 2 * pad); };
        auto py = [&](double v) { return H - pad - (v - ymin) / (ymax - ymin) * (H - 2 * pad); };

        std::ostringstream svg;
        svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
            << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
        svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        svg << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"14\">gap/eps vs log(1/eps)</text>\n";
        struct Line {
            double slope;
            const char* color;
            const char* label;
        };
        const Line lines[] = {{fit.C, "#d62728", "fit"},
                              {fit.lower_bound, "#2ca02c", "lower bound"},
                              {fit.upper_bound, "#1f77b4", "upper bound"}};
        int li = 0;
        for (const auto& ln : lines) {
            const double y1 = yc + ln.slope * (xmin - xc);
            const double y2 = yc + ln.slope * (xmax - xc);
            svg << "<line x1=\"" << px(xmin) << "\" y1=\"" << py(y1) << "\" x2=\"" << px(xmax)
                << "\" y2=\"" << py(y2) << "\" stroke=\"" << ln.color
                << "\" stroke-width=\"1.5\"" << (li > 0 ? " stroke-dasharray=\"6,4\"" : "")
                << "/>\n";
            svg << "<text x=\"" << W - pad << "\" y=\"" << 40 + 16 * li
                << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
                << ln.color << "\">" << ln.label << " slope=" << ln.slope << "</text>\n";
            ++li;
        }
        for (std::size_t k = 0; k < xs.size(); ++k)
            svg << "<circle cx=\"" << px(xs[k]) << "\" cy=\"" << py(ys[k])
                << "\" r=\"3.5\" fill=\"black\"/>\n";
        svg << "</svg>\n";
        std::ofstream f(svg_path);
        if (!f) throw std::runtime_error("cannot open " + svg_path);
        f << svg.str();
        if (!f) throw std::runtime_error("write failed for " + svg_path);
    }
}

} // namespace mmot
