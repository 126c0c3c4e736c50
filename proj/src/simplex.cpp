#include "bdvarmin/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bdvarmin {

namespace {
constexpr double kPivTol = 1e-11;
constexpr double kCostTol = 1e-10;
} // namespace

LPResult solve_lp(const LinearProgram& lp, long max_iters) {
    const int n = lp.n;
    const int m = int(lp.rows.size());
    for (const auto& r : lp.rows)
        if (r.rhs < 0.0) throw std::invalid_argument("solve_lp: rhs must be nonnegative");

    // Column layout: one column per nonnegative variable, two (plus/minus)
    // per free variable, then m slacks.
    std::vector<int> col_var, col_sign;
    std::vector<int> var_pos_col(n, -1), var_neg_col(n, -1);
    for (int j = 0; j < n; ++j) {
        const bool nn = !lp.nonneg.empty() && lp.nonneg[j];
        var_pos_col[j] = int(col_var.size());
        col_var.push_back(j);
        col_sign.push_back(+1);
        if (!nn) {
            var_neg_col[j] = int(col_var.size());
            col_var.push_back(j);
            col_sign.push_back(-1);
        }
    }
    const int ns = int(col_var.size());
    const int ncols = ns + m;

    std::vector<double> T(size_t(m) * ncols, 0.0);
    std::vector<double> rhs(m), rhs_orig(m);
    std::vector<double> cost(ncols, 0.0);
    std::vector<int> basis(m);

    // Degenerate vertices (many zero rhs rows) stall the walk, so the rhs is
    // perturbed by a strictly increasing tiny ramp; the optimal basis of the
    // perturbed problem is optimal for the original rhs whenever it stays
    // feasible, which is checked at the end through the slack columns (they
    // carry the basis inverse).
    double scale = 1.0;
    for (int i = 0; i < m; ++i) scale = std::max(scale, lp.rows[i].rhs);
    const double delta = 1e-9 * scale / m;

    for (int i = 0; i < m; ++i) {
        rhs_orig[i] = lp.rows[i].rhs;
        rhs[i] = rhs_orig[i] + delta * (i + 1);
        for (const auto& [j, a] : lp.rows[i].terms) {
            T[size_t(i) * ncols + var_pos_col[j]] += a;
            if (var_neg_col[j] >= 0) T[size_t(i) * ncols + var_neg_col[j]] -= a;
        }
        T[size_t(i) * ncols + ns + i] = 1.0;
        basis[i] = ns + i;
    }
    for (int k = 0; k < ns; ++k) cost[k] = col_sign[k] * lp.c[col_var[k]];

    std::vector<double> red = cost;

    LPResult res;
    for (long iter = 0; iter < max_iters; ++iter) {
        int enter = -1;
        double best = kCostTol;
        for (int j = 0; j < ncols; ++j)
            if (red[j] > best) { best = red[j]; enter = j; }
        if (enter < 0) {
            res.optimal = true;
            res.iterations = iter;
            break;
        }
        int leave = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
            const double a = T[size_t(i) * ncols + enter];
            if (a > kPivTol) {
                const double ratio = rhs[i] / a;
                if (ratio < best_ratio * (1.0 - 1e-14) - 1e-300 ||
                    (std::abs(ratio - best_ratio) <= 1e-14 * (1.0 + best_ratio) &&
                     (leave < 0 || basis[i] < basis[leave]))) {
                    best_ratio = ratio;
                    leave = i;
                }
            }
        }
        if (leave < 0) {
            res.unbounded = true;
            res.iterations = iter;
            return res;
        }

        double* prow = &T[size_t(leave) * ncols];
        const double inv = 1.0 / prow[enter];
        for (int j = 0; j < ncols; ++j) prow[j] *= inv;
        rhs[leave] *= inv;
        prow[enter] = 1.0;
        for (int i = 0; i < m; ++i) {
            if (i == leave) continue;
            double* row = &T[size_t(i) * ncols];
            const double f = row[enter];
            if (f == 0.0) continue;
            for (int j = 0; j < ncols; ++j) row[j] -= f * prow[j];
            row[enter] = 0.0;
            rhs[i] -= f * rhs[leave];
            if (rhs[i] < 0.0) rhs[i] = 0.0;
        }
        const double f = red[enter];
        for (int j = 0; j < ncols; ++j) red[j] -= f * prow[j];
        red[enter] = 0.0;
        basis[leave] = enter;
    }
    if (!res.optimal) return res;

    // Undo the perturbation: x_B = Binv * rhs_orig, with Binv sitting in the
    // slack columns of the final tableau.
    std::vector<double> xb(m, 0.0);
    double min_xb = 0.0;
    for (int i = 0; i < m; ++i) {
        double v = 0.0;
        const double* row = &T[size_t(i) * ncols + ns];
        for (int k = 0; k < m; ++k)
            if (rhs_orig[k] != 0.0) v += row[k] * rhs_orig[k];
        xb[i] = v;
        min_xb = std::min(min_xb, v);
    }
    if (min_xb < -1e-9 * scale) {
        // basis infeasible for the exact rhs: fall back to the perturbed
        // solution, whose objective differs by O(delta)
        xb = rhs;
    }

    res.x.assign(n, 0.0);
    for (int i = 0; i < m; ++i)
        if (basis[i] < ns) res.x[col_var[basis[i]]] += col_sign[basis[i]] * xb[i];
    double v = 0.0;
    for (int j = 0; j < n; ++j) v += lp.c[j] * res.x[j];
    res.value = v;
    return res;
}

} // namespace bdvarmin
