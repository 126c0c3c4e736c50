#ifndef BDVARMIN_SIMPLEX_HPP
#define BDVARMIN_SIMPLEX_HPP

#include <utility>
#include <vector>

namespace bdvarmin {

/// maximize c . x  subject to  G x <= b  with b >= 0, and x_j >= 0 where
/// nonneg[j] is set (free otherwise). The origin must be feasible, which all
/// call sites here guarantee by construction.
struct LinearProgram {
    int n = 0;
    std::vector<double> c;
    std::vector<char> nonneg; // empty: all free
    struct Row {
        std::vector<std::pair<int, double>> terms;
        double rhs = 0.0;
    };
    std::vector<Row> rows;
};

struct LPResult {
    bool optimal = false;
    bool unbounded = false;
    double value = 0.0;
    std::vector<double> x;
    long iterations = 0;
};

/// Dense-tableau primal simplex with a slack start; Dantzig pricing with a
/// Bland fallback once degenerate pivots accumulate.
LPResult solve_lp(const LinearProgram& lp, long max_iters = 2000000);

} // namespace bdvarmin

#endif
