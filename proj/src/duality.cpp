#include "bdvarmin/duality.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "bdvarmin/simplex.hpp"

namespace bdvarmin {

namespace {

// eps operator from interior dofs to cell tensors in (xx, yy, sqrt(2) xy)
// coordinates; rows are cells (3 per cell), columns interior dofs.
Eigen::SparseMatrix<double> interior_eps_matrix(const GridDomain& g,
                                                std::vector<int>& node_to_dof) {
    node_to_dof.assign(g.num_nodes(), -1);
    int ndof = 0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.is_interior(i, j)) {
                node_to_dof[g.node_index(i, j)] = ndof;
                ndof += 2;
            }
    const double inv2h = 1.0 / (2.0 * g.h());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(size_t(g.num_cells()) * 24);
    for (int j = 0; j < g.cells_y(); ++j)
        for (int i = 0; i < g.cells_x(); ++i) {
            const int row = 3 * g.cell_index(i, j);
            for (int dj = 0; dj <= 1; ++dj)
                for (int di = 0; di <= 1; ++di) {
                    const int dof = node_to_dof[g.node_index(i + di, j + dj)];
                    if (dof < 0) continue;
                    const double sx = (di == 1 ? inv2h : -inv2h);
                    const double sy = (dj == 1 ? inv2h : -inv2h);
                    trip.emplace_back(row, dof, sx);
                    trip.emplace_back(row + 1, dof + 1, sy);
                    trip.emplace_back(row + 2, dof, M_SQRT1_2 * sy);
                    trip.emplace_back(row + 2, dof + 1, M_SQRT1_2 * sx);
                }
        }
    Eigen::SparseMatrix<double> A(3 * g.num_cells(), ndof);
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

Eigen::VectorXd to_coords(const SymTensorField& s) {
    Eigen::VectorXd v(3 * int(s.data().size()));
    for (size_t c = 0; c < s.data().size(); ++c) {
        v[3 * int(c)] = s.data()[c].xx;
        v[3 * int(c) + 1] = s.data()[c].yy;
        v[3 * int(c) + 2] = M_SQRT2 * s.data()[c].xy;
    }
    return v;
}

void from_coords(const Eigen::VectorXd& v, SymTensorField& s) {
    for (size_t c = 0; c < s.data().size(); ++c) {
        s.data()[c].xx = v[3 * int(c)];
        s.data()[c].yy = v[3 * int(c) + 1];
        s.data()[c].xy = M_SQRT1_2 * v[3 * int(c) + 2];
    }
}

} // namespace

double div_residual(const SymTensorField& sigma) {
    const GridDomain& g = sigma.grid();
    const VectorField d = divergence(sigma);
    double s = 0.0;
    for (int j = 1; j < g.ny() - 1; ++j)
        for (int i = 1; i < g.nx() - 1; ++i) s += d.at(i, j).dot(d.at(i, j));
    return std::sqrt(s * g.h() * g.h());
}

SymTensorField project_div_free(const SymTensorField& sigma) {
    const GridDomain& g = sigma.grid();
    std::vector<int> node_to_dof;
    const Eigen::SparseMatrix<double> A = interior_eps_matrix(g, node_to_dof);
    if (A.cols() == 0) return sigma; // no interior nodes: everything is div-free

    // sigma' = sigma - A x with A^T A x = A^T sigma; pinned boundary makes
    // A injective so the normal system is SPD.
    const Eigen::SparseMatrix<double> N = Eigen::SparseMatrix<double>(A.transpose()) * A;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    ldlt.compute(N);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("project_div_free: singular normal system");
    const Eigen::VectorXd s = to_coords(sigma);
    Eigen::VectorXd rhs = A.transpose() * s;
    Eigen::VectorXd x = ldlt.solve(rhs);
    x += ldlt.solve(rhs - N * x); // one refinement pass
    SymTensorField out(g);
    from_coords(s - A * x, out);
    return out;
}

DualCandidate make_dual_candidate(const SymTensorField& sigma, const Integrand& f,
                                  double div_tol) {
    DualCandidate cand(sigma.grid());
    cand.chi = sigma;
    cand.div_residual = div_residual(sigma);
    const double cinf = f.recession();
    double maxnorm = 0.0;
    for (const Sym2& m : sigma.data()) maxnorm = std::max(maxnorm, m.norm());
    cand.feasible = cand.div_residual <= div_tol &&
                    (!std::isfinite(cinf) || maxnorm <= cinf * (1.0 + 1e-12));
    return cand;
}

SymTensorField scale_into_ball(const SymTensorField& sigma, double cap) {
    double maxnorm = 0.0;
    for (const Sym2& m : sigma.data()) maxnorm = std::max(maxnorm, m.norm());
    SymTensorField out = sigma;
    if (maxnorm > cap && maxnorm > 0.0) {
        const double theta = cap / maxnorm;
        for (Sym2& m : out.data()) m = m * theta;
    }
    return out;
}

double dual_value(const DualCandidate& cand, const VectorField& u0, const Integrand& f) {
    if (!cand.feasible) return -kInf;
    const GridDomain& g = cand.chi.grid();
    const double h2 = g.h() * g.h();
    const double cinf = f.recession();
    const SymTensorField eps0 = sym_gradient(u0);
    double pairing = 0.0, conj = 0.0;
    for (size_t c = 0; c < cand.chi.data().size(); ++c) {
        const Sym2& chi = cand.chi.data()[c];
        pairing += chi.inner(eps0.data()[c]);
        double s = chi.norm();
        if (std::isfinite(cinf)) s = std::min(s, cinf);
        const double fs = f.conjugate(s);
        if (!std::isfinite(fs)) return -kInf;
        conj += fs;
    }
    return (pairing - conj) * h2;
}

double duality_gap(double primal_value, const DualCandidate& cand, const VectorField& u0,
                   const Integrand& f) {
    if (!cand.feasible) throw std::invalid_argument("duality_gap: infeasible candidate");
    return primal_value - dual_value(cand, u0, f);
}

double lip_dual_norm_scalar(const std::vector<double>& T, const GridDomain& g,
                            int margin) {
    if (margin < 1) throw std::invalid_argument("lip_dual_norm: margin >= 1");
    const int nx = g.nx(), ny = g.ny();
    const double h = g.h();
    std::vector<int> var(g.num_nodes(), -1);
    int nv = 0;
    for (int j = margin; j < ny - margin; ++j)
        for (int i = margin; i < nx - margin; ++i) var[g.node_index(i, j)] = nv++;
    if (nv == 0) return 0.0;

    LinearProgram lp;
    lp.n = nv;
    lp.c.assign(nv, 0.0);
    const double h2 = h * h;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int v = var[g.node_index(i, j)];
            if (v >= 0) lp.c[v] = T[g.node_index(i, j)] * h2;
        }
    auto add_edge = [&](int a, int b) {
        const int va = var[a], vb = var[b];
        if (va < 0 && vb < 0) return;
        LinearProgram::Row r1, r2;
        if (va >= 0) r1.terms.push_back({va, 1.0});
        if (vb >= 0) r1.terms.push_back({vb, -1.0});
        r1.rhs = h;
        r2.terms = r1.terms;
        for (auto& t : r2.terms) t.second = -t.second;
        r2.rhs = h;
        lp.rows.push_back(std::move(r1));
        lp.rows.push_back(std::move(r2));
    };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i) add_edge(g.node_index(i, j), g.node_index(i + 1, j));
    for (int j = 0; j + 1 < ny; ++j)
        for (int i = 0; i < nx; ++i) add_edge(g.node_index(i, j), g.node_index(i, j + 1));

    const LPResult res = solve_lp(lp);
    if (!res.optimal) throw std::runtime_error("lip_dual_norm: simplex did not converge");
    return res.value;
}

double lip_dual_norm(const VectorField& T, int margin) {
    const GridDomain& g = T.grid();
    std::vector<double> comp(g.num_nodes());
    double total = 0.0;
    for (int k = 0; k < g.num_nodes(); ++k) comp[k] = T[k].x;
    total += lip_dual_norm_scalar(comp, g, margin);
    for (int k = 0; k < g.num_nodes(); ++k) comp[k] = T[k].y;
    total += lip_dual_norm_scalar(comp, g, margin);
    return total;
}

} // namespace bdvarmin
