#include "bdvarmin/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "bdvarmin/duality.hpp"
#include "bdvarmin/kernels.hpp"

namespace bdvarmin {

namespace {

struct InteriorMap {
    std::vector<int> node_to_dof; // -1 for boundary nodes
    std::vector<int> dof_to_node;
    int ndof = 0;

    explicit InteriorMap(const GridDomain& g) : node_to_dof(g.num_nodes(), -1) {
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i)
                if (g.is_interior(i, j)) {
                    node_to_dof[g.node_index(i, j)] = ndof;
                    dof_to_node.push_back(g.node_index(i, j));
                    ndof += 2;
                }
    }
};

// Rows of d eps / d u for one corner: (xx, yy, sqrt(2) xy) against (u_x, u_y).
inline void corner_rows(double sx, double sy, double B[3][2]) {
    B[0][0] = sx;            B[0][1] = 0.0;
    B[1][0] = 0.0;           B[1][1] = sy;
    B[2][0] = M_SQRT1_2 * sy; B[2][1] = M_SQRT1_2 * sx;
}

template <typename F>
double energy_impl(const F& f, const VectorField& u) {
    const GridDomain& g = u.grid();
    const double h2 = g.h() * g.h();
    const SymTensorField eps = sym_gradient(u);
    std::vector<double> partial(eps.data().size());
    for (size_t c = 0; c < eps.data().size(); ++c) partial[c] = f.eval(eps.data()[c]);
    return kernels::deterministic_sum(partial) * h2;
}

// Energy gradient with respect to interior dofs.
template <typename F>
void assemble_gradient(const F& f, const VectorField& u, const InteriorMap& map,
                       Eigen::VectorXd& grad) {
    const GridDomain& g = u.grid();
    const double h2 = g.h() * g.h();
    const double inv2h = 1.0 / (2.0 * g.h());
    const SymTensorField eps = sym_gradient(u);
    grad.setZero(map.ndof);
    for (int j = 0; j < g.cells_y(); ++j)
        for (int i = 0; i < g.cells_x(); ++i) {
            const Sym2 s = f.grad(eps.at(i, j)) * h2;
            for (int dj = 0; dj <= 1; ++dj)
                for (int di = 0; di <= 1; ++di) {
                    const int dof = map.node_to_dof[g.node_index(i + di, j + dj)];
                    if (dof < 0) continue;
                    const double sx = (di == 1 ? inv2h : -inv2h);
                    const double sy = (dj == 1 ? inv2h : -inv2h);
                    grad[dof] += s.xx * sx + s.xy * sy;
                    grad[dof + 1] += s.yy * sy + s.xy * sx;
                }
        }
}

template <typename F>
void assemble_hessian(const F& f, const VectorField& u, const InteriorMap& map,
                      double floor, Eigen::SparseMatrix<double>& H) {
    const GridDomain& g = u.grid();
    const double h2 = g.h() * g.h();
    const double inv2h = 1.0 / (2.0 * g.h());
    const SymTensorField eps = sym_gradient(u);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(size_t(g.num_cells()) * 64 + map.ndof);
    double H3[9];
    for (int j = 0; j < g.cells_y(); ++j)
        for (int i = 0; i < g.cells_x(); ++i) {
            f.hess_matrix(eps.at(i, j), H3);
            int dofs[4];
            double B[4][3][2];
            for (int dj = 0; dj <= 1; ++dj)
                for (int di = 0; di <= 1; ++di) {
                    const int c = 2 * dj + di;
                    dofs[c] = map.node_to_dof[g.node_index(i + di, j + dj)];
                    corner_rows(di == 1 ? inv2h : -inv2h, dj == 1 ? inv2h : -inv2h, B[c]);
                }
            for (int a = 0; a < 4; ++a) {
                if (dofs[a] < 0) continue;
                for (int b = 0; b < 4; ++b) {
                    if (dofs[b] < 0) continue;
                    // block = B_a^T H3 B_b * h^2
                    for (int p = 0; p < 2; ++p)
                        for (int q = 0; q < 2; ++q) {
                            double v = 0.0;
                            for (int r = 0; r < 3; ++r)
                                for (int c2 = 0; c2 < 3; ++c2)
                                    v += B[a][r][p] * H3[3 * r + c2] * B[b][c2][q];
                            if (v != 0.0)
                                trip.emplace_back(dofs[a] + p, dofs[b] + q, v * h2);
                        }
                }
            }
        }
    for (int d = 0; d < map.ndof; ++d) trip.emplace_back(d, d, floor);
    H.resize(map.ndof, map.ndof);
    H.setFromTriplets(trip.begin(), trip.end());
}

void apply_dofs(VectorField& u, const InteriorMap& map, const Eigen::VectorXd& delta,
                double t) {
    for (size_t k = 0; k < map.dof_to_node.size(); ++k) {
        Vec2& v = u.data()[map.dof_to_node[k]];
        v.x += t * delta[2 * int(k)];
        v.y += t * delta[2 * int(k) + 1];
    }
}

} // namespace

double energy(const PerturbedIntegrand& p, const VectorField& u) { return energy_impl(p, u); }
double energy(const Integrand& f, const VectorField& u) { return energy_impl(f, u); }

double el_residual(const VectorField& v, const Integrand& f) {
    const GridDomain& g = v.grid();
    const SymTensorField eps = sym_gradient(v);
    SymTensorField sigma(g);
    for (size_t c = 0; c < eps.data().size(); ++c) sigma.data()[c] = f.grad(eps.data()[c]);
    const VectorField d = divergence(sigma);
    double s = 0.0;
    for (int j = 1; j < g.ny() - 1; ++j)
        for (int i = 1; i < g.nx() - 1; ++i) s += d.at(i, j).dot(d.at(i, j));
    return std::sqrt(s * g.h() * g.h());
}

double el_residual(const VectorField& v, const PerturbedIntegrand& fj) {
    const GridDomain& g = v.grid();
    const SymTensorField eps = sym_gradient(v);
    SymTensorField sigma(g);
    for (size_t c = 0; c < eps.data().size(); ++c) sigma.data()[c] = fj.grad(eps.data()[c]);
    const VectorField d = divergence(sigma);
    double s = 0.0;
    for (int j = 1; j < g.ny() - 1; ++j)
        for (int i = 1; i < g.nx() - 1; ++i) s += d.at(i, j).dot(d.at(i, j));
    return std::sqrt(s * g.h() * g.h());
}

double el_residual_lip_dual(const VectorField& v, const Integrand& f, int margin) {
    const GridDomain& g = v.grid();
    const SymTensorField eps = sym_gradient(v);
    SymTensorField sigma(g);
    for (size_t c = 0; c < eps.data().size(); ++c) sigma.data()[c] = f.grad(eps.data()[c]);
    VectorField d = divergence(sigma);
    // The residual pairing is phi -> -sum <div sigma, phi> h^2; the dual norm
    // is symmetric under sign so the divergence field itself is passed.
    return lip_dual_norm(d, margin);
}

ViscositySolution minimize_Fj(const Integrand& f, double j, const VectorField& u0,
                              const SolveOptions& opts) {
    if (!(j >= 1.0)) throw std::invalid_argument("minimize_Fj: j >= 1");
    const GridDomain& g = u0.grid();
    const PerturbedIntegrand fj = make_viscosity_perturbation(f, j);
    const InteriorMap map(g);

    ViscositySolution sol(g);
    sol.j = j;
    sol.v = u0;
    if (opts.random_init) {
        std::mt19937_64 rng(opts.init_seed);
        std::normal_distribution<double> noise(0.0, opts.init_noise);
        for (int nj = 1; nj < g.ny() - 1; ++nj)
            for (int ni = 1; ni < g.nx() - 1; ++ni) {
                sol.v.at(ni, nj).x += noise(rng);
                sol.v.at(ni, nj).y += noise(rng);
            }
    }

    Eigen::VectorXd grad;
    Eigen::SparseMatrix<double> H;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;

    double E = energy_impl(fj, sol.v);
    sol.energy_history.push_back(E);

    for (int it = 0; it < opts.max_iters; ++it) {
        sol.el_residual = el_residual(sol.v, fj);
        if (sol.el_residual <= opts.tol) {
            sol.converged = true;
            break;
        }
        assemble_gradient(fj, sol.v, map, grad);
        double floor = opts.hess_floor;
        Eigen::VectorXd step;
        for (int attempt = 0; attempt < 8; ++attempt) {
            assemble_hessian(fj, sol.v, map, floor, H);
            ldlt.compute(H);
            if (ldlt.info() == Eigen::Success) {
                step = ldlt.solve(-grad);
                if (ldlt.info() == Eigen::Success && step.allFinite()) break;
            }
            floor = std::max(floor * 1e4, 1e-10);
        }
        if (!step.size()) break;

        const double slope = grad.dot(step);
        double t = 1.0;
        const double E0 = E;
        bool accepted = false;
        while (t >= 1e-12) {
            apply_dofs(sol.v, map, step, t);
            const double Et = energy_impl(fj, sol.v);
            if (Et <= E0 + 1e-4 * t * slope || Et < E0) {
                E = Et;
                accepted = true;
                break;
            }
            apply_dofs(sol.v, map, step, -t);
            t *= 0.5;
        }
        sol.newton_iters = it + 1;
        if (!accepted) break;
        sol.energy_history.push_back(E);
    }

    sol.el_residual = el_residual(sol.v, fj);
    if (sol.el_residual <= opts.tol) sol.converged = true;
    sol.energy_Fj = energy_impl(fj, sol.v);
    sol.energy_F = energy_impl(f, sol.v);
    sol.eps_l1 = l1_norm_cells(sym_gradient(sol.v));
    return sol;
}

SymTensorField stress_tau(const VectorField& v, const Integrand& f) {
    const SymTensorField eps = sym_gradient(v);
    SymTensorField out(v.grid());
    for (size_t c = 0; c < eps.data().size(); ++c) out.data()[c] = f.grad(eps.data()[c]);
    return out;
}

SymTensorField stress_sigma(const VectorField& v, const Integrand& f, double j) {
    const PerturbedIntegrand fj = make_viscosity_perturbation(f, j);
    const SymTensorField eps = sym_gradient(v);
    SymTensorField out(v.grid());
    for (size_t c = 0; c < eps.data().size(); ++c) out.data()[c] = fj.grad(eps.data()[c]);
    return out;
}

namespace {
double h1_seminorm_cells(const SymTensorField& s) {
    const GridDomain& g = s.grid();
    const double invh = 1.0 / g.h();
    double acc = 0.0;
    for (int j = 0; j < g.cells_y(); ++j)
        for (int i = 0; i < g.cells_x(); ++i) {
            if (i + 1 < g.cells_x()) {
                const Sym2 d = (s.at(i + 1, j) - s.at(i, j)) * invh;
                acc += d.inner(d);
            }
            if (j + 1 < g.cells_y()) {
                const Sym2 d = (s.at(i, j + 1) - s.at(i, j)) * invh;
                acc += d.inner(d);
            }
        }
    return std::sqrt(acc * g.h() * g.h());
}
} // namespace

SequenceResult run_viscosity_sequence(const Integrand& f, const Schedule& schedule,
                                      const VectorField& u0) {
    if (schedule.j_values.empty())
        throw std::invalid_argument("run_viscosity_sequence: empty schedule");
    for (size_t k = 1; k < schedule.j_values.size(); ++k)
        if (!(schedule.j_values[k] > schedule.j_values[k - 1]))
            throw std::invalid_argument("run_viscosity_sequence: j values must increase");

    SequenceResult res;
    SolveOptions opts;
    opts.tol = schedule.tol;
    opts.max_iters = schedule.max_iters;

    const bool linear_growth = std::isfinite(f.recession());
    const GrowthCertificate growth =
        linear_growth ? linear_growth_certificate(f) : GrowthCertificate{};
    const double area = u0.grid().cell_area_total();

    SequenceMonitors& mon = res.monitors;
    mon.lip_f = f.lipschitz();
    mon.monotone_slack = -kInf;

    for (size_t k = 0; k < schedule.j_values.size(); ++k) {
        ViscositySolution sol = minimize_Fj(f, schedule.j_values[k], u0, opts);
        const bool failed = !sol.converged;
        if (k > 0) {
            // F_{j+1}[v_{j+1}] <= F_{j+1}[v_j] <= F_j[v_j]
            const PerturbedIntegrand fnext =
                make_viscosity_perturbation(f, schedule.j_values[k]);
            const double Fnext_prev = energy_impl(fnext, res.solutions.back().v);
            mon.monotone_slack = std::max(mon.monotone_slack, sol.energy_Fj - Fnext_prev);
            mon.monotone_slack =
                std::max(mon.monotone_slack, Fnext_prev - res.solutions.back().energy_Fj);
        }
        const SymTensorField tau = stress_tau(sol.v, f);
        for (const Sym2& t : tau.data()) mon.sup_tau_inf = std::max(mon.sup_tau_inf, t.norm());
        mon.sigma_h1_seminorm.push_back(
            h1_seminorm_cells(stress_sigma(sol.v, f, schedule.j_values[k])));
        mon.worst_eps_l1 = std::max(mon.worst_eps_l1, sol.eps_l1);
        res.solutions.push_back(std::move(sol));
        if (failed) return res; // abort with partial results
    }

    if (linear_growth) {
        mon.coercivity_bound =
            (res.solutions.front().energy_Fj + growth.c2 * area) / growth.c0;
        mon.coercivity_ok = mon.worst_eps_l1 <= mon.coercivity_bound + 1e-12;
        mon.stress_ok = mon.sup_tau_inf <= mon.lip_f * (1.0 + 1e-12);
    } else {
        // superlinear profiles carry no linear-growth coercivity certificate
        mon.coercivity_bound = kInf;
        mon.coercivity_ok = true;
        mon.stress_ok = true;
    }
    mon.monotone_ok = mon.monotone_slack <= 1e-10;
    res.ok = mon.coercivity_ok && mon.monotone_ok && mon.stress_ok;
    return res;
}

double lbmo_monitor(const std::vector<const VectorField*>& fields, int margin) {
    if (fields.empty()) return 0.0;
    if (margin < 1)
        throw std::invalid_argument("lbmo_monitor: the window must be strictly interior");
    const GridDomain& g = fields.front()->grid();
    const int nx = g.nx(), ny = g.ny();
    if (nx - 2 * margin <= 0 || ny - 2 * margin <= 0)
        throw std::invalid_argument("lbmo_monitor: margin swallows the domain");
    double best = 0.0;
    const int wmax = (std::min(nx, ny) - 1) / 2;
    for (const VectorField* f : fields) {
        for (int w = 1; w <= wmax; ++w) {
            const int W = 2 * w + 1;
            const auto table = kernels::cube_oscillation_table(f->data(), nx, ny, W);
            const int cx = nx - W + 1;
            for (int j = margin; j < ny - margin; ++j)
                for (int i = margin; i < nx - margin; ++i) {
                    const int ci = i - w, cj = j - w;
                    if (ci < 0 || cj < 0 || ci >= cx || cj >= ny - W + 1) continue;
                    best = std::max(best, table[cj * cx + ci]);
                }
        }
    }
    return best;
}

} // namespace bdvarmin
