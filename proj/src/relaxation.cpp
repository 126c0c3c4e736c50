#include "bdvarmin/relaxation.hpp"

#include <cmath>
#include <stdexcept>

#include "bdvarmin/rigid.hpp"

namespace bdvarmin {

double SymMeasure::total_variation() const {
    const double h2 = grid.h() * grid.h();
    double s = 0.0;
    for (const Sym2& m : ac_density.data()) s += m.norm();
    s *= h2;
    return s + singular_mass();
}

double SymMeasure::singular_mass() const {
    double s = 0.0;
    for (const Sym2& m : jumps_x) s += m.norm();
    for (const Sym2& m : jumps_y) s += m.norm();
    return s * face_length();
}

SymMeasure bd_measure(const DiscreteBDField& u) {
    const GridDomain& g = u.grid;
    SymMeasure m(g);
    if (u.smooth_part) m.ac_density = sym_gradient(*u.smooth_part);
    if (!u.cell_values.empty()) {
        const int cx = g.cells_x(), cy = g.cells_y();
        for (int j = 0; j < cy; ++j)
            for (int i = 0; i + 1 < cx; ++i)
                m.jumps_x[j * (cx - 1) + i] =
                    sym_dyad(u.cell_value(i + 1, j) - u.cell_value(i, j), {1.0, 0.0});
        for (int j = 0; j + 1 < cy; ++j)
            for (int i = 0; i < cx; ++i)
                m.jumps_y[j * cx + i] =
                    sym_dyad(u.cell_value(i, j + 1) - u.cell_value(i, j), {0.0, 1.0});
    }
    return m;
}

double eval_convex_measure(const Integrand& f, const SymMeasure& m, const CellBox& region) {
    const GridDomain& g = m.grid;
    const int cx = g.cells_x(), cy = g.cells_y();
    const int i1 = region.i1 < 0 ? cx : region.i1;
    const int j1 = region.j1 < 0 ? cy : region.j1;
    const double h2 = g.h() * g.h();
    const double cinf = f.recession();

    double ac = 0.0;
    for (int j = region.j0; j < j1; ++j)
        for (int i = region.i0; i < i1; ++i) ac += f.eval(m.ac_density.at(i, j));
    ac *= h2;

    double sing = 0.0;
    for (int j = region.j0; j < j1; ++j)
        for (int i = region.i0; i < i1 - 1; ++i) sing += m.jumps_x[j * (cx - 1) + i].norm();
    for (int j = region.j0; j < j1 - 1; ++j)
        for (int i = region.i0; i < i1; ++i) sing += m.jumps_y[j * cx + i].norm();
    sing *= m.face_length();

    if (!std::isfinite(cinf)) return sing > 0.0 ? kInf : ac;
    return ac + cinf * sing;
}

namespace {

struct BoundaryFace {
    Vec2 nu;      // outward normal
    int na, nb;   // endpoint node indices of the face
    int ci, cj;   // adjacent cell
};

template <typename Fn>
void for_each_boundary_face(const GridDomain& g, Fn&& fn) {
    const int nx = g.nx(), ny = g.ny();
    for (int j = 0; j + 1 < ny; ++j) { // left edge x = 0, nu = (-1, 0)
        fn(BoundaryFace{{-1.0, 0.0}, g.node_index(0, j), g.node_index(0, j + 1), 0, j});
    }
    for (int j = 0; j + 1 < ny; ++j) { // right edge, nu = (1, 0)
        fn(BoundaryFace{{1.0, 0.0}, g.node_index(nx - 1, j), g.node_index(nx - 1, j + 1),
                        g.cells_x() - 1, j});
    }
    for (int i = 0; i + 1 < nx; ++i) { // bottom edge y = 0, nu = (0, -1)
        fn(BoundaryFace{{0.0, -1.0}, g.node_index(i, 0), g.node_index(i + 1, 0), i, 0});
    }
    for (int i = 0; i + 1 < nx; ++i) { // top edge, nu = (0, 1)
        fn(BoundaryFace{{0.0, 1.0}, g.node_index(i, ny - 1), g.node_index(i + 1, ny - 1), i,
                        g.cells_y() - 1});
    }
}

Vec2 trace_on_face(const DiscreteBDField& u, const BoundaryFace& f) {
    Vec2 t;
    if (u.smooth_part) {
        const auto& d = u.smooth_part->data();
        t = (d[f.na] + d[f.nb]) * 0.5;
    }
    if (!u.cell_values.empty()) t += u.cell_values[u.grid.cell_index(f.ci, f.cj)];
    return t;
}

Vec2 trace_on_face(const VectorField& v, const BoundaryFace& f) {
    return (v.data()[f.na] + v.data()[f.nb]) * 0.5;
}

} // namespace

double relaxed_functional(const DiscreteBDField& u, const VectorField& u0,
                          const Integrand& f) {
    const double cinf = f.recession();
    const SymMeasure m = bd_measure(u);
    const double value = eval_convex_measure(f, m);
    double bdry = 0.0;
    for_each_boundary_face(u.grid, [&](const BoundaryFace& face) {
        const Vec2 mismatch = trace_on_face(u0, face) - trace_on_face(u, face);
        bdry += sym_dyad(mismatch, face.nu).norm();
    });
    if (!std::isfinite(cinf))
        return bdry > 0.0 ? kInf : value; // superlinear cone prices any mismatch at infinity
    return value + cinf * bdry * u.grid.h();
}

double boundary_mismatch(const DiscreteBDField& u, const VectorField& u0) {
    double worst = 0.0;
    for_each_boundary_face(u.grid, [&](const BoundaryFace& face) {
        worst = std::max(worst, (trace_on_face(u0, face) - trace_on_face(u, face)).norm());
    });
    return worst;
}

NogapReport nogap_check(const Integrand& f, const VectorField& u0,
                        const Schedule& schedule, double C) {
    NogapReport rep;
    const SequenceResult seq = run_viscosity_sequence(f, schedule, u0);
    if (seq.solutions.empty()) return rep;
    rep.min_Fj = kInf;
    rep.min_F = kInf;
    for (const auto& s : seq.solutions) {
        rep.Fj_values.push_back(s.energy_Fj);
        rep.F_values.push_back(s.energy_F);
        rep.min_Fj = std::min(rep.min_Fj, s.energy_Fj);
        rep.min_F = std::min(rep.min_F, s.energy_F);
    }
    const DiscreteBDField limit = DiscreteBDField::from_smooth(seq.solutions.back().v);
    rep.relaxed_of_limit = relaxed_functional(limit, u0, f);
    rep.tol = C * u0.grid().h();
    rep.one_sided_ok = rep.relaxed_of_limit <= rep.min_Fj + rep.tol;
    return rep;
}

UniquenessReport uniqueness_check(const Integrand& f, const VectorField& u0, double j,
                                  double tol) {
    const GridDomain& g = u0.grid();
    SolveOptions a;
    a.tol = tol;
    a.random_init = true;
    a.init_seed = 101;
    const ViscositySolution s1 = minimize_Fj(f, j, u0, a);

    // Second run: different seed, warm-started through a coarse sub-schedule.
    SolveOptions b;
    b.tol = tol;
    b.random_init = true;
    b.init_seed = 707;
    b.init_noise = 0.02;
    VectorField warm = u0;
    for (double jw : {j / 4.0, j / 2.0}) {
        if (jw >= 1.0) {
            SolveOptions w = b;
            const ViscositySolution sw = minimize_Fj(f, jw, warm, w);
            warm = sw.v;
            b.random_init = false;
        }
    }
    SolveOptions b2 = b;
    b2.random_init = false;
    ViscositySolution s2(g);
    {
        // restart from the warm iterate: pin its boundary back to u0 values
        VectorField start = warm;
        for (int jj = 0; jj < g.ny(); ++jj)
            for (int ii = 0; ii < g.nx(); ++ii)
                if (g.is_boundary(ii, jj)) start.at(ii, jj) = u0.at(ii, jj);
        s2 = minimize_Fj(f, j, start, b2);
    }

    UniquenessReport rep;
    rep.converged = s1.converged && s2.converged;
    const SymTensorField e1 = sym_gradient(s1.v);
    const SymTensorField e2 = sym_gradient(s2.v);
    const double h2 = g.h() * g.h();
    double dist = 0.0, base = 0.0;
    for (size_t c = 0; c < e1.data().size(); ++c) {
        dist += (e1.data()[c] - e2.data()[c]).norm();
        base += e1.data()[c].norm();
    }
    rep.eps_l1_distance = dist * h2;
    rep.eps_l1_relative = base > 0.0 ? dist / base : 0.0;

    VectorField diff(g);
    for (int k = 0; k < g.num_nodes(); ++k) diff[k] = s1.v[k] - s2.v[k];
    const RigidBasis basis(g);
    const VectorField rigid = basis.project(diff);
    VectorField rest(g);
    for (int k = 0; k < g.num_nodes(); ++k) rest[k] = diff[k] - rigid[k];
    rep.rigid_norm = std::sqrt(inner_l2(rigid, rigid));
    rep.post_rigid_l2 = std::sqrt(inner_l2(rest, rest));
    return rep;
}

double rigid_boundary_penalty(const VectorField& R, const Integrand& f) {
    const double cinf = f.recession();
    double s = 0.0;
    for_each_boundary_face(R.grid(), [&](const BoundaryFace& face) {
        const Vec2 t = trace_on_face(R, face) * (-1.0);
        s += sym_dyad(t, face.nu).norm();
    });
    return cinf * s * R.grid().h();
}

BoundaryAttainment boundary_attainment_check(const DiscreteBDField& u,
                                             const VectorField& u0, const Integrand& f,
                                             double trace_tol) {
    BoundaryAttainment out;
    out.mismatch = boundary_mismatch(u, u0);
    out.attains = out.mismatch <= trace_tol;

    const GridDomain& g = u.grid;
    const RigidBasis basis(g);
    auto penalty_of = [&](const std::array<double, 3>& c) {
        VectorField R(g);
        for (int k = 0; k < g.num_nodes(); ++k)
            R[k] = basis.field(0)[k] * c[0] + basis.field(1)[k] * c[1] +
                   basis.field(2)[k] * c[2];
        return rigid_boundary_penalty(R, f);
    };

    // The penalty is convex and 1-homogeneous in the coefficients; minimize
    // over the unit sphere by coarse sampling plus local refinement.
    out.margin = kInf;
    const int N = 24;
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < 2 * N; ++b) {
            const double th = M_PI * (a + 0.5) / N;
            const double ph = M_PI * b / N;
            const std::array<double, 3> c = {std::sin(th) * std::cos(ph),
                                             std::sin(th) * std::sin(ph), std::cos(th)};
            const double v = penalty_of(c);
            if (v < out.margin) {
                out.margin = v;
                out.witness = c;
            }
        }
    // local refinement around the best direction
    std::array<double, 3> best = out.witness;
    double step = 0.15;
    for (int pass = 0; pass < 60; ++pass) {
        bool improved = false;
        for (int d = 0; d < 3; ++d)
            for (double sgn : {-1.0, 1.0}) {
                std::array<double, 3> c = best;
                c[d] += sgn * step;
                const double nrm = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
                for (double& x : c) x /= nrm;
                const double v = penalty_of(c);
                if (v < out.margin) {
                    out.margin = v;
                    best = c;
                    improved = true;
                }
            }
        if (!improved) step *= 0.5;
        if (step < 1e-6) break;
    }
    out.witness = best;
    return out;
}

} // namespace bdvarmin
