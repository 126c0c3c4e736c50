#ifndef BDVARMIN_RELAXATION_HPP
#define BDVARMIN_RELAXATION_HPP

#include <array>
#include <optional>
#include <vector>

#include "bdvarmin/grid.hpp"
#include "bdvarmin/integrand.hpp"
#include "bdvarmin/solver.hpp"

namespace bdvarmin {

/// Piecewise-constant displacement per cell plus an optional smooth nodal
/// part; the natural carrier of a symmetric-gradient measure with explicit
/// jump part.
struct DiscreteBDField {
    GridDomain grid;
    std::vector<Vec2> cell_values; // one per cell; empty means zero
    std::optional<VectorField> smooth_part;

    explicit DiscreteBDField(const GridDomain& g) : grid(g) {}

    static DiscreteBDField from_smooth(const VectorField& v) {
        DiscreteBDField f(v.grid());
        f.smooth_part = v;
        return f;
    }

    Vec2 cell_value(int i, int j) const {
        return cell_values.empty() ? Vec2{} : cell_values[grid.cell_index(i, j)];
    }
};

/// Symmetric-gradient measure: absolutely continuous density per cell plus
/// per-interior-face jump matrices weighted by face length.
struct SymMeasure {
    GridDomain grid;
    SymTensorField ac_density;
    // Vertical faces between cells (i,j) and (i+1,j), normal e1:
    std::vector<Sym2> jumps_x; // (cells_x-1) * cells_y
    // Horizontal faces between cells (i,j) and (i,j+1), normal e2:
    std::vector<Sym2> jumps_y; // cells_x * (cells_y-1)

    explicit SymMeasure(const GridDomain& g)
        : grid(g),
          ac_density(g),
          jumps_x(std::max(0, (g.cells_x() - 1) * g.cells_y())),
          jumps_y(std::max(0, g.cells_x() * (g.cells_y() - 1))) {}

    double face_length() const { return grid.h(); }
    /// sum |ac| h^2 + sum |jump| len
    double total_variation() const;
    double singular_mass() const;
};

SymMeasure bd_measure(const DiscreteBDField& u);

struct CellBox {
    int i0 = 0, j0 = 0, i1 = -1, j1 = -1; // half-open; -1 means full extent
};

/// f[m](region) = sum f(ac) h^2 + c_inf sum |jump| len over the region;
/// +infinity when c_inf = inf meets nonzero singular mass.
double eval_convex_measure(const Integrand& f, const SymMeasure& m,
                           const CellBox& region = {});

/// Interior a.c. + interior singular + boundary penalty
/// sum_faces f_inf((tr u0 - tr u) (.) nu) len over the rectangle boundary.
double relaxed_functional(const DiscreteBDField& u, const VectorField& u0,
                          const Integrand& f);

/// Largest boundary-trace mismatch |tr u - tr u0| over boundary faces.
double boundary_mismatch(const DiscreteBDField& u, const VectorField& u0);

struct NogapReport {
    std::vector<double> Fj_values;   // F_j[v_j]
    std::vector<double> F_values;    // F[v_j]
    double relaxed_of_limit = 0.0;
    double min_Fj = 0.0;
    double min_F = 0.0;
    double tol = 0.0; // C h
    bool one_sided_ok = false;
};

NogapReport nogap_check(const Integrand& f, const VectorField& u0,
                        const Schedule& schedule, double C = 2.0);

struct UniquenessReport {
    double eps_l1_distance = 0.0;
    double eps_l1_relative = 0.0;
    double rigid_norm = 0.0;     // |Pi (u1 - u2)|_(L^2)
    double post_rigid_l2 = 0.0;  // |(u1-u2) - Pi (u1-u2)|_(L^2)
    bool converged = false;
};

/// Two independent solves of the same stabilized problem (seeded Newton
/// starts; the second pass warm-starts through a sub-schedule).
UniquenessReport uniqueness_check(const Integrand& f, const VectorField& u0, double j,
                                  double tol = 1e-10);

struct BoundaryAttainment {
    bool attains = false;     // trace mismatch below tolerance
    double mismatch = 0.0;
    double margin = 0.0;      // min over unit rigid deformations of the penalty
    std::array<double, 3> witness{}; // minimizing rigid coefficients
};

/// Penalty integral sum f_inf(-R (.) nu) len for rigid R; the margin is the
/// minimum over the L^2-unit sphere of rigid coefficients.
BoundaryAttainment boundary_attainment_check(const DiscreteBDField& u,
                                             const VectorField& u0, const Integrand& f,
                                             double trace_tol = 1e-10);

/// Penalty of one rigid field (helper shared with the tests).
double rigid_boundary_penalty(const VectorField& R, const Integrand& f);

} // namespace bdvarmin

#endif
