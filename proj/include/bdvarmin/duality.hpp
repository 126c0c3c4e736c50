#ifndef BDVARMIN_DUALITY_HPP
#define BDVARMIN_DUALITY_HPP

#include "bdvarmin/grid.hpp"
#include "bdvarmin/integrand.hpp"

namespace bdvarmin {

struct DualCandidate {
    SymTensorField chi;
    double div_residual = 0.0;
    bool feasible = false; // |chi| <= c_inf pointwise and div residual below tol

    explicit DualCandidate(const GridDomain& g) : chi(g) {}
};

/// L^2 residual of the discrete divergence over interior nodes.
double div_residual(const SymTensorField& sigma);

/// Least-squares projection onto the kernel of the discrete divergence
/// (normal equations via sparse Cholesky, one refinement pass).
SymTensorField project_div_free(const SymTensorField& sigma);

DualCandidate make_dual_candidate(const SymTensorField& sigma, const Integrand& f,
                                  double div_tol = 1e-8);

/// Global rescaling chi <- theta chi with theta = min(1, cap / max|chi|);
/// preserves div-freeness, restores |chi| <= cap.
SymTensorField scale_into_ball(const SymTensorField& sigma, double cap);

/// R[chi] = sum <chi, eps(u0)> h^2 - sum f*(chi) h^2 for feasible chi,
/// -infinity otherwise.
double dual_value(const DualCandidate& chi, const VectorField& u0, const Integrand& f);

/// primal - R[chi]; nonnegative up to round-off by weak duality.
double duality_gap(double primal_value, const DualCandidate& chi, const VectorField& u0,
                   const Integrand& f);

/// Dual Lipschitz norm of a nodal functional T (density with respect to the
/// h^2 node measure):
///   max  sum T . phi h^2   over per-edge, per-component slopes bounded by 1
/// with phi = 0 outside the interior sub-rectangle at `margin` nodes from the
/// boundary. Solved exactly by the dense simplex, one component at a time.
double lip_dual_norm(const VectorField& T, int margin = 1);
double lip_dual_norm_scalar(const std::vector<double>& T, const GridDomain& g,
                            int margin = 1);

} // namespace bdvarmin

#endif
