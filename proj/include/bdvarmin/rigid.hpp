#ifndef BDVARMIN_RIGID_HPP
#define BDVARMIN_RIGID_HPP

#include <array>

#include "bdvarmin/grid.hpp"

namespace bdvarmin {

/// L^2-orthonormal basis of the rigid deformations x -> Ax + b (skew A) on
/// the grid; Gram-Schmidt applied to {(1,0), (0,1), (-y, x)} nodal samples.
class RigidBasis {
public:
    explicit RigidBasis(const GridDomain& g);

    int dim() const { return 3; }
    const VectorField& field(int k) const { return basis_[k]; }

    /// L^2 projection onto the rigid space; Pi u = sum <b_k, u> b_k.
    VectorField project(const VectorField& u) const;
    /// Coefficients <b_k, u> in the discrete L^2 inner product.
    std::array<double, 3> coefficients(const VectorField& u) const;
    /// Residual u - Pi u.
    VectorField residual(const VectorField& u) const;

    const GridDomain& grid() const { return grid_; }

private:
    GridDomain grid_;
    std::vector<VectorField> basis_;
};

/// Discrete L^2 inner product with h^2 node weights.
double inner_l2(const VectorField& a, const VectorField& b);

struct KornPoincareResult {
    double ratio_q = 0.0; // (int |u - Pi u|^q) / (int |eps(u)|^q)
    double ratio_p = 0.0; // (int |D(u - Pi u)|^p) / (int |eps(u)|^p)
};

/// Both ratios of the simultaneous Poincare/Korn inequalities, computed with
/// the same rigid projection Pi u. Rejects eps(u) = 0 (rigid input).
KornPoincareResult korn_poincare_check(const VectorField& u, double q, double p);

} // namespace bdvarmin

#endif
