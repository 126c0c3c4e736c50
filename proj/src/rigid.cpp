#include "bdvarmin/rigid.hpp"

#include <cmath>
#include <stdexcept>

namespace bdvarmin {

double inner_l2(const VectorField& a, const VectorField& b) {
    const double h2 = a.grid().h() * a.grid().h();
    double s = 0.0;
    const auto& va = a.data();
    const auto& vb = b.data();
    for (size_t k = 0; k < va.size(); ++k) s += va[k].dot(vb[k]);
    return s * h2;
}

RigidBasis::RigidBasis(const GridDomain& g) : grid_(g) {
    VectorField t1(g), t2(g), rot(g);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const Vec2 p = g.node_pos(i, j);
            t1.at(i, j) = {1.0, 0.0};
            t2.at(i, j) = {0.0, 1.0};
            rot.at(i, j) = {-p.y, p.x};
        }
    basis_ = {t1, t2, rot};
    // modified Gram-Schmidt in the discrete L^2 inner product
    for (int k = 0; k < 3; ++k) {
        for (int m = 0; m < k; ++m) {
            const double c = inner_l2(basis_[m], basis_[k]);
            auto& v = basis_[k].data();
            const auto& w = basis_[m].data();
            for (size_t n = 0; n < v.size(); ++n) v[n] += w[n] * (-c);
        }
        const double nrm = std::sqrt(inner_l2(basis_[k], basis_[k]));
        for (auto& v : basis_[k].data()) v = v * (1.0 / nrm);
    }
}

std::array<double, 3> RigidBasis::coefficients(const VectorField& u) const {
    return {inner_l2(basis_[0], u), inner_l2(basis_[1], u), inner_l2(basis_[2], u)};
}

VectorField RigidBasis::project(const VectorField& u) const {
    const auto c = coefficients(u);
    VectorField out(grid_);
    for (size_t n = 0; n < out.data().size(); ++n)
        out.data()[n] = basis_[0].data()[n] * c[0] + basis_[1].data()[n] * c[1] +
                        basis_[2].data()[n] * c[2];
    return out;
}

VectorField RigidBasis::residual(const VectorField& u) const {
    VectorField out = project(u);
    for (size_t n = 0; n < out.data().size(); ++n)
        out.data()[n] = u.data()[n] - out.data()[n];
    return out;
}

KornPoincareResult korn_poincare_check(const VectorField& u, double q, double p) {
    if (!(q >= 1.0 && p >= q && p > 1.0))
        throw std::invalid_argument("korn_poincare_check: need 1 <= q <= p, p > 1");
    const GridDomain& g = u.grid();
    const double h2 = g.h() * g.h();

    const SymTensorField eps = sym_gradient(u);
    double eps_q = 0.0, eps_p = 0.0, eps_max = 0.0;
    for (const Sym2& e : eps.data()) {
        const double r = e.norm();
        eps_max = std::max(eps_max, r);
        eps_q += std::pow(r, q);
        eps_p += std::pow(r, p);
    }
    eps_q *= h2;
    eps_p *= h2;
    double u_max = 0.0;
    for (const Vec2& v : u.data()) u_max = std::max(u_max, v.norm());
    const double L = std::max(g.nx(), g.ny()) * g.h();
    if (eps_max <= 1e-12 * std::max(u_max / L, 1e-300))
        throw std::invalid_argument("korn_poincare_check: input is rigid (eps = 0)");

    RigidBasis basis(g);
    const VectorField res = basis.residual(u);

    double num_q = 0.0;
    for (const Vec2& v : res.data()) num_q += std::pow(v.norm(), q);
    num_q *= h2;

    const TensorField grad = full_gradient(res);
    double num_p = 0.0;
    for (int j = 0; j < g.cells_y(); ++j)
        for (int i = 0; i < g.cells_x(); ++i)
            num_p += std::pow(grad.at(i, j).norm(), p);
    num_p *= h2;

    return {num_q / eps_q, num_p / eps_p};
}

} // namespace bdvarmin
