#include <doctest.h>

#include <cmath>
#include <random>

#include "bdvarmin/grid.hpp"
#include "bdvarmin/rigid.hpp"

using namespace bdvarmin;

namespace {
VectorField random_field(const GridDomain& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d(0.0, 1.0);
    VectorField u(g);
    for (auto& v : u.data()) v = {d(rng), d(rng)};
    return u;
}
} // namespace

TEST_CASE("rigid basis construction") {
    const GridDomain g(10, 14, 0.2);
    const RigidBasis basis(g);
    CHECK(basis.dim() == 3); // n(n+1)/2 for n = 2

    for (int k = 0; k < 3; ++k)
        CHECK(l1_norm_cells(sym_gradient(basis.field(k))) < 1e-12);

    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            CHECK(inner_l2(basis.field(a), basis.field(b)) ==
                  doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-12));
}

TEST_CASE("rigid projection") {
    const GridDomain g(12, 12, 1.0 / 11.0);
    const RigidBasis basis(g);

    SUBCASE("rigid input has zero residual") {
        VectorField r(g);
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                const Vec2 p = g.node_pos(i, j);
                r.at(i, j) = {0.3 - 0.9 * p.y, 0.9 * p.x + 0.1};
            }
        const VectorField res = basis.residual(r);
        CHECK(std::sqrt(inner_l2(res, res)) < 1e-10);
    }

    SUBCASE("recovers the rigid part of an explicit decomposition") {
        // rigid + a part orthogonalized against the rigid space
        VectorField rig(g);
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                const Vec2 p = g.node_pos(i, j);
                rig.at(i, j) = {1.0 - 0.5 * p.y, 0.5 * p.x};
            }
        VectorField bump = random_field(g, 3);
        bump = basis.residual(bump); // orthogonal to the rigid space
        VectorField u(g);
        for (int k = 0; k < g.num_nodes(); ++k) u[k] = rig[k] + bump[k];
        const VectorField proj = basis.project(u);
        double err = 0.0;
        for (int k = 0; k < g.num_nodes(); ++k) err += (proj[k] - rig[k]).dot(proj[k] - rig[k]);
        CHECK(std::sqrt(err * g.h() * g.h()) < 1e-10);
    }

    SUBCASE("projection is idempotent and orthogonal") {
        const VectorField u = random_field(g, 5);
        const VectorField p1 = basis.project(u);
        const VectorField p2 = basis.project(p1);
        for (int k = 0; k < g.num_nodes(); ++k) CHECK((p1[k] - p2[k]).norm() < 1e-13);
        const VectorField res = basis.residual(u);
        for (int k = 0; k < 3; ++k)
            CHECK(std::abs(inner_l2(basis.field(k), res)) < 1e-10);
    }

    SUBCASE("L^p stability constant is finite") {
        // |Pi u|_p <= C |u|_p over a small ensemble; C reported
        double worst = 0.0;
        for (unsigned s = 0; s < 10; ++s) {
            const VectorField u = random_field(g, 100 + s);
            const VectorField p = basis.project(u);
            double nu = 0.0, np = 0.0;
            for (int k = 0; k < g.num_nodes(); ++k) {
                nu += std::pow(u[k].norm(), 3.0);
                np += std::pow(p[k].norm(), 3.0);
            }
            worst = std::max(worst, std::cbrt(np) / std::cbrt(nu));
        }
        CHECK(worst < 10.0);
        MESSAGE("empirical L^3 stability constant of the rigid projection: ", worst);
    }
}

TEST_CASE("simultaneous Poincare/Korn ratios") {
    const GridDomain g(16, 16, 1.0 / 15.0);

    SUBCASE("quadratic shear profile") {
        VectorField u(g);
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                const Vec2 p = g.node_pos(i, j);
                u.at(i, j) = {0.5 * p.y * p.y, 0.0};
            }
        const KornPoincareResult r1 = korn_poincare_check(u, 1.0, 2.0);
        CHECK(std::isfinite(r1.ratio_q));
        CHECK(std::isfinite(r1.ratio_p));
        CHECK(r1.ratio_q > 0.0);
        CHECK(r1.ratio_p > 0.0);

        // grid stability: the same profile on a finer grid stays in a band
        const GridDomain g2(32, 32, 1.0 / 31.0);
        VectorField u2(g2);
        for (int j = 0; j < g2.ny(); ++j)
            for (int i = 0; i < g2.nx(); ++i) {
                const Vec2 p = g2.node_pos(i, j);
                u2.at(i, j) = {0.5 * p.y * p.y, 0.0};
            }
        const KornPoincareResult r2 = korn_poincare_check(u2, 1.0, 2.0);
        CHECK(r2.ratio_q == doctest::Approx(r1.ratio_q).epsilon(0.25));
        CHECK(r2.ratio_p == doctest::Approx(r1.ratio_p).epsilon(0.25));
    }

    SUBCASE("ratios are scale invariant") {
        const VectorField u = random_field(g, 17);
        const KornPoincareResult a = korn_poincare_check(u, 1.5, 2.0);
        VectorField v(g);
        for (int k = 0; k < g.num_nodes(); ++k) v[k] = u[k] * 37.0;
        const KornPoincareResult b = korn_poincare_check(v, 1.5, 2.0);
        CHECK(a.ratio_q == doctest::Approx(b.ratio_q).epsilon(1e-11));
        CHECK(a.ratio_p == doctest::Approx(b.ratio_p).epsilon(1e-11));
    }

    SUBCASE("adding a rigid deformation does not change the ratios") {
        const VectorField u = random_field(g, 19);
        VectorField v = u;
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                const Vec2 p = g.node_pos(i, j);
                v.at(i, j) += {2.0 - 3.0 * p.y, 3.0 * p.x - 1.0};
            }
        const KornPoincareResult a = korn_poincare_check(u, 1.0, 2.0);
        const KornPoincareResult b = korn_poincare_check(v, 1.0, 2.0);
        CHECK(a.ratio_q == doctest::Approx(b.ratio_q).epsilon(1e-9));
        CHECK(a.ratio_p == doctest::Approx(b.ratio_p).epsilon(1e-9));
    }

    SUBCASE("rigid input is rejected") {
        VectorField r(g);
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                const Vec2 p = g.node_pos(i, j);
                r.at(i, j) = {-p.y, p.x};
            }
        CHECK_THROWS(korn_poincare_check(r, 1.0, 2.0));
    }

    SUBCASE("empirical constant growth across the resolution ladder") {
        // fixed-seed ensemble; the sup ratio should grow by less than 2x
        // from 8x8 to 64x64
        auto ensemble_sup = [](int n) {
            const GridDomain gg(n, n, 1.0 / (n - 1));
            double sup = 0.0;
            for (unsigned s = 0; s < 8; ++s) {
                const VectorField u = random_field(gg, 500 + s);
                const KornPoincareResult r = korn_poincare_check(u, 2.0, 2.0);
                sup = std::max(sup, r.ratio_p);
            }
            return sup;
        };
        const double s8 = ensemble_sup(8);
        const double s64 = ensemble_sup(64);
        MESSAGE("Korn ratio_p sup: 8x8 -> ", s8, ", 64x64 -> ", s64);
        CHECK(s64 < 2.0 * s8);
    }
}
