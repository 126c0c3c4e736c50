#include <doctest.h>

#include <cmath>
#include <random>

#include "bdvarmin/integrand.hpp"

using namespace bdvarmin;

namespace {

// 1-homogeneous test profile g(r) = r (used away from the origin).
struct LinearProfile final : RadialProfile {
    double value(double r) const override { return r; }
    double d1(double) const override { return 1.0; }
    double d2(double) const override { return 0.0; }
    double recession_slope() const override { return 1.0; }
    std::string name() const override { return "linear"; }
};

Sym2 random_sym(std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> d(0.0, scale);
    return {d(rng), d(rng), d(rng)};
}

// independent bipolar evaluation by golden-section search over s
double bipolar(const RadialProfile& g, double r) {
    const double cinf = std::min(g.recession_slope(), 1e6);
    double a = 0.0, b = cinf;
    auto val = [&](double s) { return r * s - g.conjugate(s); };
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    for (int it = 0; it < 200; ++it) {
        if (val(x1) < val(x2)) a = x1; else b = x2;
        x1 = b - phi * (b - a);
        x2 = a + phi * (b - a);
    }
    return val(0.5 * (a + b));
}

} // namespace

TEST_CASE("phi_mu values") {
    CHECK(phi_mu(1.7, 0.0) == 0.0);
    CHECK(phi_mu(3.0, 1.0) == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-12));
    CHECK(phi_mu(2.0, 1.0) == doctest::Approx(M_PI / 4.0 - 0.5 * std::log(2.0)).epsilon(1e-12));
    CHECK_THROWS(phi_mu(1.0, 1.0));
    CHECK_THROWS(phi_mu(0.5, 1.0));

    // closed forms against the collapsed-double-integral quadrature route
    for (double mu : {1.2, 1.5, 2.0, 2.5, 3.0})
        for (double r : {0.1, 0.5, 1.0, 3.0, 10.0})
            CHECK(phi_mu(mu, r) == doctest::Approx(phi_mu_quadrature(mu, r)).epsilon(1e-11));
}

TEST_CASE("recession constants") {
    CHECK(phi_mu_recession(3.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(phi_mu_recession(2.0) == doctest::Approx(M_PI / 2.0).epsilon(1e-12));
    // t g(R/t) sampling cross-check; the error decays like t^(mu-1), so the
    // check is a two-point convergence test rather than a fixed tolerance.
    for (double mu : {1.3, 2.0, 3.0}) {
        const PhiMuProfile g(mu);
        const double cinf = g.recession_slope();
        const double e1 = std::abs(cinf - g.value(4096.0) / 4096.0);
        const double e2 = std::abs(cinf - g.value(65536.0) / 65536.0);
        CHECK(e2 < e1);
        CHECK(e2 < 0.05 * cinf);
    }
    LinearProfile lin;
    CHECK(lin.recession_slope() == 1.0);
    CHECK(make_integrand("quadratic").recession() == kInf);
}

TEST_CASE("gradient and hessian of radial integrands") {
    const Integrand area = make_integrand("area");

    SUBCASE("area profile at the origin") {
        const Sym2 zero{};
        CHECK(area.grad(zero).norm() == 0.0);
        double H[9];
        area.hess_matrix(zero, H);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                CHECK(H[3 * a + b] == doctest::Approx(a == b ? 1.0 : 0.0));
    }

    SUBCASE("duality relation f + f*(f') = <f', xi>") {
        std::mt19937_64 rng(9);
        const Integrand phi2 = make_integrand("phi_mu:2.0");
        for (int it = 0; it < 100; ++it) {
            const Sym2 xi = random_sym(rng, 2.0);
            for (const Integrand* f : {&area, &phi2}) {
                const Sym2 gr = f->grad(xi);
                const double lhs = f->eval(xi) + f->conjugate(gr.norm());
                CHECK(lhs == doctest::Approx(gr.inner(xi)).epsilon(1e-9));
            }
        }
    }

    SUBCASE("hessian quadratic form matches the matrix form") {
        std::mt19937_64 rng(10);
        const Integrand f = make_integrand("phi_mu:1.5");
        for (int it = 0; it < 50; ++it) {
            const Sym2 B = random_sym(rng, 3.0);
            const Sym2 A = random_sym(rng);
            double H[9];
            f.hess_matrix(B, H);
            const double a[3] = {A.xx, A.yy, M_SQRT2 * A.xy};
            double q = 0.0;
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) q += a[r] * H[3 * r + c] * a[c];
            CHECK(q == doctest::Approx(f.hess_quadratic_form(B, A)).epsilon(1e-11));
        }
    }

    SUBCASE("ellipticity pinch for phi_mu samples") {
        std::mt19937_64 rng(11);
        for (double mu : {1.2, 2.0, 3.0}) {
            const Integrand f = make_integrand("phi_mu:" + std::to_string(mu));
            // radial eigenvalue gives exactly 1 below; the tangential one
            // tops out at the recession slope above
            const double Lam = std::max(1.0, phi_mu_recession(mu));
            for (int it = 0; it < 200; ++it) {
                const Sym2 B = random_sym(rng, 10.0);
                const Sym2 A = random_sym(rng);
                const double a2 = A.inner(A);
                const double q = f.hess_quadratic_form(B, A);
                const double b2 = B.inner(B);
                CHECK(q * std::pow(1.0 + b2, 0.5 * mu) / a2 >= 1.0 - 1e-9);
                CHECK(q * std::sqrt(1.0 + b2) / a2 <= Lam * (1.0 + 1e-9));
            }
        }
    }
}

TEST_CASE("conjugates") {
    const Integrand area = make_integrand("area");
    CHECK(area.conjugate(0.0) == doctest::Approx(-1.0));
    for (double s : {0.1, 0.5, 0.9})
        CHECK(area.conjugate(s) == doctest::Approx(-std::sqrt(1.0 - s * s)).epsilon(1e-10));
    CHECK(area.conjugate(1.5) == kInf);

    const Integrand quad = make_integrand("quadratic");
    for (double s : {0.0, 0.7, 3.0})
        CHECK(quad.conjugate(s) == doctest::Approx(0.5 * s * s).epsilon(1e-10));

    SUBCASE("generic search agrees with the closed form") {
        const PhiMuProfile p2(2.0);
        for (double s : {0.2, 0.8, 1.4}) {
            const double generic = p2.RadialProfile::conjugate(s);
            CHECK(generic == doctest::Approx(-std::log(std::cos(s))).epsilon(1e-8));
        }
    }

    SUBCASE("bipolar identity g** = g on a sampled grid") {
        const AreaProfile area_p;
        const PhiMuProfile p15(1.5);
        for (double r : {0.0, 0.25, 1.0, 2.5, 6.0}) {
            CHECK(bipolar(area_p, r) == doctest::Approx(area_p.value(r)).epsilon(1e-8));
            CHECK(bipolar(p15, r) == doctest::Approx(p15.value(r)).epsilon(1e-8));
        }
    }

    SUBCASE("1-homogeneous profile has an indicator conjugate") {
        LinearProfile lin;
        CHECK(lin.conjugate(0.5) == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(lin.conjugate(1.5) == kInf);
    }
}

TEST_CASE("convexity and growth sandwich of shipped profiles") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> U(0.0, 25.0);
    for (const char* name : {"area", "quadratic", "phi_mu:1.2", "phi_mu:2.0", "phi_mu:3.0"}) {
        const Integrand f = make_integrand(name);
        for (int it = 0; it < 10000; ++it) {
            const double a = U(rng), b = U(rng);
            const double mid = f.profile->value(0.5 * (a + b));
            const double avg = 0.5 * (f.profile->value(a) + f.profile->value(b));
            CHECK(mid <= avg + 1e-12);
        }
    }
    for (const char* name : {"area", "phi_mu:1.2", "phi_mu:2.0", "phi_mu:3.0"}) {
        const Integrand f = make_integrand(name);
        const GrowthCertificate c = linear_growth_certificate(f);
        CHECK(c.c0 > 0.0);
        for (int it = 0; it < 2000; ++it) {
            const double r = U(rng) * 4.0;
            const double g = f.profile->value(r);
            CHECK(g >= c.c0 * r - c.c2 - 1e-10);
            CHECK(g <= c.c1 * (1.0 + r) + 1e-10);
        }
    }
    // positive 1-homogeneity of the recession cone
    const Integrand f = make_integrand("phi_mu:2.0");
    const double cinf = f.recession();
    for (double t : {0.5, 2.0, 7.0})
        CHECK(cinf * t * 1.0 == doctest::Approx(t * (cinf * 1.0)));
}

TEST_CASE("V_alpha transform") {
    SUBCASE("origin and small-exponent limit") {
        CHECK(v_alpha(Sym2{0, 0, 0}, 1.5).norm() == 0.0);
        const Sym2 xi{0.3, -0.7, 0.2};
        const Sym2 v = v_alpha(xi, 1.0 + 1e-9);
        CHECK((v - xi).norm() < 1e-7);
        CHECK_THROWS(v_alpha(xi, 1.0));
        CHECK_THROWS(v_alpha(xi, 2.0));
    }
    SUBCASE("unit sphere value") {
        for (double alpha : {1.1, 1.5, 1.9}) {
            const Sym2 xi{1.0, 0.0, 0.0};
            CHECK(v_alpha(xi, alpha).norm() ==
                  doctest::Approx(std::pow(2.0, 0.5 * (1.0 - alpha))).epsilon(1e-12));
            // the lower bound has slack at |xi| = 1
            CHECK(M_SQRT2 * v_alpha(xi, alpha).norm() >= 1.0);
        }
    }
    SUBCASE("certificates over random samples") {
        for (double alpha : {1.1, 1.5, 1.9}) {
            const VAlphaCertificate c = valpha_check(alpha, 10000, 5);
            CHECK(c.min_margin_pointwise >= -1e-12);
            CHECK(c.equiv_ratio_min >= (2.0 - alpha) * (1.0 - 1e-9));
            CHECK(c.equiv_ratio_max <= 3.0);
            CHECK(c.integral_slack >= -1e-12);
            CHECK(c.pass);
        }
    }
}

TEST_CASE("mu-ellipticity certification") {
    SUBCASE("phi_3 passes with constants near nominal") {
        const Integrand f = make_integrand("phi_mu:3.0");
        const EllipticityCertificate c = certify_mu_ellipticity(f, 3.0, 10000);
        CHECK(c.pass);
        CHECK(c.lambda_hat >= 0.5);
        CHECK(c.lambda_hat <= 2.0);
        CHECK(c.Lambda_hat >= 0.5);
        CHECK(c.Lambda_hat <= 2.0);
    }
    SUBCASE("quadratic claiming mu = 2 fails the upper pinch") {
        const Integrand f = make_integrand("quadratic");
        const EllipticityCertificate c = certify_mu_ellipticity(f, 2.0, 10000);
        CHECK_FALSE(c.upper_stable);
        CHECK_FALSE(c.pass);
    }
    SUBCASE("smoothed modulus claiming mu near 1: reported, not asserted") {
        const Integrand f = make_integrand("abs_smoothed:0.05");
        const EllipticityCertificate c = certify_mu_ellipticity(f, 1.01, 10000);
        CHECK(std::isfinite(c.lambda_hat));
        CHECK(std::isfinite(c.Lambda_hat));
        MESSAGE("abs_smoothed mu=1.01: lambda=", c.lambda_hat, " Lambda=", c.Lambda_hat,
                " pass=", c.pass);
    }
}

TEST_CASE("perturbed integrands") {
    const Integrand f = make_integrand("area");
    const GridDomain g(5, 5, 0.25);
    SymTensorField eps(g);
    for (auto& m : eps.data()) m = {0.5, 0.0, 0.25};

    const double A = ekeland_A(eps);
    double expect = 1.0;
    for (const auto& m : eps.data()) expect += (1.0 + m.inner(m)) * g.h() * g.h();
    CHECK(A == doctest::Approx(expect).epsilon(1e-14));

    const PerturbedIntegrand fk = make_ekeland_perturbation(f, 3, eps);
    const Sym2 xi{1.0, -0.5, 0.2};
    CHECK(fk.eval(xi) ==
          doctest::Approx(f.eval(xi) + (1.0 + xi.inner(xi)) / (18.0 * A)).epsilon(1e-13));

    const PerturbedIntegrand fj = make_viscosity_perturbation(f, 8.0);
    CHECK(fj.eval(xi) == doctest::Approx(f.eval(xi) + xi.inner(xi) / 16.0).epsilon(1e-13));
    // gradients shift by the quadratic term
    const Sym2 dg = fj.grad(xi) - f.grad(xi);
    CHECK((dg - xi * (1.0 / 8.0)).norm() < 1e-13);
}
