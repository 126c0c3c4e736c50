#ifndef BDVARMIN_INTEGRAND_HPP
#define BDVARMIN_INTEGRAND_HPP

#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "bdvarmin/grid.hpp"

namespace bdvarmin {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Convex radial profile g: [0,inf) -> R with g(0) finite. The integrand on
/// symmetric matrices is f(xi) = g(|xi|) (Frobenius norm).
class RadialProfile {
public:
    virtual ~RadialProfile() = default;
    virtual double value(double r) const = 0;
    virtual double d1(double r) const = 0;
    virtual double d2(double r) const = 0;
    /// Slope of the asymptotic cone, lim g(r)/r; +inf for superlinear profiles.
    virtual double recession_slope() const = 0;
    /// Legendre transform g*(s) = sup_r (s r - g(r)); +inf outside [0, c_inf].
    virtual double conjugate(double s) const;
    virtual std::string name() const = 0;
};

/// phi_mu(r) = int_0^r int_0^s (1+t^2)^(-mu/2) dt ds, mu > 1.
/// Closed forms for mu = 2 and mu = 3; a cumulative Gauss table otherwise.
class PhiMuProfile final : public RadialProfile {
public:
    explicit PhiMuProfile(double mu);
    double value(double r) const override;
    double d1(double r) const override;
    double d2(double r) const override;
    double recession_slope() const override;
    double conjugate(double s) const override;
    std::string name() const override;
    double mu() const { return mu_; }

private:
    double mu_;
    double cinf_;
    // cumulative table for the non-closed-form range of mu
    std::vector<double> rk_, gk_, gpk_;
    void build_table();
    double d1_table(double r) const;
    double value_table(double r) const;
};

/// g(r) = sqrt(1+r^2); minimum value 1, recession slope 1.
class AreaProfile final : public RadialProfile {
public:
    double value(double r) const override { return std::sqrt(1.0 + r * r); }
    double d1(double r) const override { return r / std::sqrt(1.0 + r * r); }
    double d2(double r) const override { double q = 1.0 + r * r; return 1.0 / (q * std::sqrt(q)); }
    double recession_slope() const override { return 1.0; }
    double conjugate(double s) const override {
        if (s > 1.0) return kInf;
        return -std::sqrt(std::max(0.0, 1.0 - s * s));
    }
    std::string name() const override { return "area"; }
};

class QuadraticProfile final : public RadialProfile {
public:
    double value(double r) const override { return 0.5 * r * r; }
    double d1(double r) const override { return r; }
    double d2(double) const override { return 1.0; }
    double recession_slope() const override { return kInf; }
    double conjugate(double s) const override { return 0.5 * s * s; }
    std::string name() const override { return "quadratic"; }
};

/// g(r) = sqrt(delta^2 + r^2) - delta, a smoothing of r -> r.
class SmoothedAbsProfile final : public RadialProfile {
public:
    explicit SmoothedAbsProfile(double delta) : delta_(delta) {}
    double value(double r) const override { return std::sqrt(delta_ * delta_ + r * r) - delta_; }
    double d1(double r) const override { return r / std::sqrt(delta_ * delta_ + r * r); }
    double d2(double r) const override {
        double q = delta_ * delta_ + r * r;
        return delta_ * delta_ / (q * std::sqrt(q));
    }
    double recession_slope() const override { return 1.0; }
    std::string name() const override { return "abs_smoothed"; }

private:
    double delta_;
};

/// Radial convex integrand on Sym2 with ellipticity metadata.
struct Integrand {
    std::shared_ptr<const RadialProfile> profile;
    double mu_claim = 0.0; // 0: no claim

    double eval(const Sym2& xi) const { return profile->value(xi.norm()); }

    Sym2 grad(const Sym2& xi) const {
        const double r = xi.norm();
        if (r < 1e-300) return {0.0, 0.0, 0.0};
        return xi * (profile->d1(r) / r);
    }

    /// Quadratic form <f''(B) A, A>; radial structure
    /// f''(B) = g''(r) P_B + (g'(r)/r) (I - P_B).
    double hess_quadratic_form(const Sym2& B, const Sym2& A) const {
        const double r = B.norm();
        const double a2 = A.inner(A);
        if (r < 1e-300) return profile->d2(0.0) * a2;
        const double proj = B.inner(A) / r;
        const double tang = profile->d1(r) / r;
        return profile->d2(r) * proj * proj + tang * (a2 - proj * proj);
    }

    /// Hessian as a symmetric 3x3 matrix in the orthonormal coordinates
    /// (xx, yy, sqrt(2) xy); row-major.
    void hess_matrix(const Sym2& B, double out[9]) const;

    double recession() const { return profile->recession_slope(); }
    double conjugate(double s) const { return profile->conjugate(s); }
    double lipschitz() const { return profile->recession_slope(); }
};

/// Ekeland/viscosity-style perturbation f(xi) + quad_weight * (c + |xi|^2),
/// with c = 1 for the Ekeland form and c = 0 for the viscosity form.
struct PerturbedIntegrand {
    Integrand base;
    double quad_weight = 0.0;
    bool ekeland_form = false;

    double eval(const Sym2& xi) const {
        const double n2 = xi.inner(xi);
        return base.eval(xi) + quad_weight * ((ekeland_form ? 1.0 : 0.0) + n2);
    }
    Sym2 grad(const Sym2& xi) const { return base.grad(xi) + xi * (2.0 * quad_weight); }
    double hess_quadratic_form(const Sym2& B, const Sym2& A) const {
        return base.hess_quadratic_form(B, A) + 2.0 * quad_weight * A.inner(A);
    }
    void hess_matrix(const Sym2& B, double out[9]) const {
        base.hess_matrix(B, out);
        out[0] += 2.0 * quad_weight;
        out[4] += 2.0 * quad_weight;
        out[8] += 2.0 * quad_weight;
    }
};

/// A_k normalization for the Ekeland form: 1 + sum_cells (1 + |eps|^2) h^2.
double ekeland_A(const SymTensorField& eps_ref);
PerturbedIntegrand make_ekeland_perturbation(const Integrand& f, int k,
                                             const SymTensorField& eps_ref);
PerturbedIntegrand make_viscosity_perturbation(const Integrand& f, double j);

/// phi_mu value; closed forms for mu in {2,3}, table-backed otherwise.
double phi_mu(double mu, double r);
/// Direct adaptive quadrature of int_0^r (r-t)(1+t^2)^(-mu/2) dt, the
/// collapsed double integral; independent route used as a cross-check.
double phi_mu_quadrature(double mu, double r, double abs_tol = 1e-13);
/// c_inf(mu) = int_0^inf (1+t^2)^(-mu/2) dt via the Gamma-function identity.
double phi_mu_recession(double mu);

/// Registry lookup: "phi_mu:3.0", "area", "quadratic", "abs_smoothed:0.05".
Integrand make_integrand(const std::string& spec);

/// Linear-growth certificate c0 |xi| - c2 <= f(xi) <= c1 (1 + |xi|) with
/// c0 = c_inf / 2; R0 is where g' crosses c0.
struct GrowthCertificate {
    double c0 = 0.0, c1 = 0.0, c2 = 0.0, R0 = 0.0;
};
GrowthCertificate linear_growth_certificate(const Integrand& f);

/// V_alpha(xi) = (1 + |xi|^2)^((1-alpha)/2) xi, 1 < alpha < 2.
Sym2 v_alpha(const Sym2& xi, double alpha);
Vec2 v_alpha(const Vec2& xi, double alpha);

struct VAlphaCertificate {
    double min_margin_pointwise = 0.0;  // sqrt(2)|V| - min(|xi|, |xi|^(2-alpha)), worst case
    double equiv_ratio_min = 0.0;       // |V(xi)-V(eta)| / ((1+|xi|^2+|eta|^2)^((1-alpha)/2) |xi-eta|)
    double equiv_ratio_max = 0.0;
    double integral_slack = 0.0;        // L(Omega) + c(p) sum|V|^p - sum|u|^((2-alpha)p), >= 0
    bool pass = false;
};

/// Runs the three checks on n_samples random pairs plus one sampled field;
/// the two-point equivalence is checked against lower constant (2 - alpha)
/// and the recorded upper constant c_hi.
VAlphaCertificate valpha_check(double alpha, int n_samples, unsigned seed,
                               double p = 2.0, double c_hi = 3.0);

struct EllipticityCertificate {
    double lambda_hat = 0.0;   // inf <f''(B)A,A> (1+|B|^2)^(mu/2) / |A|^2
    double Lambda_hat = 0.0;   // sup <f''(B)A,A> (1+|B|^2)^(1/2) / |A|^2
    double Lambda_inner = 0.0; // same sup over the inner |B| range
    bool upper_stable = false; // Lambda_hat within 10% of Lambda_inner
    bool pass = false;         // lambda_hat > 0 and upper_stable
};

/// Samples random (A,B) with |B| log-uniform up to 1e3 (plus B = 0) and
/// reports the empirical ellipticity constants for the claimed mu.
EllipticityCertificate certify_mu_ellipticity(const Integrand& f, double mu,
                                              int n_samples, unsigned seed = 12345);

} // namespace bdvarmin

#endif
