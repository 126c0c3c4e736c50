// Acceptance battery: one pass/fail line per criterion, nonzero exit on any
// failure. Expected total runtime: a few minutes on two cores.

#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "bdvarmin/duality.hpp"
#include "bdvarmin/experiment.hpp"
#include "bdvarmin/integrand.hpp"
#include "bdvarmin/kernels.hpp"
#include "bdvarmin/relaxation.hpp"
#include "bdvarmin/rigid.hpp"
#include "bdvarmin/solver.hpp"
#include "bdvarmin/spaces.hpp"

using namespace bdvarmin;

namespace {

int g_failures = 0;

void report(int idx, const std::string& name, bool ok, const std::string& detail = "") {
    std::printf("criterion %02d %-34s %s%s%s\n", idx, name.c_str(), ok ? "PASS" : "FAIL",
                detail.empty() ? "" : "  ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

// 01: integrand exactness
void criterion_integrand_exactness() {
    bool ok = true;
    double worst = 0.0;
    for (int k = 0; k <= 1000; ++k) {
        const double r = 10.0 * k / 1000.0;
        const double closed = std::sqrt(1.0 + r * r) - 1.0;
        worst = std::max(worst, std::abs(phi_mu(3.0, r) - closed));
        worst = std::max(worst, std::abs(phi_mu_quadrature(3.0, r) - closed));
    }
    ok = ok && worst <= 1e-10;
    const double e3 = std::abs(phi_mu_recession(3.0) - 1.0);
    const double e2 = std::abs(phi_mu_recession(2.0) - M_PI / 2.0);
    ok = ok && e3 <= 1e-10 && e2 <= 1e-10;
    report(1, "integrand exactness", ok,
           "max|phi_3 - closed|=" + fmt(worst) + " recession err=" + fmt(std::max(e2, e3)));
}

// 02: Fenchel-Young and the duality relation
void criterion_fenchel_young() {
    std::mt19937_64 rng(20260811);
    std::normal_distribution<double> d(0.0, 2.0);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst_eq = 0.0, worst_sign = 0.0;
    for (const char* name : {"area", "phi_mu:2.0"}) {
        const Integrand f = make_integrand(name);
        const double cinf = f.recession();
        for (int it = 0; it < 1000; ++it) {
            const Sym2 xi{d(rng), d(rng), d(rng)};
            const Sym2 gr = f.grad(xi);
            worst_eq = std::max(
                worst_eq, std::abs(f.eval(xi) + f.conjugate(gr.norm()) - gr.inner(xi)));
            // arbitrary feasible eta: Fenchel-Young holds with the right sign
            Sym2 eta{d(rng), d(rng), d(rng)};
            const double cap = cinf * (0.999 * U(rng));
            if (eta.norm() > cap) eta = eta * (cap / eta.norm());
            worst_sign = std::min(
                worst_sign, f.eval(xi) + f.conjugate(eta.norm()) - eta.inner(xi));
        }
    }
    const bool ok = worst_eq <= 1e-9 && worst_sign >= -1e-9;
    report(2, "Fenchel-Young duality relation", ok,
           "max equality defect=" + fmt(worst_eq) + " min inequality=" + fmt(worst_sign));
}

// 03: mu-ellipticity certification
void criterion_mu_ellipticity() {
    bool ok = true;
    std::string detail;
    for (double mu : {1.2, 1.5, 2.0, 3.0}) {
        const Integrand f = make_integrand("phi_mu:" + std::to_string(mu));
        const EllipticityCertificate c = certify_mu_ellipticity(f, mu, 10000);
        ok = ok && c.pass && c.lambda_hat > 0.0 && c.upper_stable;
        detail += "mu=" + std::to_string(mu).substr(0, 3) + ":(" + fmt(c.lambda_hat) + "," +
                  fmt(c.Lambda_hat) + ") ";
    }
    report(3, "mu-ellipticity certification", ok, detail);
}

// 04: V_alpha suite
void criterion_valpha() {
    bool ok = true;
    double worst_margin = kInf;
    for (double alpha : {1.1, 1.5, 1.9}) {
        const VAlphaCertificate c = valpha_check(alpha, 10000, 7);
        ok = ok && c.pass;
        worst_margin = std::min(worst_margin, c.min_margin_pointwise);
    }
    report(4, "V_alpha estimates", ok, "worst sqrt(2)-bound margin=" + fmt(worst_margin));
}

// 05: solver + duality gaps
void criterion_duality_gaps() {
    const GridDomain g(16, 16, 1.0 / 15.0);
    const VectorField u0 = make_u0("bend:0.5", g);
    double gap_quad = kInf, gap_area = kInf, weak_viol = 0.0;

    {
        const Integrand quad = make_integrand("quadratic");
        const ViscositySolution sol = minimize_Fj(quad, 64.0, u0, {1e-12, 200});
        const SymTensorField chi = project_div_free(stress_tau(sol.v, quad));
        const DualCandidate cand = make_dual_candidate(chi, quad);
        gap_quad = energy(quad, sol.v) - dual_value(cand, u0, quad);
        weak_viol = std::min(weak_viol, gap_quad);
    }
    {
        const Integrand area = make_integrand("area");
        Schedule sched{{1, 4, 16, 64, 256}, 1e-11, 300};
        const SequenceResult seq = run_viscosity_sequence(area, sched, u0);
        const ViscositySolution& last = seq.solutions.back();
        double best = -kInf;
        for (const SymTensorField& raw :
             {stress_sigma(last.v, area, last.j), stress_tau(last.v, area)}) {
            SymTensorField chi = project_div_free(raw);
            chi = scale_into_ball(chi, area.recession());
            const DualCandidate cand = make_dual_candidate(chi, area);
            best = std::max(best, dual_value(cand, u0, area));
        }
        gap_area = last.energy_F - best;
        weak_viol = std::min(weak_viol, gap_area);
        // weak duality against admissible competitors
        std::mt19937_64 rng(5);
        std::normal_distribution<double> d(0.0, 0.3);
        for (int trial = 0; trial < 10; ++trial) {
            VectorField w = u0;
            for (int j = 1; j < g.ny() - 1; ++j)
                for (int i = 1; i < g.nx() - 1; ++i) w.at(i, j) += {d(rng), d(rng)};
            weak_viol = std::min(weak_viol, energy(area, w) - best);
        }
    }
    const bool ok = gap_quad <= 1e-8 && gap_area <= 1e-3 && weak_viol >= -1e-9;
    report(5, "duality gaps", ok,
           "quad=" + fmt(gap_quad) + " area(j=256)=" + fmt(gap_area) +
               " weak-duality min=" + fmt(weak_viol));
}

// 06: viscosity monotonicity and coercivity
void criterion_viscosity_monitors() {
    const GridDomain g(16, 16, 1.0 / 15.0);
    const VectorField u0 = make_u0("bend:0.6", g);
    const Integrand f = make_integrand("phi_mu:1.5");
    Schedule sched{{1, 2, 4, 8, 16, 32, 64, 128, 256}, 1e-10, 300};
    const SequenceResult seq = run_viscosity_sequence(f, sched, u0);
    bool mono = seq.monitors.monotone_slack <= 1e-10;
    for (size_t k = 1; k < seq.solutions.size(); ++k)
        mono = mono && seq.solutions[k].energy_Fj <= seq.solutions[k - 1].energy_Fj + 1e-10;
    const bool ok = mono && seq.monitors.coercivity_ok && seq.monitors.stress_ok;
    report(6, "viscosity monotonicity+coercivity", ok,
           "slack=" + fmt(seq.monitors.monotone_slack) +
               " eps_l1 max=" + fmt(seq.monitors.worst_eps_l1) +
               " bound=" + fmt(seq.monitors.coercivity_bound));
}

// 07: uniqueness modulo rigid deformations
void criterion_uniqueness() {
    const GridDomain g(16, 16, 1.0 / 15.0);
    const VectorField u0 = make_u0("stretch:0.1", g);
    const UniquenessReport rep =
        uniqueness_check(make_integrand("phi_mu:1.2"), make_u0("bend:0.5", g), 64.0, 1e-10);
    const bool ok = rep.converged && rep.eps_l1_relative <= 1e-4 &&
                    rep.post_rigid_l2 <= 1e-4 && rep.rigid_norm <= 1e-4;
    report(7, "uniqueness modulo rigid", ok,
           "rel eps dist=" + fmt(rep.eps_l1_relative) +
               " post-rigid L2=" + fmt(rep.post_rigid_l2));
}

// 08: dual-norm bound for difference quotients
void criterion_negsob() {
    const GridDomain g(8, 8, 1.0 / 7.0);
    const double h2 = g.h() * g.h();
    std::mt19937_64 rng(88);
    std::normal_distribution<double> d(0.0, 1.0);
    double worst = -kInf;
    bool ok = true;
    for (int trial = 0; trial < 10; ++trial) {
        VectorField v(g);
        for (auto& x : v.data()) x = {d(rng), d(rng)};
        double l1 = 0.0;
        for (const auto& x : v.data()) l1 += x.norm1();
        l1 *= h2;
        for (int axis : {0, 1}) {
            const VectorField dq = translate_diff(v, axis, 1, DiffVariant::Forward, true);
            VectorField T(g);
            for (int j = 0; j < dq.grid().ny(); ++j)
                for (int i = 0; i < dq.grid().nx(); ++i) T.at(i, j) = dq.at(i, j);
            const double nrm = lip_dual_norm(T, 1);
            worst = std::max(worst, nrm - l1);
            ok = ok && nrm <= l1 + 1e-12;
        }
    }
    report(8, "difference-quotient dual norm", ok, "max(norm - |v|_L1)=" + fmt(worst));
}

// 09: log-convexity of fractional sharp maximal functions
void criterion_logconvexity() {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> d(0.0, 1.0);
    double worst = kInf;
    for (int trial = 0; trial < 20; ++trial) {
        ScalarSamples u(16, 16, 1.0 / 15.0);
        for (auto& v : u.values) v = d(rng);
        worst = std::min(worst, logconvexity_check(u, 0.25, 0.75, 0.5));
        worst = std::min(worst, logconvexity_check(u, 0.4, 0.9, 0.3));
    }
    report(9, "log-convexity margins", worst >= -1e-12, "min margin=" + fmt(worst));
}

// 10: Dorronsoro equivalence band
void criterion_doro_band() {
    const double C = 8.0; // recorded from the corpus; regression band
    bool ok = true;
    double lo = kInf, hi = 0.0;
    for (int n : {16, 32, 64}) {
        ScalarSamples sinu(n, n, 1.0 / (n - 1));
        ScalarSamples bump(n, n, 1.0 / (n - 1));
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const double x = i / (n - 1.0), y = j / (n - 1.0);
                sinu.at(i, j) = std::sin(2 * M_PI * x) * std::cos(2 * M_PI * y);
                bump.at(i, j) = std::exp(-20.0 * ((x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5)));
            }
        for (const auto* u : {&sinu, &bump})
            for (double s : {0.3, 0.5, 0.7}) {
                const double r = doro_ratio(*u, s, 2.0);
                ok = ok && r >= 1.0 / C && r <= C;
                lo = std::min(lo, r);
                hi = std::max(hi, r);
            }
    }
    report(10, "Dorronsoro equivalence band", ok,
           "ratios in [" + fmt(lo) + "," + fmt(hi) + "], band [1/8,8]");
}

// 11: endpoint failure of the interpolation embedding
void criterion_bbm() {
    const int nx = 2049;
    bool ok = true;
    double prev = 0.0;
    double total_growth = 0.0;
    int doublings = 0;
    for (int k = 2; k <= 64; k *= 2) {
        const ScalarSamples u = make_bbm_ramp(k, nx);
        double mx = 0.0, tv = 0.0;
        for (int i = 0; i < nx; ++i) mx = std::max(mx, std::abs(u.at(i)));
        for (int i = 0; i + 1 < nx; ++i) tv += std::abs(u.at(i + 1) - u.at(i));
        ok = ok && mx == 1.0 && tv == 2.0;
        const double g2 = std::pow(gagliardo(u, 0.5, 2.0), 2.0);
        if (k > 2) {
            total_growth += g2 - prev;
            ++doublings;
        }
        prev = g2;
    }
    const double avg_growth = total_growth / doublings;
    ok = ok && avg_growth >= 0.5 * std::log(2.0);
    report(11, "endpoint embedding failure", ok,
           "avg gagliardo^2 growth per doubling=" + fmt(avg_growth) +
               " (required >= " + fmt(0.5 * std::log(2.0)) + ")");
}

// 12: growth of the gradient-to-strain mass ratio
void criterion_ornstein() {
    OrnsteinOptions opts;
    const auto ladder = ornstein_ladder({8, 16, 32}, opts);
    const bool ok = ladder.size() == 3 && ladder[1].ratio >= 1.01 * ladder[0].ratio &&
                    ladder[2].ratio >= 1.01 * ladder[1].ratio;
    report(12, "strain-mass ratio growth", ok,
           "ratios " + fmt(ladder[0].ratio) + " -> " + fmt(ladder[1].ratio) + " -> " +
               fmt(ladder[2].ratio));
}

// 13: Fourier reconstruction accuracy
void criterion_smith() {
    const int n = 32;
    const double L = 1.0;
    std::vector<Vec2> u(size_t(n) * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double x = L * i / n, y = L * j / n;
            u[size_t(j) * n + i] = {
                std::sin(2 * M_PI * 5 * x / L) * std::cos(2 * M_PI * 3 * y / L) +
                    0.3 * std::cos(2 * M_PI * 7 * y / L),
                std::cos(2 * M_PI * 2 * x / L) * std::sin(2 * M_PI * 6 * y / L)};
        }
    Vec2 mean;
    for (const auto& v : u) mean += v;
    mean = mean * (1.0 / (double(n) * n));
    for (auto& v : u) v = v - mean;

    const auto eps = periodic_sym_gradient_spectral(u, n, L);
    const SmithResult rec = smith_reconstruct(eps, n, L);
    double num = 0.0, den = 0.0;
    for (size_t k = 0; k < u.size(); ++k) {
        num += (rec.u[k] - u[k]).dot(rec.u[k] - u[k]);
        den += u[k].dot(u[k]);
    }
    const double rel = std::sqrt(num / den);
    report(13, "strain-field reconstruction", rel <= 1e-8,
           "relative L2 error=" + fmt(rel) + " residual=" + fmt(rec.residual_rel));
}

// 14: exponent reports
void criterion_exponents() {
    bool ok = true;
    const ExponentReport r2 = exponent_report(2, 1.2);
    ok = ok && std::abs(r2.q_max - 16.0 / 15.0) < 1e-14;
    ok = ok && std::abs(r2.thr_all_minimizers - 1.5) < 1e-14;
    ok = ok && std::abs(r2.thr_bmo_hypothesis - 1.75) < 1e-14;
    ok = ok && std::abs(r2.thr_second_order - 8.0 / 7.0) < 1e-14;
    ok = ok && std::abs(r2.thr_second_order_bmo - 4.0 / 3.0) < 1e-14;
    const ExponentReport r3 = exponent_report(3, 1.4);
    ok = ok && std::abs(r3.q_max - 0.6 * 1.2) < 1e-14;
    ok = ok && std::abs(r3.thr_all_minimizers - 4.0 / 3.0) < 1e-14;
    ok = ok && std::abs(r3.thr_bmo_hypothesis - 1.5) < 1e-14;
    ok = ok && std::abs(r3.thr_second_order - 12.0 / 11.0) < 1e-14;
    ok = ok && std::abs(r3.thr_second_order_bmo - 6.0 / 5.0) < 1e-14;
    std::printf("    n=2: q_max(1.2)=%.17g thresholds %.17g %.17g %.17g %.17g\n", r2.q_max,
                r2.thr_all_minimizers, r2.thr_bmo_hypothesis, r2.thr_second_order,
                r2.thr_second_order_bmo);
    std::printf("    n=3: q_max(1.4)=%.17g thresholds %.17g %.17g %.17g %.17g\n", r3.q_max,
                r3.thr_all_minimizers, r3.thr_bmo_hypothesis, r3.thr_second_order,
                r3.thr_second_order_bmo);
    report(14, "exponent reports", ok);
}

// 15: relaxed-functional boundary examples
void criterion_relaxed_examples() {
    const Integrand area = make_integrand("area");
    bool ok = true;
    std::string detail;
    {
        // unit translation on the unit square: c_inf (2 + sqrt(2))
        const GridDomain g(11, 11, 0.1);
        VectorField t(g);
        for (auto& v : t.data()) v = {1.0, 0.0};
        const double got = rigid_boundary_penalty(t, area);
        const double expect = area.recession() * (2.0 + M_SQRT2);
        ok = ok && std::abs(got - expect) <= 1e-10;
        detail += "translation err=" + fmt(std::abs(got - expect));
    }
    {
        // left-edge datum: c_inf (L + h/sqrt(2)) over the zero field
        const GridDomain g(9, 9, 0.125);
        DiscreteBDField u(g);
        u.cell_values.assign(g.num_cells(), {});
        VectorField u0(g);
        for (int j = 0; j < g.ny(); ++j) u0.at(0, j) = {1.0, 0.0};
        const double L = (g.ny() - 1) * g.h();
        const double expect = L + g.h() * M_SQRT1_2;
        const double floor = g.cell_area_total();
        const double got = relaxed_functional(u, u0, area) - floor;
        ok = ok && std::abs(got - expect) <= 1e-10;
        detail += " left-edge err=" + fmt(std::abs(got - expect));
    }
    {
        // rotation margin strictly positive
        const GridDomain g(11, 11, 0.1);
        VectorField rot(g);
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                const Vec2 p = g.node_pos(i, j);
                rot.at(i, j) = {-p.y, p.x};
            }
        const double got = rigid_boundary_penalty(rot, area);
        ok = ok && got > 1e-10;
        detail += " rotation margin=" + fmt(got);
    }
    report(15, "relaxed boundary examples", ok, detail);
}

} // namespace

int main() {
    std::printf("acceptance battery\n");
    criterion_integrand_exactness();
    criterion_fenchel_young();
    criterion_mu_ellipticity();
    criterion_valpha();
    criterion_duality_gaps();
    criterion_viscosity_monitors();
    criterion_uniqueness();
    criterion_negsob();
    criterion_logconvexity();
    criterion_doro_band();
    criterion_bbm();
    criterion_ornstein();
    criterion_smith();
    criterion_exponents();
    criterion_relaxed_examples();
    std::printf("%d of 15 criteria passed\n", 15 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
