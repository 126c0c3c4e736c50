#ifndef BDVARMIN_SOLVER_HPP
#define BDVARMIN_SOLVER_HPP

#include <vector>

#include "bdvarmin/grid.hpp"
#include "bdvarmin/integrand.hpp"

namespace bdvarmin {

struct SolveOptions {
    double tol = 1e-10;       // L^2 residual of div f'_j(eps(v)) on interior nodes
    int max_iters = 200;
    double hess_floor = 1e-12;
    bool random_init = false; // start from u0 plus seeded interior noise
    unsigned init_seed = 0;
    double init_noise = 0.1;
};

struct ViscositySolution {
    double j = 0.0;
    VectorField v;
    double energy_Fj = 0.0;
    double energy_F = 0.0;
    double el_residual = 0.0; // for the stabilized integrand
    double eps_l1 = 0.0;
    bool converged = false;
    int newton_iters = 0;
    std::vector<double> energy_history;

    explicit ViscositySolution(const GridDomain& g) : v(g) {}
};

/// Total energy sum_cells p(eps(u)) h^2.
double energy(const PerturbedIntegrand& p, const VectorField& u);
double energy(const Integrand& f, const VectorField& u);

/// Damped Newton on the strictly convex stabilized energy over the Dirichlet
/// class pinned at the boundary nodes of u0. Non-convergence is reported in
/// the result, with the last iterate attached.
ViscositySolution minimize_Fj(const Integrand& f, double j, const VectorField& u0,
                              const SolveOptions& opts = {});

/// L^2 norm over interior nodes of div f'(eps(v)).
double el_residual(const VectorField& v, const Integrand& f);
double el_residual(const VectorField& v, const PerturbedIntegrand& fj);
/// Same residual functional measured in the dual Lipschitz norm
/// (linear-programming dual norm; see duality.hpp).
double el_residual_lip_dual(const VectorField& v, const Integrand& f, int margin = 1);

struct Schedule {
    std::vector<double> j_values;
    double tol = 1e-10;
    int max_iters = 200;
};

struct SequenceMonitors {
    // (a) energy chain F_{j+1}[v_{j+1}] <= F_{j+1}[v_j] <= F_j[v_j]
    double monotone_slack = 0.0; // most positive violation observed
    bool monotone_ok = false;
    // (b) coercivity: |eps(v_j)|_1 <= (F_1[v_1] + c2 |Omega|) / c0
    double coercivity_bound = 0.0;
    double worst_eps_l1 = 0.0;
    bool coercivity_ok = false;
    // (c) stress bound sup |tau_j| <= Lip(f)
    double sup_tau_inf = 0.0;
    double lip_f = 0.0;
    bool stress_ok = false;
    std::vector<double> sigma_h1_seminorm; // reported only
};

struct SequenceResult {
    std::vector<ViscositySolution> solutions;
    SequenceMonitors monitors;
    bool ok = false;
};

SequenceResult run_viscosity_sequence(const Integrand& f, const Schedule& schedule,
                                      const VectorField& u0);

/// tau_j = f'(eps(v)) and sigma_j = f'_j(eps(v)) stress fields.
SymTensorField stress_tau(const VectorField& v, const Integrand& f);
SymTensorField stress_sigma(const VectorField& v, const Integrand& f, double j);

/// Restricted sharp maximal monitor: max over the fields and over nodes in
/// the interior margin of the mean oscillation over centered lattice cubes
/// contained in the domain.
double lbmo_monitor(const std::vector<const VectorField*>& fields, int margin);

} // namespace bdvarmin

#endif
