#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bdvarmin/duality.hpp"
#include "bdvarmin/experiment.hpp"
#include "bdvarmin/field_io.hpp"
#include "bdvarmin/kernels.hpp"
#include "bdvarmin/relaxation.hpp"
#include "bdvarmin/rigid.hpp"
#include "bdvarmin/solver.hpp"
#include "bdvarmin/spaces.hpp"

namespace fs = std::filesystem;
using namespace bdvarmin;

namespace {

GridDomain parse_grid(const std::string& spec, double h) {
    const auto x = spec.find('x');
    if (x == std::string::npos) throw CLI::ValidationError("--grid expects NXxNY, e.g. 32x32");
    const int nx = std::stoi(spec.substr(0, x));
    const int ny = std::stoi(spec.substr(x + 1));
    return GridDomain(nx, ny, h > 0 ? h : 1.0 / std::max(1, nx - 1));
}

void print_kv(const std::string& k, double v) {
    std::printf("%-26s %s\n", k.c_str(), format_g17(v).c_str());
}

int cmd_solve(const std::string& integrand, const std::string& grid, double h, double j,
              const std::string& u0spec, const std::string& u0file, const std::string& out,
              double tol) {
    const GridDomain g = parse_grid(grid, h);
    const Integrand f = make_integrand(integrand);
    const VectorField u0 = u0file.empty() ? make_u0(u0spec, g) : read_vector_field(u0file);
    SolveOptions opts;
    opts.tol = tol;
    const ViscositySolution sol = minimize_Fj(f, j, u0, opts);

    fs::create_directories(out);
    write_vector_field(fs::path(out) / "solution", sol.v);
    write_sym_field(fs::path(out) / "strain", sym_gradient(sol.v));
    nlohmann::json rep;
    rep["j"] = sol.j;
    rep["converged"] = sol.converged;
    rep["newton_iters"] = sol.newton_iters;
    rep["energy_Fj"] = format_g17(sol.energy_Fj);
    rep["energy_F"] = format_g17(sol.energy_F);
    rep["el_residual"] = format_g17(sol.el_residual);
    rep["eps_l1"] = format_g17(sol.eps_l1);
    std::ofstream(fs::path(out) / "solve.json") << rep.dump(2) << "\n";
    print_kv("energy_Fj", sol.energy_Fj);
    print_kv("energy_F", sol.energy_F);
    print_kv("el_residual", sol.el_residual);
    if (!sol.converged) {
        std::fprintf(stderr, "solver did not reach tolerance; last iterate written\n");
        return 2;
    }
    return 0;
}

int cmd_sequence(const std::string& integrand, const std::string& grid, double h,
                 std::vector<double> js, const std::string& u0spec, const std::string& out,
                 double tol) {
    const GridDomain g = parse_grid(grid, h);
    const Integrand f = make_integrand(integrand);
    const VectorField u0 = make_u0(u0spec, g);
    Schedule sched{js, tol, 200};
    const SequenceResult seq = run_viscosity_sequence(f, sched, u0);

    fs::create_directories(out);
    std::ofstream csv(fs::path(out) / "sequence.csv");
    csv << "j,energy_Fj,energy_F,el_residual,eps_l1,sigma_h1\n";
    for (size_t k = 0; k < seq.solutions.size(); ++k) {
        const auto& s = seq.solutions[k];
        csv << format_g17(s.j) << ',' << format_g17(s.energy_Fj) << ','
            << format_g17(s.energy_F) << ',' << format_g17(s.el_residual) << ','
            << format_g17(s.eps_l1) << ','
            << format_g17(seq.monitors.sigma_h1_seminorm[k]) << '\n';
    }
    write_vector_field(fs::path(out) / "solution", seq.solutions.back().v);
    nlohmann::json rep;
    rep["monotone_ok"] = seq.monitors.monotone_ok;
    rep["monotone_slack"] = format_g17(seq.monitors.monotone_slack);
    rep["coercivity_ok"] = seq.monitors.coercivity_ok;
    rep["coercivity_bound"] = format_g17(seq.monitors.coercivity_bound);
    rep["worst_eps_l1"] = format_g17(seq.monitors.worst_eps_l1);
    rep["stress_ok"] = seq.monitors.stress_ok;
    rep["sup_tau_inf"] = format_g17(seq.monitors.sup_tau_inf);
    rep["lip_f"] = format_g17(seq.monitors.lip_f);
    std::ofstream(fs::path(out) / "monitors.json") << rep.dump(2) << "\n";
    std::printf("monotone_ok=%d coercivity_ok=%d stress_ok=%d\n", seq.monitors.monotone_ok,
                seq.monitors.coercivity_ok, seq.monitors.stress_ok);
    return seq.ok ? 0 : 2;
}

int cmd_dual(const std::string& from, const std::string& integrand, const std::string& u0spec,
             double j, const std::string& out) {
    const VectorField v = read_vector_field(from);
    const Integrand f = make_integrand(integrand);
    const VectorField u0 = make_u0(u0spec, v.grid());
    const double primal = energy(f, v);

    SymTensorField sigma = stress_sigma(v, f, j);
    SymTensorField chi = project_div_free(sigma);
    if (std::isfinite(f.recession())) chi = scale_into_ball(chi, f.recession());
    const DualCandidate cand = make_dual_candidate(chi, f);
    const double dv = dual_value(cand, u0, f);

    fs::create_directories(out);
    std::ofstream csv(fs::path(out) / "gap_table.csv");
    csv << "j,primal,dual,gap,div_residual\n";
    csv << format_g17(j) << ',' << format_g17(primal) << ',' << format_g17(dv) << ','
        << format_g17(primal - dv) << ',' << format_g17(cand.div_residual) << '\n';
    print_kv("primal", primal);
    print_kv("dual", dv);
    print_kv("gap", primal - dv);
    return 0;
}

int cmd_relax(const std::string& from_bd, const std::string& from_solution,
              const std::string& integrand, const std::string& u0spec,
              const std::string& out) {
    const Integrand f = make_integrand(integrand);
    DiscreteBDField u = [&]() {
        if (!from_bd.empty()) return read_bd_field(from_bd);
        return DiscreteBDField::from_smooth(read_vector_field(from_solution));
    }();
    const VectorField u0 = make_u0(u0spec, u.grid);
    const double relaxed = relaxed_functional(u, u0, f);
    const SymMeasure m = bd_measure(u);
    const BoundaryAttainment ba = boundary_attainment_check(u, u0, f);

    fs::create_directories(out);
    nlohmann::json rep;
    rep["relaxed"] = format_g17(relaxed);
    rep["total_variation"] = format_g17(m.total_variation());
    rep["singular_mass"] = format_g17(m.singular_mass());
    rep["boundary_mismatch"] = format_g17(ba.mismatch);
    rep["attains_boundary"] = ba.attains;
    rep["rigid_penalty_margin"] = format_g17(ba.margin);
    std::ofstream(fs::path(out) / "relax.json") << rep.dump(2) << "\n";
    print_kv("relaxed", relaxed);
    print_kv("total_variation", m.total_variation());
    print_kv("rigid_penalty_margin", ba.margin);
    return 0;
}

ScalarSamples scalar_from_field(const VectorField& u, int comp) {
    const GridDomain& g = u.grid();
    ScalarSamples s(g.nx(), g.ny(), g.h());
    for (int k = 0; k < g.num_nodes(); ++k) s.values[k] = comp == 0 ? u[k].x : u[k].y;
    return s;
}

int cmd_spaces(const std::string& op, double s, double p, double q, double alpha,
               const std::string& in, int comp) {
    const VectorField u = read_vector_field(in);
    double value = 0.0;
    if (op == "gagliardo") value = gagliardo(u, s, p);
    else if (op == "besov") value = besov_nikolskii(u, alpha > 0 ? alpha : s, p, q);
    else if (op == "bmo") value = bmo_norm(u);
    else if (op == "calderon") value = calderon_seminorm(scalar_from_field(u, comp), alpha, p);
    else if (op == "doro") value = doro_seminorm(scalar_from_field(u, comp), s, p);
    else if (op == "doro_ratio") value = doro_ratio(scalar_from_field(u, comp), s, p);
    else throw CLI::ValidationError("unknown --op " + op);
    std::printf("%s,%s\n", op.c_str(), format_g17(value).c_str());
    return 0;
}

int cmd_experiment(const std::string& config_path, bool parallel) {
    std::ifstream in(config_path);
    if (!in) throw CLI::ValidationError("cannot read config " + config_path);
    nlohmann::json j;
    in >> j;
    std::vector<ExperimentConfig> cfgs;
    if (j.is_array())
        for (const auto& e : j) cfgs.push_back(ExperimentConfig::from_json(e));
    else
        cfgs.push_back(ExperimentConfig::from_json(j));

    int rc = 0;
    if (parallel && cfgs.size() > 1) {
        std::vector<std::thread> pool;
        for (const auto& c : cfgs)
            pool.emplace_back([c]() { run_experiment(c); });
        for (auto& t : pool) t.join();
    } else {
        for (const auto& c : cfgs) {
            const DiagnosticsReport rep = run_experiment(c);
            std::printf("%s: %zu metrics, provenance %s\n", c.name.c_str(),
                        rep.metrics.size(), rep.provenance.c_str());
        }
    }
    return rc;
}

int cmd_selftest() {
    int failures = 0;
    auto check = [&](const char* name, bool ok) {
        std::printf("%-32s %s\n", name, ok ? "PASS" : "FAIL");
        if (!ok) ++failures;
    };

    check("phi_mu(3,1) closed form",
          std::abs(phi_mu(3.0, 1.0) - (std::sqrt(2.0) - 1.0)) < 1e-12);
    check("phi_mu recession mu=2",
          std::abs(phi_mu_recession(2.0) - M_PI / 2.0) < 1e-12);

    const GridDomain g(12, 12, 1.0 / 11.0);
    const Integrand quad = make_integrand("quadratic");
    const VectorField u0 = make_u0("stretch:0.1", g);
    const ViscositySolution sol = minimize_Fj(quad, 4.0, u0);
    check("quadratic solve converges", sol.converged);

    const SymTensorField tau = stress_tau(sol.v, quad);
    const SymTensorField chi = project_div_free(tau);
    const DualCandidate cand = make_dual_candidate(chi, quad);
    const double gap = energy(quad, sol.v) - dual_value(cand, u0, quad);
    check("quadratic duality gap small", std::abs(gap) < 1e-8);

    const RigidBasis basis(g);
    check("rigid basis kernel",
          l1_norm_cells(sym_gradient(basis.field(2))) < 1e-12);

    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bdvarmin: numerical laboratory for linear-growth symmetric-gradient "
                 "variational problems"};
    app.require_subcommand(1);

    // solve
    auto* solve = app.add_subcommand("solve", "minimize one stabilized functional");
    std::string integrand = "area", grid = "16x16", u0spec = "stretch:0.1", u0file, out = "out";
    double h = 0.0, jval = 64.0, tol = 1e-10;
    solve->add_option("--integrand", integrand);
    solve->add_option("--grid", grid);
    solve->add_option("--spacing", h, "grid spacing (default 1/(nx-1))");
    solve->add_option("--j", jval);
    solve->add_option("--u0", u0spec, "generator spec (zero|stretch:a|shear:a|rotation:a|affine:...|bump:a)");
    solve->add_option("--u0-file", u0file, "field basename written by this tool");
    solve->add_option("--out", out);
    solve->add_option("--tol", tol);

    // sequence
    auto* sequence = app.add_subcommand("sequence", "run a viscosity schedule with monitors");
    std::vector<double> js = {1, 4, 16, 64, 256};
    sequence->add_option("--integrand", integrand);
    sequence->add_option("--grid", grid);
    sequence->add_option("--spacing", h, "grid spacing (default 1/(nx-1))");
    sequence->add_option("--j", js, "increasing j values");
    sequence->add_option("--u0", u0spec);
    sequence->add_option("--out", out);
    sequence->add_option("--tol", tol);

    // dual
    auto* dual = app.add_subcommand("dual", "evaluate the dual candidate of a solution");
    std::string from;
    dual->add_option("--from-solution", from)->required();
    dual->add_option("--integrand", integrand);
    dual->add_option("--u0", u0spec);
    dual->add_option("--j", jval);
    dual->add_option("--out", out);

    // relax
    auto* relax = app.add_subcommand("relax", "relaxed functional and boundary penalty");
    std::string from_bd;
    relax->add_option("--from-bd", from_bd, "bd field basename");
    relax->add_option("--from-solution", from, "vector field basename");
    relax->add_option("--integrand", integrand);
    relax->add_option("--u0", u0spec);
    relax->add_option("--out", out);

    // spaces
    auto* spaces = app.add_subcommand("spaces", "seminorm / maximal operator evaluation");
    std::string op = "gagliardo", infile;
    double s = 0.5, p = 2.0, q = 0.0, alpha = 0.0;
    int comp = 0;
    spaces->add_option("--op", op);
    spaces->add_option("--s", s);
    spaces->add_option("--p", p);
    spaces->add_option("--q", q, "0 encodes q = infinity");
    spaces->add_option("--alpha", alpha);
    spaces->add_option("--component", comp);
    spaces->add_option("--in", infile)->required();

    // experiment
    auto* experiment = app.add_subcommand("experiment", "run configured pipelines");
    std::string config_path;
    bool parallel = false;
    experiment->add_option("--config", config_path)->required();
    experiment->add_flag("--parallel", parallel);

    // selftest
    app.add_subcommand("selftest", "quick smoke battery");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed())
            return cmd_solve(integrand, grid, h, jval, u0spec, u0file, out, tol);
        if (sequence->parsed())
            return cmd_sequence(integrand, grid, h, js, u0spec, out, tol);
        if (dual->parsed()) return cmd_dual(from, integrand, u0spec, jval, out);
        if (relax->parsed()) return cmd_relax(from_bd, from, integrand, u0spec, out);
        if (spaces->parsed()) return cmd_spaces(op, s, p, q, alpha, infile, comp);
        if (experiment->parsed()) return cmd_experiment(config_path, parallel);
        return cmd_selftest();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
