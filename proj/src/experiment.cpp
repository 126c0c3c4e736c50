#include "bdvarmin/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bdvarmin/duality.hpp"
#include "bdvarmin/field_io.hpp"
#include "bdvarmin/relaxation.hpp"
#include "bdvarmin/spaces.hpp"

namespace bdvarmin {

using nlohmann::json;

namespace {
std::vector<double> split_args(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}
} // namespace

VectorField make_u0(const std::string& spec, const GridDomain& g) {
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
    VectorField u(g);
    const double L = (g.nx() - 1) * g.h();
    if (head == "zero") return u;
    if (head == "stretch") {
        const double a = args.empty() ? 0.1 : std::stod(args);
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) u.at(i, j) = {a * g.node_pos(i, j).x, 0.0};
        return u;
    }
    if (head == "shear") {
        const double a = args.empty() ? 0.1 : std::stod(args);
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) u.at(i, j) = {a * g.node_pos(i, j).y, 0.0};
        return u;
    }
    if (head == "rotation") {
        const double a = args.empty() ? 0.1 : std::stod(args);
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                const Vec2 p = g.node_pos(i, j);
                u.at(i, j) = {-a * p.y, a * p.x};
            }
        return u;
    }
    if (head == "affine") {
        const auto a = split_args(args);
        if (a.size() != 6) throw std::invalid_argument("affine generator needs 6 numbers");
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                const Vec2 p = g.node_pos(i, j);
                u.at(i, j) = {a[0] * p.x + a[1] * p.y + a[4], a[2] * p.x + a[3] * p.y + a[5]};
            }
        return u;
    }
    if (head == "bump") {
        const double a = args.empty() ? 1.0 : std::stod(args);
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                const Vec2 p = g.node_pos(i, j);
                const double b = std::sin(M_PI * p.x / L) * std::sin(M_PI * p.y / L);
                u.at(i, j) = {a * b, -a * b};
            }
        return u;
    }
    if (head == "bend") { // non-affine boundary values
        const double a = args.empty() ? 0.5 : std::stod(args);
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                const Vec2 p = g.node_pos(i, j);
                u.at(i, j) = {a * p.y * p.y, 0.0};
            }
        return u;
    }
    throw std::invalid_argument("unknown u0 generator: " + spec);
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
    ExperimentConfig c;
    auto require = [&](const char* key) {
        if (!j.contains(key))
            throw std::invalid_argument(std::string("config: missing field '") + key + "'");
    };
    c.name = j.value("name", c.name);
    require("integrand");
    c.integrand = j.at("integrand").get<std::string>();
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        c.nx = g.value("nx", c.nx);
        c.ny = g.value("ny", c.ny);
        c.h = g.value("h", 1.0 / std::max(1, c.nx - 1));
    }
    if (j.contains("u0")) {
        if (j.at("u0").is_object()) {
            c.u0_file = j.at("u0").value("file", "");
            c.u0 = j.at("u0").value("generator", c.u0);
        } else {
            c.u0 = j.at("u0").get<std::string>();
        }
    }
    if (j.contains("schedule")) {
        const auto& s = j.at("schedule");
        if (s.contains("j_values")) c.j_values = s.at("j_values").get<std::vector<double>>();
        c.tol = s.value("tol", c.tol);
        c.max_iters = s.value("max_iters", c.max_iters);
    }
    if (j.contains("diagnostics"))
        c.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
    c.out_dir = j.value("out_dir", c.out_dir);
    c.seed = j.value("seed", c.seed);
    // validation with field paths
    if (c.nx < 2 || c.ny < 2) throw std::invalid_argument("config: grid.nx/ny must be >= 2");
    if (!(c.h > 0.0)) throw std::invalid_argument("config: grid.h must be positive");
    for (size_t k = 1; k < c.j_values.size(); ++k)
        if (!(c.j_values[k] > c.j_values[k - 1]))
            throw std::invalid_argument("config: schedule.j_values must increase");
    make_integrand(c.integrand); // throws on unknown names
    if (c.u0_file.empty()) make_u0(c.u0, GridDomain(c.nx, c.ny, c.h));
    return c;
}

json ExperimentConfig::to_json() const {
    json j;
    j["name"] = name;
    j["integrand"] = integrand;
    j["grid"] = {{"nx", nx}, {"ny", ny}, {"h", h}};
    if (!u0_file.empty())
        j["u0"] = {{"file", u0_file}};
    else
        j["u0"] = u0;
    j["schedule"] = {{"j_values", j_values}, {"tol", tol}, {"max_iters", max_iters}};
    j["diagnostics"] = diagnostics;
    j["out_dir"] = out_dir;
    j["seed"] = seed;
    return j;
}

std::string config_hash(const ExperimentConfig& cfg) {
    const std::string s = cfg.to_json().dump();
    unsigned long long h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", h);
    return buf;
}

json DiagnosticsReport::to_json() const {
    json j;
    j["provenance"] = provenance;
    j["metrics"] = json::array();
    for (const Metric& m : metrics) {
        json e;
        e["name"] = m.name;
        e["params"] = m.params;
        // 17 significant digits, serialized as a string to keep bytes stable
        e["value"] = format_g17(m.value);
        j["metrics"].push_back(e);
    }
    return j;
}

DiagnosticsReport run_experiment(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);

    const GridDomain g(cfg.nx, cfg.ny, cfg.h);
    const Integrand f = make_integrand(cfg.integrand);
    const VectorField u0 =
        cfg.u0_file.empty() ? make_u0(cfg.u0, g) : read_vector_field(cfg.u0_file);

    DiagnosticsReport rep;
    rep.provenance = config_hash(cfg);

    auto add = [&](const std::string& name, json params, double value) {
        rep.metrics.push_back({name, std::move(params), value});
    };

    if (!cfg.diagnostics.empty()) {
        Schedule sched{cfg.j_values, cfg.tol, cfg.max_iters};
        const SequenceResult seq = run_viscosity_sequence(f, sched, u0);
        const ViscositySolution& last = seq.solutions.back();
        write_vector_field(fs::path(cfg.out_dir) / "solution", last.v);

        for (const std::string& d : cfg.diagnostics) {
            if (d == "monitors") {
                add("energy_Fj_last", {{"j", last.j}}, last.energy_Fj);
                add("energy_F_last", {{"j", last.j}}, last.energy_F);
                add("el_residual", {{"j", last.j}}, last.el_residual);
                add("monotone_slack", {}, seq.monitors.monotone_slack);
                add("coercivity_bound", {}, seq.monitors.coercivity_bound);
                add("worst_eps_l1", {}, seq.monitors.worst_eps_l1);
                add("sup_tau_inf", {}, seq.monitors.sup_tau_inf);
                add("lip_f", {}, seq.monitors.lip_f);
            } else if (d == "duality_gap") {
                // Two candidates per solution: the plain stress f'(eps) and
                // the stabilized stress f'_j(eps); each feasible candidate is
                // a lower bound, keep the better one.
                auto best_dual = [&](const ViscositySolution& sol) {
                    double best = -kInf;
                    for (const SymTensorField& raw :
                         {stress_tau(sol.v, f), stress_sigma(sol.v, f, sol.j)}) {
                        SymTensorField chi = project_div_free(raw);
                        if (std::isfinite(f.recession()))
                            chi = scale_into_ball(chi, f.recession());
                        const DualCandidate cand = make_dual_candidate(chi, f);
                        best = std::max(best, dual_value(cand, u0, f));
                    }
                    return best;
                };
                std::ofstream gap_csv(fs::path(cfg.out_dir) / "gap_table.csv");
                gap_csv << "j,primal,dual,gap\n";
                for (const auto& sol : seq.solutions) {
                    const double dv = best_dual(sol);
                    gap_csv << format_g17(sol.j) << ',' << format_g17(sol.energy_F) << ','
                            << format_g17(dv) << ',' << format_g17(sol.energy_F - dv)
                            << '\n';
                    if (&sol == &seq.solutions.back())
                        add("duality_gap", {{"j", sol.j}}, sol.energy_F - dv);
                }
            } else if (d == "nogap") {
                const NogapReport ng = nogap_check(f, u0, sched);
                add("relaxed_of_limit", {}, ng.relaxed_of_limit);
                add("min_Fj", {}, ng.min_Fj);
                add("min_F", {}, ng.min_F);
                add("nogap_one_sided_ok", {}, ng.one_sided_ok ? 1.0 : 0.0);
            } else if (d == "uniqueness") {
                const UniquenessReport uq =
                    uniqueness_check(f, u0, cfg.j_values.back(), cfg.tol);
                add("uniqueness_eps_l1_rel", {}, uq.eps_l1_relative);
                add("uniqueness_post_rigid_l2", {}, uq.post_rigid_l2);
                add("uniqueness_rigid_norm", {}, uq.rigid_norm);
            } else if (d == "lbmo") {
                std::vector<const VectorField*> fields;
                for (const auto& s : seq.solutions) fields.push_back(&s.v);
                add("lbmo_monitor", {{"margin", 2}}, lbmo_monitor(fields, 2));
            } else if (d == "exponents") {
                const double mu = f.mu_claim > 0 ? f.mu_claim : 3.0;
                const ExponentReport er = exponent_report(2, mu);
                add("q_max", {{"n", 2}, {"mu", mu}}, er.q_max);
                add("thr_all_minimizers", {{"n", 2}}, er.thr_all_minimizers);
                add("thr_bmo_hypothesis", {{"n", 2}}, er.thr_bmo_hypothesis);
                add("thr_second_order", {{"n", 2}}, er.thr_second_order);
                add("thr_second_order_bmo", {{"n", 2}}, er.thr_second_order_bmo);
            } else if (d == "seminorms") {
                add("gagliardo", {{"s", 0.5}, {"p", 2.0}}, gagliardo(last.v, 0.5, 2.0));
                add("besov_nikolskii", {{"alpha", 0.5}, {"p", 2.0}, {"q", 0.0}},
                    besov_nikolskii(last.v, 0.5, 2.0, 0.0));
                add("bmo", {}, bmo_norm(last.v));
            } else {
                throw std::invalid_argument("config: unknown diagnostic '" + d + "'");
            }
        }
    }

    std::ofstream out(fs::path(cfg.out_dir) / "report.json");
    out << rep.to_json().dump(2) << "\n";
    return rep;
}

} // namespace bdvarmin
