#ifndef BDVARMIN_EXPERIMENT_HPP
#define BDVARMIN_EXPERIMENT_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "bdvarmin/grid.hpp"
#include "bdvarmin/integrand.hpp"
#include "bdvarmin/solver.hpp"

namespace bdvarmin {

/// Named boundary-datum generators: zero, stretch:a, shear:a, rotation:a,
/// affine:axx,axy,ayx,ayy,bx,by, bump:a.
VectorField make_u0(const std::string& spec, const GridDomain& g);

struct ExperimentConfig {
    std::string name = "experiment";
    std::string integrand = "area";
    int nx = 16, ny = 16;
    double h = 1.0 / 15.0;
    std::string u0 = "stretch:0.1";
    std::string u0_file; // overrides the generator when set
    std::vector<double> j_values = {1, 4, 16, 64};
    double tol = 1e-10;
    int max_iters = 200;
    std::vector<std::string> diagnostics = {"monitors", "duality_gap"};
    std::string out_dir = ".";
    unsigned seed = 1;

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct Metric {
    std::string name;
    nlohmann::json params;
    double value = 0.0;
};

struct DiagnosticsReport {
    std::vector<Metric> metrics;
    std::string provenance; // config hash
    nlohmann::json to_json() const;
};

/// FNV-1a over the canonical config dump.
std::string config_hash(const ExperimentConfig& cfg);

/// solve -> dual -> relax -> spaces pipeline as configured; writes
/// report.json and the solution/gap CSV tables under cfg.out_dir.
DiagnosticsReport run_experiment(const ExperimentConfig& cfg);

} // namespace bdvarmin

#endif
