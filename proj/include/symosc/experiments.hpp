#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "symosc/analysis.hpp"
#include "symosc/coupling.hpp"
#include "symosc/dynamics.hpp"
#include "symosc/equilibria.hpp"
#include "symosc/integrate.hpp"
#include "symosc/permgroup.hpp"

namespace symosc {

/// Configuration problem; `field` names the offending key (section.key).
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field_name, const std::string& msg)
        : std::runtime_error("config error in '" + field_name + "': " + msg),
          field(std::move(field_name)) {}
    std::string field;
};

/// Flat key-value configuration with section headers; every key has a
/// default, so commands run without a config file.
struct ExperimentConfig {
    // [network]
    std::string mode = "product";
    int n = 4;
    std::string coupling = "g_hat";
    double epsilon = 0.01;
    double omega = 0.0;
    std::string adjacency;  // CSV path of n*n weights, general mode

    // [integrator]
    IntegratorConfig integ;

    // [analysis]
    double freq_tol = 0.0;  // 0 = auto: max(1e-3, 10/T_avg)
    double setwise_tol = 0.05;

    // [run]
    double horizon = 1e4;
    bool paper_scale = false;  // restores the full 2e5 horizon
    std::uint64_t seed = 12345;
    std::string out_dir = "out";
    std::vector<double> eps_grid;
    int workers = 0;  // 0 = hardware concurrency
    std::string init = "auto";

    double effective_horizon() const { return paper_scale ? 2e5 : horizon; }
    void validate() const;  // throws ConfigError
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Preset name, `file:PATH` (plain-text coupling spec) or `const:VALUE`.
CouplingPtr resolve_coupling(const std::string& name);

NetworkSpec make_spec(const ExperimentConfig& cfg);

/// Symmetry group of the spec: S_n (population), S_n wr S_2 (product) or the
/// adjacency-preserving subgroup of S_n (general mode, n <= 8).
PermGroup ambient_group(const NetworkSpec& spec);

/// The documented initial-condition bootstrap for the incoherent attractor:
/// a seeded random point of the canonical region 0 = phi_1 < ... < phi_n,
/// integrated for `settle` time units; accepted when the post-transient
/// pairwise differences stay within [0.4, 2*pi - 0.4] (tolerance 0.05). On
/// rejection the seed advances deterministically.
struct BootstrapResult {
    std::vector<double> state;
    std::uint64_t seed_used = 0;
    int attempts = 0;
};

BootstrapResult bootstrap_incoherent(const CouplingPtr& g_hat, int n, std::uint64_t seed,
                                     const IntegratorConfig& integ, double settle = 1000.0,
                                     int max_attempts = 32);

/// The reference offsets of the coherent relative equilibrium (the refinement
/// seed) and its refinement under the given coupling.
std::vector<double> coherent_seed_offsets();
RelativeEquilibrium coherent_equilibrium(const CouplingPtr& g_hat);

/// Resolves cfg.init into a state vector for the spec. "auto" means the
/// coherent-times-incoherent product state in product mode and a seeded
/// random state otherwise.
std::vector<double> initial_condition(const ExperimentConfig& cfg, const NetworkSpec& spec);

/// Deterministic unit tangent vector for Lyapunov runs.
std::vector<double> seeded_tangent(int dim, std::uint64_t seed);

/// Classification rule of the epsilon scan:
///   "trivial"    iff |S_2| > 1e-1 and Q_2 == 1
///   "uncertain"  iff |S_2| > 1e-1 and Q_2 > 1
///   "nontrivial" otherwise.
std::string scan_class(double S2, int Q2);

struct ScanRow {
    double eps = 0.0;
    double lambda_max = 0.0;
    double S1 = 0.0, S2 = 0.0;
    int Q1 = 0, Q2 = 0;
    PopulationBand band1, band2;
    bool bands_overlap = true;
    bool is_weak_chimera = false;
    std::string cls;
    bool ok = false;
    std::string error;
};

/// Independent epsilon jobs on a worker pool; the initial condition is fixed
/// across epsilon. Throws ConfigError for an empty grid.
std::vector<ScanRow> run_scan(const ExperimentConfig& cfg);

void write_trajectory_csv(const std::string& path, const Trajectory& traj);
void write_scan_csv(const std::string& path, const std::vector<ScanRow>& rows);

/// Command entry points; return process exit codes (0 ok, 2 config error,
/// 3 integration failure).
int cmd_simulate(const ExperimentConfig& cfg);
int cmd_equilibrium(const ExperimentConfig& cfg);
int cmd_figure(const std::string& which, const ExperimentConfig& cfg);
int cmd_scan(const ExperimentConfig& cfg);

}  // namespace symosc
