#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "symosc/experiments.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out;
    std::string eps;
    std::uint64_t seed = 0;
    bool seed_set = false;
    double horizon = 0.0;
    bool horizon_set = false;
    bool paper_scale = false;
    int workers = -1;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "configuration file (key = value with [sections])");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--eps", f.eps, "comma-separated epsilon grid");
    cmd->add_option("--seed", f.seed, "RNG seed for initial conditions")
        ->each([&](const std::string&) { f.seed_set = true; });
    cmd->add_option("--horizon", f.horizon, "integration horizon T")
        ->each([&](const std::string&) { f.horizon_set = true; });
    cmd->add_flag("--paper-scale", f.paper_scale, "use the full T = 2e5 horizon");
    cmd->add_option("--workers", f.workers, "worker pool size for scans (0 = auto)");
}

int apply_and_dispatch(const CommonFlags& f,
                       const std::function<int(const symosc::ExperimentConfig&)>& run) {
    try {
        symosc::ExperimentConfig cfg = f.config_path.empty()
                                           ? symosc::ExperimentConfig{}
                                           : symosc::load_config(f.config_path);
        if (!f.out.empty()) cfg.out_dir = f.out;
        if (f.seed_set) cfg.seed = f.seed;
        if (f.horizon_set) cfg.horizon = f.horizon;
        if (f.paper_scale) cfg.paper_scale = true;
        if (f.workers >= 0) cfg.workers = f.workers;
        if (!f.eps.empty()) {
            symosc::ExperimentConfig tmp = symosc::parse_config_text("[run]\neps = " + f.eps);
            cfg.eps_grid = tmp.eps_grid;
        }
        return run(cfg);
    } catch (const symosc::ConfigError& ex) {
        std::fprintf(stderr, "%s\n", ex.what());
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"symosc: simulation and symmetry analysis of coupled phase-oscillator networks"};
    app.require_subcommand(1);

    CommonFlags sim_f, eq_f, fig_f, scan_f;
    std::string figure_name;

    auto* sim = app.add_subcommand("simulate", "integrate one run and write trajectory/verdict");
    add_common(sim, sim_f);

    auto* eq = app.add_subcommand("equilibrium", "refine the coherent relative equilibrium");
    add_common(eq, eq_f);

    auto* fig = app.add_subcommand("figure", "reproduce one of the reference figures");
    fig->add_option("which", figure_name, "fig1 | fig2 | fig3")->required();
    add_common(fig, fig_f);

    auto* scan = app.add_subcommand("scan", "epsilon scan on a worker pool");
    add_common(scan, scan_f);

    CLI11_PARSE(app, argc, argv);

    if (sim->parsed()) return apply_and_dispatch(sim_f, symosc::cmd_simulate);
    if (eq->parsed()) return apply_and_dispatch(eq_f, symosc::cmd_equilibrium);
    if (fig->parsed())
        return apply_and_dispatch(
            fig_f, [&](const symosc::ExperimentConfig& c) { return symosc::cmd_figure(figure_name, c); });
    if (scan->parsed()) return apply_and_dispatch(scan_f, symosc::cmd_scan);
    return 1;
}
