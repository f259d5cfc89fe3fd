#include "symosc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

#include "symosc/svg.hpp"

namespace symosc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kPi = 3.14159265358979323846;

double mod_2pi(double x) {
    double m = std::fmod(x, kTwoPi);
    return m < 0 ? m + kTwoPi : m;
}

double parse_double(const std::string& field, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw ConfigError(field, "expected a number, got '" + v + "'");
    }
}

long parse_long(const std::string& field, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw ConfigError(field, "expected an integer, got '" + v + "'");
    }
}

bool parse_bool(const std::string& field, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(field, "expected true/false, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& field, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto a = item.find_first_not_of(" \t");
        const auto b = item.find_last_not_of(" \t");
        if (a == std::string::npos) continue;
        out.push_back(parse_double(field, item.substr(a, b - a + 1)));
    }
    return out;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
}

void csv_row(std::ofstream& out, const std::vector<double>& vals) {
    out.precision(15);
    for (std::size_t i = 0; i < vals.size(); ++i) out << (i ? "," : "") << vals[i];
    out << "\n";
}

}  // namespace

void ExperimentConfig::validate() const {
    if (mode != "population" && mode != "product" && mode != "general")
        throw ConfigError("network.mode", "must be population, product or general; got '" + mode + "'");
    if (n < 1) throw ConfigError("network.n", "must be >= 1");
    if (epsilon < 0) throw ConfigError("network.epsilon", "must be >= 0");
    if (!(horizon > 0)) throw ConfigError("run.horizon", "must be > 0");
    if (workers < 0) throw ConfigError("run.workers", "must be >= 0");
    for (std::size_t i = 1; i < eps_grid.size(); ++i)
        if (!(eps_grid[i] > eps_grid[i - 1]))
            throw ConfigError("run.eps", "grid must be strictly increasing");
    for (double e : eps_grid)
        if (e < 0) throw ConfigError("run.eps", "grid values must be >= 0");
    try {
        integ.validate();
    } catch (const std::exception& ex) {
        throw ConfigError("integrator", ex.what());
    }
    resolve_coupling(coupling);  // throws ConfigError on unknown preset
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno), "malformed section header");
            section = line.substr(1, line.size() - 2);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno), "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        const std::string field = section.empty() ? key : section + "." + key;

        if (field == "network.mode") cfg.mode = val;
        else if (field == "network.n") cfg.n = static_cast<int>(parse_long(field, val));
        else if (field == "network.coupling") cfg.coupling = val;
        else if (field == "network.epsilon") cfg.epsilon = parse_double(field, val);
        else if (field == "network.omega") cfg.omega = parse_double(field, val);
        else if (field == "network.adjacency") cfg.adjacency = val;
        else if (field == "integrator.rtol") cfg.integ.rtol = parse_double(field, val);
        else if (field == "integrator.atol") cfg.integ.atol = parse_double(field, val);
        else if (field == "integrator.max_step") cfg.integ.max_step = parse_double(field, val);
        else if (field == "integrator.record_dt") cfg.integ.record_dt = parse_double(field, val);
        else if (field == "integrator.renorm_dt") cfg.integ.renorm_dt = parse_double(field, val);
        else if (field == "analysis.freq_tol") cfg.freq_tol = parse_double(field, val);
        else if (field == "analysis.setwise_tol") cfg.setwise_tol = parse_double(field, val);
        else if (field == "run.horizon") cfg.horizon = parse_double(field, val);
        else if (field == "run.paper_scale") cfg.paper_scale = parse_bool(field, val);
        else if (field == "run.seed") cfg.seed = static_cast<std::uint64_t>(parse_long(field, val));
        else if (field == "run.out") cfg.out_dir = val;
        else if (field == "run.eps") cfg.eps_grid = parse_list(field, val);
        else if (field == "run.workers") cfg.workers = static_cast<int>(parse_long(field, val));
        else if (field == "run.init") cfg.init = val;
        else throw ConfigError(field, "unknown key");
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

CouplingPtr resolve_coupling(const std::string& name) {
    if (name.rfind("file:", 0) == 0) {
        std::ifstream in(name.substr(5));
        if (!in) throw ConfigError("network.coupling", "cannot open '" + name.substr(5) + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        try {
            return parse_coupling(ss.str());
        } catch (const std::exception& ex) {
            throw ConfigError("network.coupling", ex.what());
        }
    }
    if (name.rfind("const:", 0) == 0)
        return std::make_shared<ConstantCoupling>(parse_double("network.coupling", name.substr(6)));
    try {
        return preset(name);
    } catch (const std::exception& ex) {
        throw ConfigError("network.coupling", ex.what());
    }
}

NetworkSpec make_spec(const ExperimentConfig& cfg) {
    cfg.validate();
    NetworkSpec spec;
    spec.n = cfg.n;
    spec.g = resolve_coupling(cfg.coupling);
    spec.omega = cfg.omega;
    if (cfg.mode == "population") {
        spec.mode = NetworkMode::population;
    } else if (cfg.mode == "product") {
        spec.mode = NetworkMode::product;
        spec.epsilon = cfg.epsilon;
    } else {
        spec.mode = NetworkMode::general;
        if (cfg.adjacency.empty())
            throw ConfigError("network.adjacency", "required in general mode");
        std::ifstream in(cfg.adjacency);
        if (!in) throw ConfigError("network.adjacency", "cannot open '" + cfg.adjacency + "'");
        std::string line;
        while (std::getline(in, line)) {
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ','))
                spec.adjacency.push_back(parse_double("network.adjacency", trim(cell)));
        }
        if (spec.adjacency.size() != static_cast<std::size_t>(cfg.n) * cfg.n)
            throw ConfigError("network.adjacency",
                              "expected n*n = " + std::to_string(cfg.n * cfg.n) + " values, got " +
                                  std::to_string(spec.adjacency.size()));
    }
    return spec;
}

PermGroup ambient_group(const NetworkSpec& spec) {
    switch (spec.mode) {
        case NetworkMode::population:
            return make_group(GroupKind::symmetric, spec.n);
        case NetworkMode::product:
            return make_group(GroupKind::wreath_s2, spec.n);
        case NetworkMode::general: {
            if (spec.n > 8)
                throw std::invalid_argument("ambient_group: general mode limited to n <= 8");
            const auto sn = make_group(GroupKind::symmetric, spec.n);
            std::vector<Permutation> auts;
            for (const auto& g : sn.elements()) {
                bool ok = true;
                for (int k = 0; k < spec.n && ok; ++k)
                    for (int j = 0; j < spec.n && ok; ++j)
                        ok = spec.adjacency[static_cast<std::size_t>(g(k)) * spec.n + g(j)] ==
                             spec.adjacency[static_cast<std::size_t>(k) * spec.n + j];
                if (ok) auts.push_back(g);
            }
            return PermGroup::from_elements(spec.n, std::move(auts), "Aut(H)");
        }
    }
    throw std::logic_error("ambient_group: unknown mode");
}

std::vector<double> coherent_seed_offsets() { return {0.0, 0.0975, 0.1253, 0.2247}; }

RelativeEquilibrium coherent_equilibrium(const CouplingPtr& g_hat) {
    return refine_equilibrium(g_hat, coherent_seed_offsets(), 1e-10);
}

BootstrapResult bootstrap_incoherent(const CouplingPtr& g_hat, int n, std::uint64_t seed,
                                     const IntegratorConfig& integ, double settle,
                                     int max_attempts) {
    NetworkSpec spec;
    spec.mode = NetworkMode::population;
    spec.n = n;
    spec.g = g_hat;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        const std::uint64_t s = seed + static_cast<std::uint64_t>(attempt);
        std::mt19937_64 rng(s);
        std::uniform_real_distribution<double> unif(0.0, kTwoPi);
        std::vector<double> x0(static_cast<std::size_t>(n), 0.0);
        for (int k = 1; k < n; ++k) x0[static_cast<std::size_t>(k)] = unif(rng);
        std::sort(x0.begin() + 1, x0.end());
        bool distinct = true;
        for (int k = 1; k < n; ++k)
            if (x0[static_cast<std::size_t>(k)] <= x0[static_cast<std::size_t>(k - 1)])
                distinct = false;
        if (!distinct) continue;

        const auto traj = integrate(spec, x0, settle, integ);
        std::vector<std::vector<double>> tail(traj.states.begin() + traj.states.size() / 2,
                                              traj.states.end());
        const auto xi = xi_set(tail, 0.0);
        if (xi.subset_of_arc(0.4, kTwoPi - 0.4, 0.05))
            return {traj.final_state, s, attempt + 1};
    }
    throw std::runtime_error(
        "bootstrap_incoherent: no seed reached the incoherent attractor; widen max_attempts");
}

std::vector<double> initial_condition(const ExperimentConfig& cfg, const NetworkSpec& spec) {
    const std::string& mode = cfg.init;
    const int d = spec.dim();
    auto random_state = [&](std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unif(0.0, kTwoPi);
        std::vector<double> x(static_cast<std::size_t>(d));
        for (double& v : x) v = unif(rng);
        return x;
    };
    if (mode.rfind("list:", 0) == 0) {
        auto x = parse_list("run.init", mode.substr(5));
        if (static_cast<int>(x.size()) != d)
            throw ConfigError("run.init", "expected " + std::to_string(d) + " phases");
        return x;
    }
    if (mode == "sync") return std::vector<double>(static_cast<std::size_t>(d), 0.0);
    if (mode == "random") return random_state(cfg.seed);
    if (mode == "bootstrap" || (mode == "auto" && spec.mode == NetworkMode::product)) {
        auto boot = bootstrap_incoherent(spec.g, spec.n, cfg.seed, cfg.integ);
        if (spec.mode != NetworkMode::product) return boot.state;
        // Product: coherent offsets for population 1, incoherent point for
        // population 2.
        const auto eq = coherent_equilibrium(spec.g);
        std::vector<double> x0(eq.alpha);
        for (double v : boot.state) x0.push_back(mod_2pi(v));
        return x0;
    }
    if (mode == "equilibrium") {
        const auto eq = coherent_equilibrium(spec.g);
        if (spec.mode == NetworkMode::product)
            throw ConfigError("run.init", "equilibrium init is for single-population runs");
        return eq.alpha;
    }
    if (mode == "auto") return random_state(cfg.seed);
    throw ConfigError("run.init", "unknown strategy '" + mode + "'");
}

std::vector<double> seeded_tangent(int dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x7a32'1bd5'9e44'0c17ull);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(dim));
    double norm = 0.0;
    for (double& x : v) {
        x = gauss(rng);
        norm += x * x;
    }
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    return v;
}

std::string scan_class(double S2, int Q2) {
    if (std::abs(S2) > 1e-1) return Q2 == 1 ? "trivial" : "uncertain";
    return "nontrivial";
}

// --- Scan -----------------------------------------------------------------

std::vector<ScanRow> run_scan(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.eps_grid.empty()) throw ConfigError("run.eps", "scan grid is empty");
    if (cfg.mode != "product") throw ConfigError("network.mode", "scan requires product mode");

    NetworkSpec base = make_spec(cfg);
    const auto x0 = initial_condition(cfg, base);  // fixed across the grid
    const auto v0 = seeded_tangent(base.dim(), cfg.seed);
    const double T = cfg.effective_horizon();
    const auto gamma = ambient_group(base);

    std::vector<ScanRow> rows(cfg.eps_grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next.fetch_add(1); i < rows.size(); i = next.fetch_add(1)) {
            ScanRow& row = rows[i];
            row.eps = cfg.eps_grid[i];
            try {
                NetworkSpec spec = base;
                spec.epsilon = row.eps;
                auto [traj, lyap] = integrate_with_tangent(spec, x0, v0, T, cfg.integ);
                const double burn = default_burn_in(T);
                const auto s1 = symmetry_statistics(traj, spec.n, 0, burn);
                const auto s2 = symmetry_statistics(traj, spec.n, 1, burn);
                const auto verdict = classify(traj, spec, gamma, cfg.freq_tol, cfg.setwise_tol);
                row.lambda_max = lyap.final_value;
                row.S1 = s1.S;
                row.S2 = s2.S;
                row.Q1 = s1.quadrants;
                row.Q2 = s2.quadrants;
                row.band1 = verdict.bands[0];
                row.band2 = verdict.bands[1];
                row.bands_overlap = verdict.bands_overlap;
                row.is_weak_chimera = verdict.is_weak_chimera;
                row.cls = scan_class(row.S2, row.Q2);
                row.ok = true;
            } catch (const std::exception& ex) {
                row.ok = false;
                row.error = ex.what();
            }
        }
    };
    unsigned pool = cfg.workers > 0 ? static_cast<unsigned>(cfg.workers)
                                    : std::max(1u, std::thread::hardware_concurrency());
    pool = std::min<unsigned>(pool, static_cast<unsigned>(rows.size()));
    std::vector<std::thread> threads;
    for (unsigned i = 0; i + 1 < pool; ++i) threads.emplace_back(worker);
    worker();
    for (auto& th : threads) th.join();
    return rows;
}

// --- Writers ------------------------------------------------------------------

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "t";
    for (int k = 1; k <= traj.dim(); ++k) out << ",phi_" << k;
    out << "\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        std::vector<double> row{traj.times[i]};
        row.insert(row.end(), traj.states[i].begin(), traj.states[i].end());
        csv_row(out, row);
    }
}

void write_scan_csv(const std::string& path, const std::vector<ScanRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "eps,lambda_max,S1,S2,Q1,Q2,band1_lo,band1_hi,band2_lo,band2_hi,"
           "bands_overlap,weak_chimera,class,status,error\n";
    out.precision(15);
    for (const auto& r : rows) {
        out << r.eps << "," << r.lambda_max << "," << r.S1 << "," << r.S2 << "," << r.Q1 << ","
            << r.Q2 << "," << r.band1.lo << "," << r.band1.hi << "," << r.band2.lo << ","
            << r.band2.hi << "," << (r.bands_overlap ? 1 : 0) << "," << (r.is_weak_chimera ? 1 : 0)
            << "," << r.cls << "," << (r.ok ? "ok" : "failed") << "," << r.error << "\n";
    }
}

// --- Commands --------------------------------------------------------------------

namespace {

namespace fs = std::filesystem;

fs::path ensure_out_dir(const ExperimentConfig& cfg) {
    fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    return dir;
}

void write_json(const fs::path& p, const nlohmann::json& j) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot open " + p.string());
    out << j.dump(2) << "\n";
}

void write_stats_csv(const fs::path& p, const Trajectory& traj, const NetworkSpec& spec) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot open " + p.string());
    const int pops = spec.mode == NetworkMode::product ? 2 : 1;
    out << "t";
    for (int l = 1; l <= pops; ++l) out << ",R_" << l;
    for (int k = 2; k <= traj.dim(); ++k) out << ",dphi_" << k;
    out << "\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        std::vector<double> row{traj.times[i]};
        for (int l = 0; l < pops; ++l)
            row.push_back(order_parameter(traj.states[i], spec.n, l));
        for (int k = 1; k < traj.dim(); ++k)
            row.push_back(std::remainder(
                traj.states[i][static_cast<std::size_t>(k)] - traj.states[i][0], kTwoPi));
        csv_row(out, row);
    }
}

int run_guarded(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const ConfigError& ex) {
        std::fprintf(stderr, "%s\n", ex.what());
        return 2;
    } catch (const IntegrationError& ex) {
        std::fprintf(stderr, "integration failure: %s\n", ex.what());
        return 3;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
}

}  // namespace

int cmd_simulate(const ExperimentConfig& cfg) {
    return run_guarded([&] {
        const NetworkSpec spec = make_spec(cfg);
        const auto dir = ensure_out_dir(cfg);
        const auto x0 = initial_condition(cfg, spec);
        const double T = cfg.effective_horizon();
        const auto traj = integrate(spec, x0, T, cfg.integ);
        const auto gamma = ambient_group(spec);
        const auto verdict = classify(traj, spec, gamma, cfg.freq_tol, cfg.setwise_tol);

        write_trajectory_csv((dir / "trajectory.csv").string(), traj);
        write_stats_csv(dir / "stats.csv", traj, spec);
        write_json(dir / "frequency.json", to_json(verdict.freq));
        write_json(dir / "verdict.json", to_json(verdict));
        std::printf("simulate: T=%g dim=%d weak_chimera=%s -> %s\n", T, spec.dim(),
                    verdict.is_weak_chimera ? "true" : "false", dir.string().c_str());
    });
}

int cmd_equilibrium(const ExperimentConfig& cfg) {
    return run_guarded([&] {
        cfg.validate();
        const auto dir = ensure_out_dir(cfg);
        const auto g = resolve_coupling(cfg.coupling);
        const auto eq = coherent_equilibrium(g);
        const auto cert = trivial_symmetry_check(g, eq);
        auto j = to_json(eq);
        j["trivial_symmetry"] = cert.trivial;
        j["symmetry_check"] = cert.method;
        write_json(dir / "equilibrium.json", j);
        std::printf("equilibrium: omega*=%.12g residual=%.3g stable=%s symmetry=%s (%s)\n",
                    eq.omega_star, eq.residual_norm,
                    eq.numerically_stable() ? "yes" : "no",
                    cert.trivial ? "trivial" : "nontrivial", cert.method.c_str());
    });
}

namespace {

int figure_one(const ExperimentConfig& cfg) {
    const auto dir = ensure_out_dir(cfg);
    const auto g = resolve_coupling(cfg.coupling);
    const auto eq = coherent_equilibrium(g);

    // Incoherent attractor samples from the bootstrap initial condition.
    NetworkSpec pop;
    pop.mode = NetworkMode::population;
    pop.n = cfg.n;
    pop.g = g;
    const auto boot = bootstrap_incoherent(g, cfg.n, cfg.seed, cfg.integ);
    const auto traj = integrate(pop, boot.state, std::min(cfg.effective_horizon(), 5000.0),
                                cfg.integ);
    const double burn = default_burn_in(traj.horizon());
    std::vector<std::vector<double>> tail;
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        if (traj.times[i] >= burn) tail.push_back(traj.states[i]);

    const auto xi_inc = xi_set(tail, 0.0);
    const auto xi_coh = xi_set_point(eq.alpha, 0.0);
    const auto cert = separation_certificate(xi_inc, xi_coh);

    // Coupling curve.
    std::ofstream curve(dir / "fig1_coupling.csv");
    curve << "phi,g_hat\n";
    std::vector<std::pair<double, double>> curve_pts;
    for (int i = 0; i <= 2048; ++i) {
        const double phi = kTwoPi * i / 2048.0;
        curve.precision(15);
        curve << phi << "," << g->value(phi) << "\n";
        curve_pts.emplace_back(phi, g->value(phi));
    }

    // Marker sets: subsampled pairwise differences on the incoherent set,
    // all 12 ordered pairs on the coherent one.
    std::ofstream inc(dir / "fig1_xi_inc.csv");
    inc << "dphi,g_hat\n";
    inc.precision(15);
    std::vector<std::pair<double, double>> inc_pts;
    const std::size_t stride = std::max<std::size_t>(1, tail.size() / 160);
    for (std::size_t i = 0; i < tail.size(); i += stride) {
        const auto& s = tail[i];
        for (std::size_t k = 0; k < s.size(); ++k)
            for (std::size_t j = 0; j < s.size(); ++j)
                if (k != j) {
                    const double d = mod_2pi(s[k] - s[j]);
                    inc << d << "," << g->value(d) << "\n";
                    inc_pts.emplace_back(d, g->value(d));
                }
    }
    std::ofstream coh(dir / "fig1_xi_coh.csv");
    coh << "dphi,g_hat\n";
    coh.precision(15);
    std::vector<std::pair<double, double>> coh_pts;
    for (std::size_t k = 0; k < eq.alpha.size(); ++k)
        for (std::size_t j = 0; j < eq.alpha.size(); ++j)
            if (k != j) {
                const double d = mod_2pi(eq.alpha[k] - eq.alpha[j]);
                coh << d << "," << g->value(d) << "\n";
                coh_pts.emplace_back(d, g->value(d));
            }

    nlohmann::json summary{{"schema", "symosc.fig1/1"},
                           {"equilibrium", to_json(eq)},
                           {"bootstrap_seed", boot.seed_used},
                           {"xi_inc_within_band", xi_inc.subset_of_arc(0.4, kTwoPi - 0.4, 0.05)},
                           {"separated", cert.has_value()}};
    if (cert) {
        summary["Q_inc"] = {cert->first.lo, cert->first.hi};
        summary["Q_coh"] = {cert->second.lo, cert->second.hi};
    }
    write_json(dir / "fig1_summary.json", summary);

    double glo = 0, ghi = 0;
    for (const auto& [x, y] : curve_pts) {
        glo = std::min(glo, y);
        ghi = std::max(ghi, y);
    }
    SvgPanel panel(0.0, kTwoPi, glo - 0.5, ghi + 0.5,
                   "coupling and pairwise-difference sets (filled: incoherent, hollow: coherent)");
    panel.polyline(curve_pts, "#999");
    panel.scatter(inc_pts, "#000", 1.5, false);
    panel.scatter(coh_pts, "#000", 3.0, true);
    if (cert) {
        panel.vline(mod_2pi(cert->first.lo), "#c33");
        panel.vline(mod_2pi(cert->first.hi), "#c33");
        panel.vline(mod_2pi(cert->second.lo), "#36c");
        panel.vline(mod_2pi(cert->second.hi), "#36c");
    }
    write_svg((dir / "fig1.svg").string(), {panel});
    std::printf("fig1: separated=%s -> %s\n", cert ? "yes" : "no", dir.string().c_str());
    return 0;
}

int figure_two(const ExperimentConfig& cfg) {
    const auto dir = ensure_out_dir(cfg);
    ExperimentConfig c = cfg;
    c.mode = "product";
    c.init = "auto";
    const NetworkSpec spec = make_spec(c);
    const auto x0 = initial_condition(c, spec);
    const auto v0 = seeded_tangent(spec.dim(), c.seed);
    const double T = c.effective_horizon();
    auto [traj, lyap] = integrate_with_tangent(spec, x0, v0, T, c.integ);
    const auto gamma = ambient_group(spec);
    const auto verdict = classify(traj, spec, gamma, c.freq_tol, c.setwise_tol);
    const double burn = default_burn_in(T);
    const auto s1 = symmetry_statistics(traj, spec.n, 0, burn);
    const auto s2 = symmetry_statistics(traj, spec.n, 1, burn);

    // Phase raster in the frame co-rotating at the mean speed of the first
    // oscillator.
    const double w0 = verdict.freq.omega[0];
    {
        std::ofstream out(dir / "fig2_phases.csv");
        out << "t";
        for (int k = 1; k <= spec.dim(); ++k) out << ",phi_" << k;
        out << "\n";
        out.precision(15);
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            out << traj.times[i];
            for (int k = 0; k < spec.dim(); ++k)
                out << ","
                    << mod_2pi(traj.states[i][static_cast<std::size_t>(k)] - w0 * traj.times[i]);
            out << "\n";
        }
    }
    {
        std::ofstream out(dir / "fig2_freqs.csv");
        out << "t";
        for (int k = 1; k <= spec.dim(); ++k) out << ",dphi_dt_" << k;
        out << "\n";
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            std::vector<double> row{traj.times[i]};
            const auto vel = field(spec, traj.states[i]);
            row.insert(row.end(), vel.begin(), vel.end());
            csv_row(out, row);
        }
    }
    {
        std::ofstream out(dir / "fig2_lyap.csv");
        out << "t,lambda_max\n";
        for (std::size_t i = 0; i < lyap.times.size(); ++i) {
            std::vector<double> row{lyap.times[i], lyap.running[i]};
            csv_row(out, row);
        }
    }
    {
        std::ofstream out(dir / "fig2_proj.csv");
        out << "t,y1_1,y1_2,y2_1,y2_2\n";
        const std::size_t off = traj.times.size() - s1.y.size();
        for (std::size_t i = 0; i < s1.y.size(); ++i) {
            std::vector<double> row{traj.times[off + i], s1.y[i][0], s1.y[i][1], s2.y[i][0],
                                    s2.y[i][1]};
            csv_row(out, row);
        }
    }
    write_stats_csv(dir / "fig2_stats.csv", traj, spec);
    auto j = to_json(verdict);
    j["lambda_max"] = lyap.final_value;
    j["S"] = {s1.S, s2.S};
    j["Q"] = {s1.quadrants, s2.quadrants};
    write_json(dir / "fig2_verdict.json", j);

    // Panels: Lyapunov convergence plus the two projections.
    std::vector<std::pair<double, double>> lpts;
    for (std::size_t i = 0; i < lyap.times.size(); ++i)
        lpts.emplace_back(lyap.times[i], lyap.running[i]);
    double lmin = 0, lmax = 0;
    for (const auto& [t, l] : lpts) {
        lmin = std::min(lmin, l);
        lmax = std::max(lmax, l);
    }
    SvgPanel p1(0, T, lmin - 0.01, lmax + 0.01, "maximal Lyapunov exponent (running)");
    p1.polyline(lpts, "#000");
    SvgPanel p2(-1.05, 1.05, -1.05, 1.05, "population 1 projection y_1");
    SvgPanel p3(-1.05, 1.05, -1.05, 1.05, "population 2 projection y_2");
    std::vector<std::pair<double, double>> y1pts, y2pts;
    for (const auto& y : s1.y) y1pts.emplace_back(y[0], y[1]);
    for (const auto& y : s2.y) y2pts.emplace_back(y[0], y[1]);
    p2.scatter(y1pts, "#36c", 1.0);
    p3.scatter(y2pts, "#c33", 1.0);
    write_svg((dir / "fig2.svg").string(), {p1, p2, p3});
    std::printf("fig2: lambda_max=%.4g weak_chimera=%s -> %s\n", lyap.final_value,
                verdict.is_weak_chimera ? "true" : "false", dir.string().c_str());
    return 0;
}

int figure_three(const ExperimentConfig& cfg) {
    const auto dir = ensure_out_dir(cfg);
    ExperimentConfig c = cfg;
    c.mode = "product";
    c.init = "auto";
    if (c.eps_grid.empty())
        for (int i = 0; i <= 20; ++i) c.eps_grid.push_back(0.005 * i);
    const auto rows = run_scan(c);
    write_scan_csv((dir / "fig3_scan.csv").string(), rows);

    std::vector<std::pair<double, double>> lpts;
    double lmin = 0, lmax = 0, fmin = 0, fmax = 0;
    std::vector<std::pair<double, double>> trivial_pts, uncertain_pts, nontrivial_pts;
    for (const auto& r : rows) {
        if (!r.ok) continue;
        lpts.emplace_back(r.eps, r.lambda_max);
        lmin = std::min(lmin, r.lambda_max);
        lmax = std::max(lmax, r.lambda_max);
        fmin = std::min({fmin, r.band1.lo, r.band2.lo});
        fmax = std::max({fmax, r.band1.hi, r.band2.hi});
        auto& bucket = r.cls == "trivial" ? trivial_pts
                      : r.cls == "uncertain" ? uncertain_pts
                                             : nontrivial_pts;
        bucket.emplace_back(r.eps, r.lambda_max);
    }
    const double e0 = rows.front().eps, e1 = rows.back().eps;
    SvgPanel p1(e0, e1, lmin - 0.005, lmax + 0.005,
                "lambda_max vs eps (filled: trivial, half: uncertain, hollow: nontrivial)");
    p1.polyline(lpts, "#aaa");
    p1.scatter(trivial_pts, "#000", 3.0, false);
    p1.scatter(uncertain_pts, "#666", 3.0, false);
    p1.scatter(nontrivial_pts, "#000", 3.0, true);
    SvgPanel p2(e0, e1, fmin - 0.2, fmax + 0.2, "instantaneous frequency ranges per population");
    std::vector<std::pair<double, double>> b1lo, b1hi, b2lo, b2hi;
    for (const auto& r : rows) {
        if (!r.ok) continue;
        b1lo.emplace_back(r.eps, r.band1.lo);
        b1hi.emplace_back(r.eps, r.band1.hi);
        b2lo.emplace_back(r.eps, r.band2.lo);
        b2hi.emplace_back(r.eps, r.band2.hi);
    }
    p2.polyline(b1lo, "#555");
    p2.polyline(b1hi, "#555");
    p2.polyline(b2lo, "#bbb");
    p2.polyline(b2hi, "#bbb");
    write_svg((dir / "fig3.svg").string(), {p1, p2});

    std::size_t ok = 0;
    for (const auto& r : rows) ok += r.ok ? 1 : 0;
    std::printf("fig3: %zu/%zu rows ok -> %s\n", ok, rows.size(), dir.string().c_str());
    return ok > 0 ? 0 : 3;
}

}  // namespace

int cmd_figure(const std::string& which, const ExperimentConfig& cfg) {
    return run_guarded([&] {
        cfg.validate();
        int rc = 0;
        if (which == "fig1") rc = figure_one(cfg);
        else if (which == "fig2") rc = figure_two(cfg);
        else if (which == "fig3") rc = figure_three(cfg);
        else throw ConfigError("figure", "unknown figure '" + which + "' (use fig1|fig2|fig3)");
        if (rc != 0) throw std::runtime_error("figure command failed");
    });
}

int cmd_scan(const ExperimentConfig& cfg) {
    return run_guarded([&] {
        const auto rows = run_scan(cfg);
        const auto dir = ensure_out_dir(cfg);
        write_scan_csv((dir / "scan.csv").string(), rows);
        std::size_t ok = 0;
        for (const auto& r : rows) {
            ok += r.ok ? 1 : 0;
            if (!r.ok) std::fprintf(stderr, "scan eps=%g failed: %s\n", r.eps, r.error.c_str());
        }
        std::printf("scan: %zu/%zu rows ok -> %s\n", ok, rows.size(),
                    (dir / "scan.csv").string().c_str());
        if (ok == 0) throw IntegrationError("all scan rows failed", 0.0);
    });
}

}  // namespace symosc
