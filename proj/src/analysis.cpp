#include "symosc/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace symosc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kPi = 3.14159265358979323846;

double mod_2pi(double x) {
    double m = std::fmod(x, kTwoPi);
    return m < 0 ? m + kTwoPi : m;
}

}  // namespace

// --- IntervalSet ------------------------------------------------------------

IntervalSet IntervalSet::from_arcs(std::vector<Arc> raw) {
    IntervalSet out;
    if (raw.empty()) return out;
    std::vector<Arc> arcs;
    double total = 0.0;
    for (const auto& a : raw) {
        const double len = a.hi - a.lo;
        if (len < 0) throw std::invalid_argument("IntervalSet: arc with hi < lo");
        if (len >= kTwoPi) return full_circle();
        const double lo = mod_2pi(a.lo);
        arcs.push_back({lo, lo + len});
        total += len;
    }
    std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) { return a.lo < b.lo; });
    // Linear merge.
    std::vector<Arc> merged;
    for (const auto& a : arcs) {
        if (!merged.empty() && a.lo <= merged.back().hi)
            merged.back().hi = std::max(merged.back().hi, a.hi);
        else
            merged.push_back(a);
    }
    // Wrap merge: the last arc may spill past 2*pi into the leading arcs.
    while (merged.size() > 1 && merged.back().hi >= merged.front().lo + kTwoPi) {
        merged.back().hi = std::max(merged.back().hi, merged.front().hi + kTwoPi);
        merged.erase(merged.begin());
    }
    if (merged.size() == 1 && merged.front().length() >= kTwoPi) return full_circle();
    out.arcs_ = std::move(merged);
    return out;
}

IntervalSet IntervalSet::from_points(const std::vector<double>& points, double pad) {
    std::vector<Arc> arcs;
    arcs.reserve(points.size());
    for (double p : points) arcs.push_back({p - pad, p + pad});
    return from_arcs(std::move(arcs));
}

IntervalSet IntervalSet::full_circle() {
    IntervalSet s;
    s.full_ = true;
    return s;
}

double IntervalSet::measure() const {
    if (full_) return kTwoPi;
    double m = 0.0;
    for (const auto& a : arcs_) m += a.length();
    return m;
}

bool IntervalSet::contains(double angle, double tol) const {
    if (full_) return true;
    const double x = mod_2pi(angle);
    for (const auto& a : arcs_) {
        if (x >= a.lo - tol && x <= a.hi + tol) return true;
        if (x + kTwoPi >= a.lo - tol && x + kTwoPi <= a.hi + tol) return true;
    }
    return false;
}

bool IntervalSet::subset_of_arc(double lo, double hi, double tol) const {
    if (hi - lo >= kTwoPi) return true;
    if (full_) return false;
    const double clo = mod_2pi(lo);
    const double clen = hi - lo;
    for (const auto& a : arcs_) {
        double s = mod_2pi(a.lo - clo);
        if (s > kTwoPi - tol) s -= kTwoPi;
        if (s < -tol || s + a.length() > clen + tol) return false;
    }
    return true;
}

bool IntervalSet::intersects(const IntervalSet& other) const {
    if (full_ || other.full_) return !(empty() || other.empty());
    for (const auto& a : arcs_) {
        for (const auto& b : other.arcs_) {
            const double s = mod_2pi(b.lo - a.lo);
            const double r = mod_2pi(a.lo - b.lo);
            if (s <= a.length() || r <= b.length()) return true;
        }
    }
    return false;
}

std::vector<IntervalSet::Arc> IntervalSet::gaps() const {
    std::vector<Arc> out;
    if (full_ || arcs_.empty()) return out;
    const std::size_t m = arcs_.size();
    for (std::size_t i = 0; i < m; ++i) {
        const double from = arcs_[i].hi;
        const double to = arcs_[(i + 1) % m].lo;
        double len = mod_2pi(to - from);
        if (m == 1) len = kTwoPi - arcs_[0].length();
        if (len > 0) {
            const double lo = mod_2pi(from);
            out.push_back({lo, lo + len});
        }
    }
    return out;
}

// --- Xi sets -----------------------------------------------------------------

IntervalSet xi_set_point(const std::vector<double>& state, double pad) {
    std::vector<double> diffs;
    const std::size_t n = state.size();
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
            if (k != j) diffs.push_back(mod_2pi(state[k] - state[j]));
    return IntervalSet::from_points(diffs, pad);
}

IntervalSet xi_set(const std::vector<std::vector<double>>& samples, double pad) {
    std::vector<double> diffs;
    for (const auto& s : samples) {
        const std::size_t n = s.size();
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j)
                if (k != j) diffs.push_back(mod_2pi(s[k] - s[j]));
    }
    return IntervalSet::from_points(diffs, pad);
}

// --- Separation certificate ---------------------------------------------------

std::optional<std::pair<IntervalSet::Arc, IntervalSet::Arc>> separation_certificate(
    const IntervalSet& xi1, const IntervalSet& xi2) {
    using Arc = IntervalSet::Arc;
    if (xi1.is_full() || xi2.is_full()) return std::nullopt;
    if (xi1.empty() && xi2.empty()) return std::make_pair(Arc{0.0, 0.5}, Arc{kPi, kPi + 0.5});
    if (xi1.empty() || xi2.empty()) {
        const IntervalSet& s = xi1.empty() ? xi2 : xi1;
        auto gs = s.gaps();
        if (gs.empty()) return std::nullopt;
        const Arc g = *std::max_element(gs.begin(), gs.end(), [](const Arc& a, const Arc& b) {
            return a.length() < b.length();
        });
        const double L = g.length();
        // Enclose the set, expanding a sixth of the gap on both sides; park the
        // empty set's arc in the middle of the gap.
        const double set_lo = mod_2pi(g.hi);
        const double set_len = kTwoPi - L;
        Arc q_set{set_lo - L / 6.0, set_lo + set_len + L / 6.0};
        Arc q_empty{g.lo + 0.45 * L, g.lo + 0.55 * L};
        if (xi1.empty()) return std::make_pair(q_empty, q_set);
        return std::make_pair(q_set, q_empty);
    }
    if (xi1.intersects(xi2)) return std::nullopt;

    struct Labeled {
        Arc arc;
        int label;
    };
    std::vector<Labeled> all;
    for (const auto& a : xi1.arcs()) all.push_back({a, 0});
    for (const auto& a : xi2.arcs()) all.push_back({a, 1});
    std::sort(all.begin(), all.end(),
              [](const Labeled& a, const Labeled& b) { return a.arc.lo < b.arc.lo; });
    const std::size_t m = all.size();
    int transitions = 0;
    for (std::size_t i = 0; i < m; ++i)
        if (all[i].label != all[(i + 1) % m].label) ++transitions;
    if (transitions != 2) return std::nullopt;  // interleaved blocks

    // Locate the start of the label-0 run.
    std::size_t start0 = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (all[i].label == 0 && all[(i + m - 1) % m].label == 1) {
            start0 = i;
            break;
        }
    }
    std::size_t end0 = start0;
    while (all[(end0 + 1) % m].label == 0) end0 = (end0 + 1) % m;
    const std::size_t start1 = (end0 + 1) % m;
    const std::size_t end1 = (start0 + m - 1) % m;

    const Arc& a0 = all[start0].arc;
    const Arc& a0e = all[end0].arc;
    const Arc& a1 = all[start1].arc;
    const Arc& a1e = all[end1].arc;
    const double gap_before0 = mod_2pi(a0.lo - a1e.hi);  // after block 1 ends
    const double gap_before1 = mod_2pi(a1.lo - a0e.hi);  // after block 0 ends
    const double len0 = mod_2pi(a0e.hi - a0.lo);
    const double len1 = mod_2pi(a1e.hi - a1.lo);
    Arc q1{a0.lo - gap_before0 / 3.0, a0.lo + len0 + gap_before1 / 3.0};
    Arc q2{a1.lo - gap_before1 / 3.0, a1.lo + len1 + gap_before0 / 3.0};
    return std::make_pair(q1, q2);
}

// --- Frequencies ---------------------------------------------------------------

double default_burn_in(double horizon) {
    return std::min(std::max(0.1 * horizon, 100.0), 0.5 * horizon);
}

double frequency_tolerance(double averaging_horizon) {
    return std::max(1e-3, 10.0 / averaging_horizon);
}

double FrequencyVector::max_disagreement() const {
    double d = 0.0;
    for (std::size_t i = 0; i < omega.size(); ++i)
        d = std::max(d, std::abs(omega[i] - omega_field[i]));
    return d;
}

namespace {

std::size_t burn_index(const Trajectory& traj, double burn_in) {
    std::size_t ib = 0;
    while (ib < traj.times.size() && traj.times[ib] < burn_in) ++ib;
    if (ib + 1 >= traj.times.size())
        throw std::invalid_argument("analysis: trajectory horizon must exceed burn-in");
    return ib;
}

}  // namespace

FrequencyVector frequency_vector(const Trajectory& traj, const NetworkSpec& spec,
                                 double burn_in) {
    const std::size_t ib = burn_index(traj, burn_in);
    const double t0 = traj.times[ib];
    const double T = traj.times.back();
    const auto d = static_cast<std::size_t>(traj.dim());

    FrequencyVector out;
    out.horizon = T;
    out.burn_in = t0;
    out.estimator_error = std::max(1e-6, 10.0 / (T - t0));

    out.omega.resize(d);
    for (std::size_t k = 0; k < d; ++k)
        out.omega[k] = (traj.states.back()[k] - traj.states[ib][k]) / (T - t0);

    // Secondary estimate: trapezoidal average of the field along the record grid.
    out.omega_field.assign(d, 0.0);
    std::vector<double> prev = field(spec, traj.states[ib]), cur;
    for (std::size_t i = ib + 1; i < traj.times.size(); ++i) {
        cur = field(spec, traj.states[i]);
        const double w = 0.5 * (traj.times[i] - traj.times[i - 1]);
        for (std::size_t k = 0; k < d; ++k) out.omega_field[k] += w * (prev[k] + cur[k]);
        prev.swap(cur);
    }
    for (std::size_t k = 0; k < d; ++k) out.omega_field[k] /= (T - t0);

    out.under_resolved = out.max_disagreement() > 10.0 * out.estimator_error;
    return out;
}

std::vector<double> ergodic_average(
    const Trajectory& traj, double burn_in,
    const std::function<std::vector<double>(const std::vector<double>&)>& observable) {
    const std::size_t ib = burn_index(traj, burn_in);
    const double span = traj.times.back() - traj.times[ib];
    std::vector<double> prev = observable(traj.states[ib]);
    std::vector<double> acc(prev.size(), 0.0);
    for (std::size_t i = ib + 1; i < traj.times.size(); ++i) {
        std::vector<double> cur = observable(traj.states[i]);
        const double w = 0.5 * (traj.times[i] - traj.times[i - 1]);
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += w * (prev[k] + cur[k]);
        prev.swap(cur);
    }
    for (double& a : acc) a /= span;
    return acc;
}

// --- Winding ---------------------------------------------------------------------

double winding_change(const std::vector<std::complex<double>>& zk) {
    double total = 0.0;
    for (std::size_t i = 1; i < zk.size(); ++i) {
        const std::complex<double> q = zk[i] * std::conj(zk[i - 1]);
        const double jump = std::arg(q);
        if (std::abs(jump) >= kPi - 1e-9)
            throw std::runtime_error("winding_change: undersampled (argument jump >= pi)");
        total += jump;
    }
    return total;
}

std::vector<std::vector<std::complex<double>>> complex_embedding(const Trajectory& traj) {
    std::vector<std::vector<std::complex<double>>> z(traj.states.size());
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        z[i].reserve(traj.states[i].size());
        for (double phi : traj.states[i])
            z[i].emplace_back(std::cos(phi), std::sin(phi));
    }
    return z;
}

double winding_change(const std::vector<std::vector<std::complex<double>>>& z, int k) {
    std::vector<std::complex<double>> zk;
    zk.reserve(z.size());
    for (const auto& row : z) zk.push_back(row[static_cast<std::size_t>(k)]);
    return winding_change(zk);
}

// --- W intervals --------------------------------------------------------------------

namespace {

double population_velocity(const Coupling& g, const std::vector<double>& d, std::size_t k) {
    double acc = 0.0;
    for (double dj : d) acc += g.value(d[k] - dj);
    return acc / static_cast<double>(d.size());
}

bool feasible_config(const IntervalSet& Q, const std::vector<double>& d) {
    const std::size_t n = d.size();
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
            if (k != j && !Q.contains(d[k] - d[j], 1e-12)) return false;
    return true;
}

double sample_from(const IntervalSet& Q, std::mt19937_64& rng) {
    const auto& arcs = Q.arcs();
    const double total = Q.measure();
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    if (total <= 0.0) {
        // Degenerate point set: pick one of the points.
        const auto idx = static_cast<std::size_t>(unif(rng) * static_cast<double>(arcs.size()));
        return arcs[std::min(idx, arcs.size() - 1)].lo;
    }
    double r = unif(rng) * total;
    for (const auto& a : arcs) {
        if (r <= a.length()) return a.lo + r;
        r -= a.length();
    }
    return arcs.back().hi;
}

}  // namespace

WIntervalEstimate w_interval(const Coupling& g, const IntervalSet& Q, int n, long budget,
                             std::uint64_t seed) {
    if (budget < 1000) throw std::invalid_argument("w_interval: budget must be >= 1000");
    if (n < 1) throw std::invalid_argument("w_interval: n must be >= 1");
    if (Q.empty()) throw std::runtime_error("w_interval: empty feasible set (Q is empty)");

    const int restarts = 8;
    const long per_restart = budget / restarts;
    std::vector<double> mins, maxs;
    bool any_feasible = false;

    for (int r = 0; r < restarts; ++r) {
        std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(r + 1));
        std::vector<double> best_min_cfg, best_max_cfg;
        double best_min = std::numeric_limits<double>::infinity();
        double best_max = -std::numeric_limits<double>::infinity();

        std::vector<double> d(static_cast<std::size_t>(n), 0.0);
        for (long s = 0; s < per_restart; ++s) {
            for (int k = 1; k < n; ++k) d[static_cast<std::size_t>(k)] = sample_from(Q, rng);
            if (!feasible_config(Q, d)) continue;
            any_feasible = true;
            for (int k = 0; k < n; ++k) {
                const double y = population_velocity(g, d, static_cast<std::size_t>(k));
                if (y < best_min) {
                    best_min = y;
                    best_min_cfg = d;
                }
                if (y > best_max) {
                    best_max = y;
                    best_max_cfg = d;
                }
            }
        }
        if (best_min_cfg.empty()) continue;

        // Coordinate hill climbing with shrinking steps, staying feasible.
        auto refine = [&](std::vector<double> cfg, bool minimize) {
            auto objective = [&](const std::vector<double>& c) {
                double extreme = minimize ? std::numeric_limits<double>::infinity()
                                          : -std::numeric_limits<double>::infinity();
                for (int k = 0; k < n; ++k) {
                    const double y = population_velocity(g, c, static_cast<std::size_t>(k));
                    extreme = minimize ? std::min(extreme, y) : std::max(extreme, y);
                }
                return extreme;
            };
            double cur = objective(cfg);
            for (double step = 0.1; step > 1e-5; step *= 0.5) {
                bool improved = true;
                while (improved) {
                    improved = false;
                    for (int k = 1; k < n; ++k) {
                        for (double dir : {step, -step}) {
                            auto trial = cfg;
                            trial[static_cast<std::size_t>(k)] += dir;
                            if (!feasible_config(Q, trial)) continue;
                            const double val = objective(trial);
                            if (minimize ? val < cur : val > cur) {
                                cur = val;
                                cfg = trial;
                                improved = true;
                            }
                        }
                    }
                }
            }
            return cur;
        };
        mins.push_back(refine(best_min_cfg, true));
        maxs.push_back(refine(best_max_cfg, false));
    }

    if (!any_feasible || mins.empty())
        throw std::runtime_error("w_interval: empty feasible set (no feasible configuration found)");

    WIntervalEstimate out;
    out.lo = *std::min_element(mins.begin(), mins.end());
    out.hi = *std::max_element(maxs.begin(), maxs.end());
    const double spread_lo = *std::max_element(mins.begin(), mins.end()) - out.lo;
    const double spread_hi = out.hi - *std::min_element(maxs.begin(), maxs.end());
    out.pad = std::max(spread_lo, spread_hi);
    return out;
}

// --- Order parameter and symmetry statistics ------------------------------------------

double order_parameter(const std::vector<double>& state, int n, int pop) {
    if (n < 1 || pop < 0 || static_cast<std::size_t>((pop + 1) * n) > state.size())
        throw std::invalid_argument("order_parameter: population out of range");
    double re = 0.0, im = 0.0;
    for (int j = 0; j < n; ++j) {
        const double phi = state[static_cast<std::size_t>(pop * n + j)];
        re += std::cos(phi);
        im += std::sin(phi);
    }
    return std::sqrt(re * re + im * im) / n;
}

SymmetryStats symmetry_statistics(const Trajectory& traj, int n, int pop, double burn_in,
                                  double dead_band) {
    if (n != 4)
        throw std::invalid_argument(
            "symmetry_statistics: the order-preserving projection is defined for n = 4");
    const std::size_t ib = burn_index(traj, burn_in);
    const auto base = static_cast<std::size_t>(pop * n);
    if (base + 4 > static_cast<std::size_t>(traj.dim()))
        throw std::invalid_argument("symmetry_statistics: population out of range");

    SymmetryStats out;
    const double span = traj.times.back() - traj.times[ib];
    double prev = 0.0;
    unsigned quadrant_mask = 0;
    for (std::size_t i = ib; i < traj.times.size(); ++i) {
        const auto& s = traj.states[i];
        const double y1 = std::sin(s[base + 2] - s[base + 0]);
        const double y2 = std::sin(s[base + 3] - s[base + 1]);
        out.y.push_back({y1, y2});
        if (std::abs(y1) > dead_band && std::abs(y2) > dead_band)
            quadrant_mask |= 1u << ((y1 > 0 ? 1 : 0) + (y2 > 0 ? 2 : 0));
        if (i > ib) {
            const double w = 0.5 * (traj.times[i] - traj.times[i - 1]);
            out.S += w * (prev + y1);
        }
        prev = y1;
    }
    out.S /= span;
    out.quadrants = __builtin_popcount(quadrant_mask);
    return out;
}

// --- Classification -----------------------------------------------------------------------

SymmetryVerdict classify(const Trajectory& traj, const NetworkSpec& spec, const PermGroup& gamma,
                         double tol, double setwise_tol) {
    if (gamma.degree() != traj.dim())
        throw std::invalid_argument("classify: group degree must match trajectory dimension");

    SymmetryVerdict v{gamma, gamma, gamma, gamma, false, {}, 0.0, setwise_tol, {}, true, {}};
    const double T = traj.horizon();
    const double burn = default_burn_in(T);
    v.freq = frequency_vector(traj, spec, burn);
    v.tol = tol > 0 ? tol : frequency_tolerance(T - v.freq.burn_in);

    v.gamma_omega = isotropy_subgroup(gamma, v.freq.omega, v.tol);
    v.theta = theta_set(v.freq.omega, v.tol);

    // Setwise estimate over the sampled (mod 2*pi) post-burn-in states.
    const std::size_t ib = burn_index(traj, burn);
    std::vector<std::vector<double>> cloud;
    cloud.reserve(traj.states.size() - ib);
    for (std::size_t i = ib; i < traj.states.size(); ++i) {
        std::vector<double> p(traj.states[i]);
        for (double& x : p) x = mod_2pi(x);
        cloud.push_back(std::move(p));
    }
    auto est = setwise_symmetry_estimate(gamma, cloud, setwise_tol, 1500);
    v.sigma_est = est.group;
    if (!est.ambiguous.empty())
        v.notes.push_back(std::to_string(est.ambiguous.size()) +
                          " element(s) in the ambiguous Hausdorff band (tol, 10 tol)");

    // Enforce the inclusion chain Sigma_est within Gamma_Omega; an element
    // accepted setwise but rejected on frequencies indicates tolerance
    // mismatch, is dropped, and is noted.
    std::vector<Permutation> chain;
    std::size_t dropped = 0;
    for (const auto& e : v.sigma_est.elements()) {
        if (v.gamma_omega.contains(e))
            chain.push_back(e);
        else
            ++dropped;
    }
    if (dropped > 0) {
        v.sigma_est = PermGroup::from_elements(gamma.degree(), std::move(chain), "Sigma_est");
        v.notes.push_back(std::to_string(dropped) +
                          " setwise element(s) dropped to preserve the inclusion chain");
    }

    // Instantaneous-frequency bands per population.
    const int pops = spec.mode == NetworkMode::product ? 2 : 1;
    v.bands.assign(static_cast<std::size_t>(pops),
                   {std::numeric_limits<double>::infinity(),
                    -std::numeric_limits<double>::infinity()});
    for (std::size_t i = ib; i < traj.states.size(); ++i) {
        const auto vel = field(spec, traj.states[i]);
        for (int p = 0; p < pops; ++p) {
            auto& band = v.bands[static_cast<std::size_t>(p)];
            for (int k = 0; k < spec.n; ++k) {
                const double y = vel[static_cast<std::size_t>(p * spec.n + k)];
                band.lo = std::min(band.lo, y);
                band.hi = std::max(band.hi, y);
            }
        }
    }
    v.bands_overlap = pops == 2 ? !(v.bands[0].hi < v.bands[1].lo || v.bands[1].hi < v.bands[0].lo)
                                : true;

    v.is_weak_chimera = v.gamma_omega.order() > 1 && v.gamma_omega.order() < gamma.order();
    v.notes.emplace_back("verdict is a numerical omega-limit proxy; chain recurrence assumed");
    if (v.freq.under_resolved)
        v.notes.emplace_back("frequency estimators disagree beyond 10x estimator_error");
    return v;
}

// --- JSON -----------------------------------------------------------------------------

nlohmann::json to_json(const FrequencyVector& f) {
    return {{"schema", "symosc.frequency/1"},
            {"omega", f.omega},
            {"omega_field_average", f.omega_field},
            {"horizon", f.horizon},
            {"burn_in", f.burn_in},
            {"estimator_error", f.estimator_error},
            {"under_resolved", f.under_resolved}};
}

nlohmann::json to_json(const SymmetryVerdict& v) {
    nlohmann::json bands = nlohmann::json::array();
    for (const auto& b : v.bands) bands.push_back({{"lo", b.lo}, {"hi", b.hi}});
    return {{"schema", "symosc.verdict/1"},
            {"ambient", v.gamma.summary()},
            {"gamma_omega", v.gamma_omega.summary()},
            {"theta", v.theta.summary()},
            {"sigma_est", v.sigma_est.summary()},
            {"is_weak_chimera", v.is_weak_chimera},
            {"frequency", to_json(v.freq)},
            {"frequency_tolerance", v.tol},
            {"setwise_tolerance", v.setwise_tol},
            {"bands", bands},
            {"bands_overlap", v.bands_overlap},
            {"notes", v.notes}};
}

}  // namespace symosc
