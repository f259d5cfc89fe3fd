#include "symosc/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace symosc {

void IntegratorConfig::validate() const {
    if (!(rtol > 0) || !(atol > 0))
        throw std::invalid_argument("IntegratorConfig: tolerances must be positive");
    if (!(max_step > 0)) throw std::invalid_argument("IntegratorConfig: max_step must be positive");
    if (!(record_dt > 0) || !(renorm_dt > 0))
        throw std::invalid_argument("IntegratorConfig: sampling intervals must be positive");
}

namespace {

constexpr double kPi = 3.14159265358979323846;

// Dormand-Prince 5(4) tableau (Hairer-Norsett-Wanner DOPRI5). The 5th-order
// weights are row a7*, making the scheme FSAL.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
// Difference between the 5th- and 4th-order weights, for the error estimate.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

// PI step-size controller constants (Hairer's dopri5).
constexpr double kSafe = 0.9, kBeta = 0.04, kExpo1 = 0.2 - kBeta * 0.75;
constexpr double kFacMin = 0.2, kFacMax = 10.0;

struct StepWorkspace {
    std::vector<double> k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, yerr;
    explicit StepWorkspace(std::size_t d)
        : k1(d), k2(d), k3(d), k4(d), k5(d), k6(d), k7(d), ytmp(d), ynew(d), yerr(d) {}
};

double error_norm(const std::vector<double>& y, const std::vector<double>& ynew,
                  const std::vector<double>& yerr, double atol, double rtol) {
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        const double q = yerr[i] / sc;
        acc += q * q;
    }
    return std::sqrt(acc / static_cast<double>(y.size()));
}

double initial_step(const RhsFn& rhs, int dim, const std::vector<double>& y0,
                    const std::vector<double>& f0, const IntegratorConfig& cfg) {
    double dy = 0.0, df = 0.0;
    for (int i = 0; i < dim; ++i) {
        const double sc = cfg.atol + cfg.rtol * std::abs(y0[static_cast<std::size_t>(i)]);
        dy += std::pow(y0[static_cast<std::size_t>(i)] / sc, 2);
        df += std::pow(f0[static_cast<std::size_t>(i)] / sc, 2);
    }
    (void)rhs;
    double h = (dy < 1e-10 || df < 1e-10) ? 1e-6 : 0.01 * std::sqrt(dy / df);
    return std::min(h, cfg.max_step);
}

struct DriverResult {
    Trajectory traj;
    LyapunovEstimate lyap;
};

// Shared adaptive driver. `state_dim` is the physical state size; the tail of
// the vector (if any) is the tangent, renormalized at renorm_dt boundaries.
DriverResult drive(const RhsFn& rhs, int total_dim, int state_dim, std::vector<double> y,
                   double T, const IntegratorConfig& cfg, bool with_tangent) {
    cfg.validate();
    if (!(T > 0)) throw std::invalid_argument("integrate: horizon must be positive");

    DriverResult out;
    Trajectory& traj = out.traj;
    LyapunovEstimate& lyap = out.lyap;
    lyap.horizon = T;

    const auto d = static_cast<std::size_t>(total_dim);
    const auto sd = static_cast<std::size_t>(state_dim);
    StepWorkspace w(d);

    double t = 0.0;
    traj.times.push_back(0.0);
    traj.states.emplace_back(y.begin(), y.begin() + static_cast<long>(sd));

    rhs(t, y.data(), w.k1.data());
    double h = initial_step(rhs, total_dim, y, w.k1, cfg);
    double facold = 1e-4;
    double sum_logs = 0.0;
    bool lift_warned = false;

    long next_record = 1;
    long next_renorm = 1;

    auto tangent_norm = [&]() {
        double s = 0.0;
        for (std::size_t i = sd; i < d; ++i) s += y[i] * y[i];
        return std::sqrt(s);
    };

    while (t < T) {
        // Clip the step to the next record/renorm boundary so those times are
        // hit exactly.
        double boundary = T;
        const double t_rec = static_cast<double>(next_record) * cfg.record_dt;
        boundary = std::min(boundary, t_rec);
        double t_ren = std::numeric_limits<double>::infinity();
        if (with_tangent) {
            t_ren = static_cast<double>(next_renorm) * cfg.renorm_dt;
            boundary = std::min(boundary, t_ren);
        }
        bool hit = false;
        h = std::min(h, cfg.max_step);
        if (t + 1.01 * h >= boundary) {
            // Stretch slightly onto the boundary instead of leaving a sliver
            // step behind, staying under max_step.
            const double hb = boundary - t;
            if (hb <= cfg.max_step * (1.0 + 1e-12)) {
                h = hb;
                hit = true;
            } else {
                h = cfg.max_step;
            }
        }
        if (h < 1e-14 * std::max(1.0, std::abs(t))) {
#ifdef SYMOSC_STEP_DEBUG
            std::fprintf(stderr, "[underflow] t=%.17g h=%.3e boundary=%.17g t_rec=%.17g next_record=%ld hit=%d\n",
                         t, h, boundary, t_rec, next_record, (int)hit);
#endif
            throw IntegrationError("integrate: step size underflow", t);
        }

        // Stages.
        for (std::size_t i = 0; i < d; ++i) w.ytmp[i] = y[i] + h * a21 * w.k1[i];
        rhs(t + c2 * h, w.ytmp.data(), w.k2.data());
        for (std::size_t i = 0; i < d; ++i)
            w.ytmp[i] = y[i] + h * (a31 * w.k1[i] + a32 * w.k2[i]);
        rhs(t + c3 * h, w.ytmp.data(), w.k3.data());
        for (std::size_t i = 0; i < d; ++i)
            w.ytmp[i] = y[i] + h * (a41 * w.k1[i] + a42 * w.k2[i] + a43 * w.k3[i]);
        rhs(t + c4 * h, w.ytmp.data(), w.k4.data());
        for (std::size_t i = 0; i < d; ++i)
            w.ytmp[i] =
                y[i] + h * (a51 * w.k1[i] + a52 * w.k2[i] + a53 * w.k3[i] + a54 * w.k4[i]);
        rhs(t + c5 * h, w.ytmp.data(), w.k5.data());
        for (std::size_t i = 0; i < d; ++i)
            w.ytmp[i] = y[i] + h * (a61 * w.k1[i] + a62 * w.k2[i] + a63 * w.k3[i] +
                                    a64 * w.k4[i] + a65 * w.k5[i]);
        rhs(t + h, w.ytmp.data(), w.k6.data());
        for (std::size_t i = 0; i < d; ++i)
            w.ynew[i] = y[i] + h * (a71 * w.k1[i] + a73 * w.k3[i] + a74 * w.k4[i] +
                                    a75 * w.k5[i] + a76 * w.k6[i]);
        rhs(t + h, w.ynew.data(), w.k7.data());
        for (std::size_t i = 0; i < d; ++i)
            w.yerr[i] = h * (e1 * w.k1[i] + e3 * w.k3[i] + e4 * w.k4[i] + e5 * w.k5[i] +
                             e6 * w.k6[i] + e7 * w.k7[i]);

        const double err = error_norm(y, w.ynew, w.yerr, cfg.atol, cfg.rtol);
        if (err > 1.0) {
            ++traj.stats.rejected;
            const double fac11 = std::pow(err, kExpo1);
            h /= std::min(1.0 / kFacMin, fac11 / kSafe);
            continue;
        }

        if (cfg.lift_guard) {
            double dmax = 0.0;
            for (std::size_t i = 0; i < sd; ++i)
                dmax = std::max(dmax, std::abs(w.ynew[i] - y[i]));
            if (dmax >= kPi) {
                if (!lift_warned) {
                    std::fprintf(stderr,
                                 "integrate: phase change %.3f >= pi in one step at t=%.6g; "
                                 "reducing step\n",
                                 dmax, t);
                    lift_warned = true;
                }
                ++traj.stats.lift_reductions;
                h *= 0.5;
                continue;
            }
        }

        // Accept.
        ++traj.stats.steps;
        traj.stats.max_step_used = std::max(traj.stats.max_step_used, h);
        t = hit ? boundary : t + h;
        y.swap(w.ynew);
        w.k1.swap(w.k7);  // FSAL
        bool need_rhs_refresh = false;

        if (with_tangent && hit && boundary == t_ren) {
            const double norm = tangent_norm();
            if (!(norm > 0)) throw IntegrationError("integrate: tangent vector collapsed", t);
            sum_logs += std::log(norm);
            for (std::size_t i = sd; i < d; ++i) y[i] /= norm;
            lyap.times.push_back(t);
            lyap.log_growth.push_back(std::log(norm));
            lyap.running.push_back(sum_logs / t);
            ++next_renorm;
            need_rhs_refresh = true;  // FSAL cache is stale after rescaling
        }
        if (hit && boundary == t_rec) {
            traj.times.push_back(t);
            traj.states.emplace_back(y.begin(), y.begin() + static_cast<long>(sd));
            ++next_record;
        } else if (hit && boundary == T && t >= T) {
            traj.times.push_back(t);
            traj.states.emplace_back(y.begin(), y.begin() + static_cast<long>(sd));
        }
        if (need_rhs_refresh) rhs(t, y.data(), w.k1.data());

        const double fac11 = std::pow(std::max(err, 1e-30), kExpo1);
        double fac = fac11 / std::pow(facold, kBeta);
        fac = std::max(1.0 / kFacMax, std::min(1.0 / kFacMin, fac / kSafe));
        h = h / fac;
        facold = std::max(err, 1e-4);
    }

    traj.final_state.assign(y.begin(), y.begin() + static_cast<long>(sd));
    if (with_tangent) {
        const double norm = tangent_norm();
        double total = sum_logs;
        if (norm > 0 && std::abs(norm - 1.0) > 0) total += std::log(norm);
        lyap.final_value = total / T;
    }
    return out;
}

}  // namespace

Trajectory integrate_rhs(const RhsFn& rhs, int dim, const std::vector<double>& x0, double T,
                         const IntegratorConfig& cfg) {
    if (static_cast<int>(x0.size()) != dim)
        throw std::invalid_argument("integrate_rhs: x0 dimension mismatch");
    return drive(rhs, dim, dim, x0, T, cfg, false).traj;
}

Trajectory integrate(const NetworkSpec& spec, const std::vector<double>& x0, double T,
                     const IntegratorConfig& cfg) {
    spec.validate();
    if (static_cast<int>(x0.size()) != spec.dim())
        throw std::invalid_argument("integrate: x0 dimension mismatch");
    auto rhs = [&spec](double, const double* x, double* dx) { field_into(spec, x, dx); };
    return drive(rhs, spec.dim(), spec.dim(), x0, T, cfg, false).traj;
}

std::pair<Trajectory, LyapunovEstimate> integrate_with_tangent_rhs(
    const RhsFn& rhs, const JacFn& jac, int dim, const std::vector<double>& x0,
    const std::vector<double>& v0, double T, const IntegratorConfig& cfg) {
    if (static_cast<int>(x0.size()) != dim || static_cast<int>(v0.size()) != dim)
        throw std::invalid_argument("integrate_with_tangent: dimension mismatch");
    double vnorm = 0.0;
    for (double v : v0) vnorm += v * v;
    if (!(vnorm > 0)) throw std::invalid_argument("integrate_with_tangent: v0 must be nonzero");

    Eigen::MatrixXd J;
    auto rhs_aug = [&rhs, &jac, &J, dim](double t, const double* x, double* dx) {
        rhs(t, x, dx);
        jac(x, J);
        Eigen::Map<const Eigen::VectorXd> v(x + dim, dim);
        Eigen::Map<Eigen::VectorXd> dv(dx + dim, dim);
        dv.noalias() = J * v;
    };
    std::vector<double> y0(x0);
    y0.insert(y0.end(), v0.begin(), v0.end());
    auto res = drive(rhs_aug, 2 * dim, dim, std::move(y0), T, cfg, true);
    return {std::move(res.traj), std::move(res.lyap)};
}

std::pair<Trajectory, LyapunovEstimate> integrate_with_tangent(
    const NetworkSpec& spec, const std::vector<double>& x0, const std::vector<double>& v0,
    double T, const IntegratorConfig& cfg) {
    spec.validate();
    auto rhs = [&spec](double, const double* x, double* dx) { field_into(spec, x, dx); };
    auto jac = [&spec](const double* x, Eigen::MatrixXd& J) { jacobian_into(spec, x, J); };
    return integrate_with_tangent_rhs(rhs, jac, spec.dim(), x0, v0, T, cfg);
}

}  // namespace symosc
