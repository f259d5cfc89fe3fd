#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "symosc/dynamics.hpp"

namespace symosc {

struct IntegratorConfig {
    double rtol = 1e-9;
    double atol = 1e-11;
    double max_step = 0.1;
    double record_dt = 0.5;    // output sampling interval
    double renorm_dt = 1.0;    // tangent renormalization interval
    bool lift_guard = true;    // reject steps whose per-coordinate change reaches pi
    void validate() const;
};

struct IntegrationStats {
    long steps = 0;
    long rejected = 0;
    long lift_reductions = 0;
    double max_step_used = 0.0;
};

/// Time grid plus lifted (unwrapped) states. `states[i]` is the state at
/// `times[i]`; the grid is strictly increasing and always contains 0 and T.
struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    std::vector<double> final_state;
    IntegrationStats stats;

    int dim() const { return states.empty() ? 0 : static_cast<int>(states.front().size()); }
    double horizon() const { return times.empty() ? 0.0 : times.back(); }
};

/// Running maximal-Lyapunov-exponent estimate from tangent renormalizations:
/// lambda(t) = (sum of log growth factors up to t) / t.
struct LyapunovEstimate {
    std::vector<double> times;       // renormalization times
    std::vector<double> running;     // estimate after each renormalization
    std::vector<double> log_growth;  // per-interval log norms
    double final_value = 0.0;
    double horizon = 0.0;
};

class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double t)
        : std::runtime_error(what + " at t = " + std::to_string(t)), time(t) {}
    double time;
};

/// Right-hand side over a raw state pointer; dimension is passed alongside.
using RhsFn = std::function<void(double t, const double* x, double* dxdt)>;
/// Jacobian at a state, written into the provided matrix.
using JacFn = std::function<void(const double* x, Eigen::MatrixXd& J)>;

/// Adaptive Dormand-Prince 5(4) with PI step-size control. Steps are clipped
/// so record times are hit exactly; the step size never exceeds max_step.
/// Throws IntegrationError on step-size underflow.
Trajectory integrate_rhs(const RhsFn& rhs, int dim, const std::vector<double>& x0, double T,
                         const IntegratorConfig& cfg);
Trajectory integrate(const NetworkSpec& spec, const std::vector<double>& x0, double T,
                     const IntegratorConfig& cfg);

/// Co-integrates the variational equation dv/dt = J(x(t)) v with tangent
/// renormalization every renorm_dt. v0 must be nonzero.
std::pair<Trajectory, LyapunovEstimate> integrate_with_tangent_rhs(
    const RhsFn& rhs, const JacFn& jac, int dim, const std::vector<double>& x0,
    const std::vector<double>& v0, double T, const IntegratorConfig& cfg);
std::pair<Trajectory, LyapunovEstimate> integrate_with_tangent(
    const NetworkSpec& spec, const std::vector<double>& x0, const std::vector<double>& v0,
    double T, const IntegratorConfig& cfg);

}  // namespace symosc
