#pragma once

#include <complex>
#include <string>
#include <vector>

#include <json.hpp>

#include "symosc/coupling.hpp"
#include "symosc/permgroup.hpp"

namespace symosc {

/// Rigidly rotating solution phi_k(t) = alpha_k + t * omega_star of the fully
/// coupled population system, with alpha_1 = 0 and strictly increasing
/// offsets. `spectrum` is the eigenvalue set of the field Jacobian at alpha;
/// it always contains (numerically) zero from the phase-shift direction.
struct RelativeEquilibrium {
    std::vector<double> alpha;
    double omega_star = 0.0;
    double residual_norm = 0.0;
    std::vector<std::complex<double>> spectrum;
    int iterations = 0;

    int n() const { return static_cast<int>(alpha.size()); }
    /// All nonzero eigenvalues have real part < -1e-6 (the numerically
    /// checkable stand-in for "sufficiently stable").
    bool numerically_stable(double margin = 1e-6) const;
};

/// Defect of the rotating-wave condition, one entry per k = 2..n:
/// (1/n) sum_{j != k} (g(alpha_k - alpha_j) - g(-alpha_j)). Zero iff alpha
/// gives a relative equilibrium. Computed as Y_k(alpha) - Y_1(alpha).
std::vector<double> equilibrium_residual(const Coupling& g, const std::vector<double>& alpha);

/// Rotation rate Y_1(alpha) = (1/n) sum_j g(-alpha_j) (the j = 1 term is g(0)).
double drift_rate(const Coupling& g, const std::vector<double>& alpha);

/// Damped Newton on the free offsets alpha_2..alpha_n (alpha_1 pinned to 0).
/// Backtracks when the ordering 0 < alpha_2 < ... < alpha_n < 2*pi would
/// break. Throws std::runtime_error after max_iter iterations without
/// reaching `tol` in the max norm.
RelativeEquilibrium refine_equilibrium(const CouplingPtr& g, const std::vector<double>& alpha0,
                                       double tol = 1e-10, int max_iter = 100);

struct SymmetryCertificate {
    bool trivial = false;                // T = Sigma = {id}?
    std::string method;                  // "analytic" or "numeric"
    std::vector<Permutation> witnesses;  // nontrivial setwise symmetries found (numeric path)
};

/// Trivial-symmetry check for the rotating orbit {alpha + t omega_star}:
/// analytic when alpha_n < pi/2; otherwise falls back to a sampled setwise
/// symmetry estimate over one period of the orbit (or the point alpha itself
/// when omega_star = 0).
SymmetryCertificate trivial_symmetry_check(const CouplingPtr& g, const RelativeEquilibrium& eq,
                                           double tol = 1e-6);

nlohmann::json to_json(const RelativeEquilibrium& eq);

}  // namespace symosc
