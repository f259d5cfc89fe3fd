#pragma once

#include <vector>

#include <Eigen/Dense>

#include "symosc/coupling.hpp"

namespace symosc {

enum class NetworkMode { general, population, product };

/// Phase-oscillator network description. State vectors are continuous lifts
/// (real-valued, never reduced mod 2*pi); the reduction happens only inside
/// coupling evaluation, where it is harmless by periodicity.
///
/// Vector fields (k = 0..n-1, phases phi):
///   general:    dphi_k = omega + (1/n) sum_j H[k][j] g(phi_k - phi_j)
///   population: dphi_k = omega + (1/n) sum_j g(phi_k - phi_j)
///   product:    two populations of n with diffusive cross coupling of
///               strength epsilon (state dimension 2n).
/// All sums include j = k; the self term contributes g(0)/n.
struct NetworkSpec {
    NetworkMode mode = NetworkMode::population;
    int n = 4;                    // oscillators per population
    CouplingPtr g;
    double epsilon = 0.0;         // inter-population strength (product mode)
    double omega = 0.0;           // intrinsic frequency
    std::vector<double> adjacency;  // n*n row-major weights, general mode only

    int dim() const { return mode == NetworkMode::product ? 2 * n : n; }
    void validate() const;
};

/// dphi/dt at state x (lifted phases). Throws on dimension mismatch.
std::vector<double> field(const NetworkSpec& spec, const std::vector<double>& x);
void field_into(const NetworkSpec& spec, const double* x, double* out);

/// Exact Jacobian of the field; every row sums to zero.
Eigen::MatrixXd jacobian(const NetworkSpec& spec, const std::vector<double>& x);
void jacobian_into(const NetworkSpec& spec, const double* x, Eigen::MatrixXd& out);

/// The observable whose trajectory average is the angular frequency vector:
/// for the torus embedding z_k = exp(i phi_k) this is Im of the embedded
/// vector field, which equals the phase velocity.
std::vector<double> complex_frequency_observable(const NetworkSpec& spec,
                                                 const std::vector<double>& x);

}  // namespace symosc
