#include "symosc/dynamics.hpp"

#include <stdexcept>

namespace symosc {

void NetworkSpec::validate() const {
    if (n < 1) throw std::invalid_argument("NetworkSpec: n must be >= 1");
    if (!g) throw std::invalid_argument("NetworkSpec: coupling not set");
    if (epsilon < 0) throw std::invalid_argument("NetworkSpec: epsilon must be >= 0");
    if (mode == NetworkMode::general &&
        adjacency.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
        throw std::invalid_argument("NetworkSpec: adjacency must be n*n");
    if (mode != NetworkMode::general && !adjacency.empty())
        throw std::invalid_argument("NetworkSpec: adjacency only valid in general mode");
}

void field_into(const NetworkSpec& spec, const double* x, double* out) {
    const int n = spec.n;
    const Coupling& g = *spec.g;
    const double inv_n = 1.0 / n;
    switch (spec.mode) {
        case NetworkMode::general: {
            for (int k = 0; k < n; ++k) {
                double acc = 0.0;
                const double* Hk = spec.adjacency.data() + static_cast<std::size_t>(k) * n;
                for (int j = 0; j < n; ++j) acc += Hk[j] * g.value(x[k] - x[j]);
                out[k] = spec.omega + inv_n * acc;
            }
            break;
        }
        case NetworkMode::population: {
            for (int k = 0; k < n; ++k) {
                double acc = 0.0;
                for (int j = 0; j < n; ++j) acc += g.value(x[k] - x[j]);
                out[k] = spec.omega + inv_n * acc;
            }
            break;
        }
        case NetworkMode::product: {
            const double* p1 = x;
            const double* p2 = x + n;
            for (int k = 0; k < n; ++k) {
                double own = 0.0, cross = 0.0;
                for (int j = 0; j < n; ++j) {
                    own += g.value(p1[k] - p1[j]);
                    cross += g.value(p1[k] - p2[j]);
                }
                out[k] = spec.omega + inv_n * (own + spec.epsilon * cross);
            }
            for (int k = 0; k < n; ++k) {
                double own = 0.0, cross = 0.0;
                for (int j = 0; j < n; ++j) {
                    own += g.value(p2[k] - p2[j]);
                    cross += g.value(p2[k] - p1[j]);
                }
                out[n + k] = spec.omega + inv_n * (own + spec.epsilon * cross);
            }
            break;
        }
    }
}

std::vector<double> field(const NetworkSpec& spec, const std::vector<double>& x) {
    spec.validate();
    if (static_cast<int>(x.size()) != spec.dim())
        throw std::invalid_argument("field: state dimension mismatch");
    std::vector<double> out(x.size());
    field_into(spec, x.data(), out.data());
    return out;
}

void jacobian_into(const NetworkSpec& spec, const double* x, Eigen::MatrixXd& J) {
    const int n = spec.n;
    const int d = spec.dim();
    const Coupling& g = *spec.g;
    const double inv_n = 1.0 / n;
    J.setZero(d, d);
    switch (spec.mode) {
        case NetworkMode::general: {
            for (int k = 0; k < n; ++k) {
                const double* Hk = spec.adjacency.data() + static_cast<std::size_t>(k) * n;
                double diag = 0.0;
                for (int j = 0; j < n; ++j) {
                    if (j == k) continue;  // d/dphi_k of g(phi_k - phi_k) is 0
                    const double gp = Hk[j] * g.deriv(x[k] - x[j]);
                    J(k, j) = -inv_n * gp;
                    diag += gp;
                }
                J(k, k) = inv_n * diag;
            }
            break;
        }
        case NetworkMode::population: {
            for (int k = 0; k < n; ++k) {
                double diag = 0.0;
                for (int j = 0; j < n; ++j) {
                    if (j == k) continue;
                    const double gp = g.deriv(x[k] - x[j]);
                    J(k, j) = -inv_n * gp;
                    diag += gp;
                }
                J(k, k) = inv_n * diag;
            }
            break;
        }
        case NetworkMode::product: {
            const double eps = spec.epsilon;
            for (int block = 0; block < 2; ++block) {
                const int off = block * n;        // own population offset
                const int oth = (1 - block) * n;  // other population offset
                for (int k = 0; k < n; ++k) {
                    double diag = 0.0;
                    for (int j = 0; j < n; ++j) {
                        if (j != k) {
                            const double gp = g.deriv(x[off + k] - x[off + j]);
                            J(off + k, off + j) = -inv_n * gp;
                            diag += gp;
                        }
                        const double gx = eps * g.deriv(x[off + k] - x[oth + j]);
                        J(off + k, oth + j) = -inv_n * gx;
                        diag += gx;
                    }
                    J(off + k, off + k) = inv_n * diag;
                }
            }
            break;
        }
    }
}

Eigen::MatrixXd jacobian(const NetworkSpec& spec, const std::vector<double>& x) {
    spec.validate();
    if (static_cast<int>(x.size()) != spec.dim())
        throw std::invalid_argument("jacobian: state dimension mismatch");
    Eigen::MatrixXd J;
    jacobian_into(spec, x.data(), J);
    return J;
}

std::vector<double> complex_frequency_observable(const NetworkSpec& spec,
                                                 const std::vector<double>& x) {
    // Im(F_k) for the embedding dz_k = z_k (i Y_k(phi)) is Y_k itself.
    return field(spec, x);
}

}  // namespace symosc
