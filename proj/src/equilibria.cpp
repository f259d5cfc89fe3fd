#include "symosc/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "symosc/dynamics.hpp"

namespace symosc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::vector<double> population_field(const Coupling& g, const std::vector<double>& alpha) {
    const std::size_t n = alpha.size();
    std::vector<double> y(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += g.value(alpha[k] - alpha[j]);
        y[k] = acc / static_cast<double>(n);
    }
    return y;
}

void check_ordering(const std::vector<double>& alpha) {
    if (alpha.empty() || alpha.front() != 0.0)
        throw std::invalid_argument("equilibria: alpha_1 must be 0");
    for (std::size_t k = 1; k < alpha.size(); ++k)
        if (!(alpha[k] > alpha[k - 1]) || !(alpha[k] < kTwoPi))
            throw std::invalid_argument("equilibria: offsets must satisfy 0 < a_2 < ... < a_n < 2*pi");
}

bool ordered(const std::vector<double>& alpha) {
    for (std::size_t k = 1; k < alpha.size(); ++k)
        if (!(alpha[k] > alpha[k - 1]) || !(alpha[k] < kTwoPi)) return false;
    return true;
}

}  // namespace

bool RelativeEquilibrium::numerically_stable(double margin) const {
    // The eigenvalue closest to zero is the neutral phase-shift direction.
    std::size_t zero_idx = 0;
    double zero_mag = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        if (std::abs(spectrum[i]) < zero_mag) {
            zero_mag = std::abs(spectrum[i]);
            zero_idx = i;
        }
    }
    for (std::size_t i = 0; i < spectrum.size(); ++i)
        if (i != zero_idx && !(spectrum[i].real() < -margin)) return false;
    return true;
}

std::vector<double> equilibrium_residual(const Coupling& g, const std::vector<double>& alpha) {
    check_ordering(alpha);
    const auto y = population_field(g, alpha);
    std::vector<double> r(alpha.size() - 1);
    for (std::size_t k = 1; k < alpha.size(); ++k) r[k - 1] = y[k] - y[0];
    return r;
}

double drift_rate(const Coupling& g, const std::vector<double>& alpha) {
    check_ordering(alpha);
    return population_field(g, alpha)[0];
}

RelativeEquilibrium refine_equilibrium(const CouplingPtr& g, const std::vector<double>& alpha0,
                                       double tol, int max_iter) {
    check_ordering(alpha0);
    const int n = static_cast<int>(alpha0.size());
    if (n < 2) throw std::invalid_argument("refine_equilibrium: need n >= 2");

    NetworkSpec spec;
    spec.mode = NetworkMode::population;
    spec.n = n;
    spec.g = g;

    auto residual_of = [&](const std::vector<double>& a) {
        const auto y = population_field(*g, a);
        Eigen::VectorXd r(n - 1);
        for (int k = 1; k < n; ++k) r(k - 1) = y[static_cast<std::size_t>(k)] - y[0];
        return r;
    };
    auto max_norm = [](const Eigen::VectorXd& r) { return r.cwiseAbs().maxCoeff(); };

    std::vector<double> alpha = alpha0;
    Eigen::VectorXd r = residual_of(alpha);
    int it = 0;
    while (max_norm(r) > tol) {
        if (++it > max_iter)
            throw std::runtime_error("refine_equilibrium: no convergence in " +
                                     std::to_string(max_iter) + " iterations");
        // Jacobian of the residual in the free offsets: difference of rows of
        // the field Jacobian, columns 2..n.
        const Eigen::MatrixXd J = jacobian(spec, alpha);
        Eigen::MatrixXd A(n - 1, n - 1);
        for (int k = 1; k < n; ++k)
            for (int m = 1; m < n; ++m) A(k - 1, m - 1) = J(k, m) - J(0, m);
        const Eigen::VectorXd step = A.fullPivLu().solve(-r);

        // Backtracking line search; reject steps that break the ordering.
        double lambda = 1.0;
        bool moved = false;
        for (int bt = 0; bt < 40; ++bt, lambda *= 0.5) {
            std::vector<double> trial = alpha;
            for (int k = 1; k < n; ++k)
                trial[static_cast<std::size_t>(k)] += lambda * step(k - 1);
            if (!ordered(trial)) continue;
            const Eigen::VectorXd rt = residual_of(trial);
            if (max_norm(rt) < max_norm(r)) {
                alpha = std::move(trial);
                r = rt;
                moved = true;
                break;
            }
        }
        if (!moved)
            throw std::runtime_error(
                "refine_equilibrium: line search stalled (ordering constraint or local minimum)");
    }

    RelativeEquilibrium eq;
    eq.alpha = alpha;
    eq.omega_star = population_field(*g, alpha)[0];
    eq.residual_norm = max_norm(r);
    eq.iterations = it;
    const Eigen::MatrixXd J = jacobian(spec, alpha);
    Eigen::EigenSolver<Eigen::MatrixXd> es(J);
    for (int i = 0; i < n; ++i) eq.spectrum.push_back(es.eigenvalues()(i));
    std::sort(eq.spectrum.begin(), eq.spectrum.end(),
              [](const std::complex<double>& a, const std::complex<double>& b) {
                  return a.real() < b.real();
              });
    return eq;
}

SymmetryCertificate trivial_symmetry_check(const CouplingPtr& g, const RelativeEquilibrium& eq,
                                           double tol) {
    (void)g;
    SymmetryCertificate cert;
    const int n = eq.n();
    if (eq.alpha.back() < kTwoPi / 4.0) {
        // alpha_n < pi/2: no nontrivial permutation can map the rotating orbit
        // to itself.
        cert.trivial = true;
        cert.method = "analytic";
        return cert;
    }
    cert.method = "numeric";
    // Sample the closure of the orbit {alpha + s (1,..,1) : s in [0, 2*pi)}
    // and estimate its setwise symmetries. For omega_star = 0 the orbit is the
    // single point alpha.
    std::vector<std::vector<double>> cloud;
    if (eq.omega_star == 0.0) {
        cloud.push_back(eq.alpha);
    } else {
        const int samples = 720;
        for (int i = 0; i < samples; ++i) {
            std::vector<double> p = eq.alpha;
            const double s = kTwoPi * i / samples;
            for (double& x : p) x += s;
            cloud.push_back(std::move(p));
        }
    }
    const auto sn = make_group(GroupKind::symmetric, n);
    // The sampling grid spacing bounds the Hausdorff error for true
    // symmetries; tol below grid spacing would reject them.
    const double grid = eq.omega_star == 0.0 ? 0.0 : kTwoPi / 720.0;
    auto est = setwise_symmetry_estimate(sn, cloud, std::max(tol, grid));
    for (const auto& e : est.group.elements())
        if (!e.is_identity()) cert.witnesses.push_back(e);
    cert.trivial = cert.witnesses.empty();
    return cert;
}

nlohmann::json to_json(const RelativeEquilibrium& eq) {
    nlohmann::json spec = nlohmann::json::array();
    for (const auto& ev : eq.spectrum) spec.push_back({{"re", ev.real()}, {"im", ev.imag()}});
    return {{"schema", "symosc.equilibrium/1"},
            {"alpha", eq.alpha},
            {"omega_star", eq.omega_star},
            {"residual", eq.residual_norm},
            {"iterations", eq.iterations},
            {"eigenvalues", spec},
            {"numerically_stable", eq.numerically_stable()}};
}

}  // namespace symosc
