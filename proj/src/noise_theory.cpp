#include "rydbench/noise_theory.hpp"

#include <cmath>
#include <stdexcept>

#include "rydbench/fit.hpp"

namespace rydbench {

void DecayModel::validate() const {
    if (lambda < 0.0 || sigma < 0.0 || gamma < 0.0) {
        throw std::invalid_argument("DecayModel: lambda, sigma, gamma must be nonnegative");
    }
}

double gaussian_fidelity(double theta1, double theta2, int n_sites, double lambda, double t) {
    if (n_sites < 1) throw std::invalid_argument("gaussian_fidelity: n_sites must be positive");
    if (lambda < 0.0) throw std::invalid_argument("gaussian_fidelity: lambda must be nonnegative");
    double d = theta1 - theta2;
    return std::exp(-0.5 * n_sites * lambda * d * d * t * t);
}

double nonexp_decay(double lambda_big, double delta) {
    if (lambda_big < 0.0) throw std::invalid_argument("nonexp_decay: Lambda must be nonnegative");
    return std::exp(-0.5 * delta * delta * lambda_big / (1.0 + lambda_big)) /
           std::sqrt(1.0 + lambda_big);
}

double effective_decay(const DecayModel& m, double t) {
    m.validate();
    return m.f0 * std::exp(-m.gamma * t) * nonexp_decay(m.lambda_prime * t * t, m.delta);
}

namespace {

// p = {f0, gamma, lambda_prime, delta}; negative rates are admitted during
// the search but pushed back by a quadratic penalty.
double decay_eval(const std::vector<double>& p, double t) {
    double lp = std::max(p[2], 0.0);
    double lt2 = lp * t * t;
    return p[0] * std::exp(-std::max(p[1], 0.0) * t) *
           std::exp(-0.5 * p[3] * p[3] * lt2 / (1.0 + lt2)) / std::sqrt(1.0 + lt2);
}

double decay_ssr(const std::vector<double>& p,
                 const std::vector<std::pair<double, double>>& curve) {
    double ss = 0.0;
    for (const auto& [t, f] : curve) {
        double r = decay_eval(p, t) - f;
        ss += r * r;
    }
    double pen = 0.0;
    for (int i : {1, 2}) {
        if (p[i] < 0.0) pen += 1e3 * p[i] * p[i];
    }
    if (p[0] <= 0.0) pen += 1e3 * (p[0] - 1e-3) * (p[0] - 1e-3);
    return ss + pen;
}

}  // namespace

DecayFitResult fit_effective_decay(const std::vector<std::pair<double, double>>& curve) {
    if (curve.size() < 5) {
        throw std::invalid_argument("fit_effective_decay: need at least 5 points");
    }
    for (const auto& [t, f] : curve) {
        if (f <= 0.0 || f > 1.0 + 1e-9) {
            throw std::invalid_argument("fit_effective_decay: fidelities must lie in (0, 1]");
        }
    }

    // Seed gamma from the log-slope and f0 from the log-intercept; the
    // curvature split between gamma and lambda' is left to the optimizer.
    std::vector<double> ts, lnf;
    for (const auto& [t, f] : curve) {
        ts.push_back(t);
        lnf.push_back(std::log(f));
    }
    LinearFit lf = poly_fit(ts, lnf, 1);
    double f0_init = std::min(std::exp(lf.beta(0)), 1.0);
    double gamma_init = std::max(-lf.beta(1), 0.0);
    double t_mid = ts[ts.size() / 2];
    double lp_init = t_mid > 0.0 ? 0.5 * gamma_init / t_mid : 0.01;

    auto objective = [&](const std::vector<double>& p) { return decay_ssr(p, curve); };

    std::vector<double> best;
    double best_val = 0.0;
    bool have_best = false;
    int iterations = 0;
    bool converged = false;
    for (double split : {0.0, 0.5, 1.0}) {
        // split = share of the observed log-slope attributed to lambda' at t_mid
        std::vector<double> start = {f0_init, gamma_init * (1.0 - split),
                                     std::max(lp_init * split * 2.0, 1e-4), 0.0};
        std::vector<double> step = {0.05, std::max(0.3 * gamma_init, 0.01),
                                    std::max(lp_init, 1e-3), 0.3};
        SimplexResult r = minimize_simplex(objective, start, step, 1e-16, 30000);
        iterations += r.iterations;
        if (!have_best || r.value < best_val) {
            best_val = r.value;
            best = r.x;
            converged = r.converged;
            have_best = true;
        }
    }

    DecayFitResult out;
    out.model.f0 = std::max(best[0], 0.0);
    out.model.gamma = std::max(best[1], 0.0);
    out.model.lambda_prime = std::max(best[2], 0.0);
    out.model.delta = std::abs(best[3]);
    out.iterations = iterations;
    out.converged = converged;

    size_t n = curve.size();
    double ssr = 0.0;
    for (const auto& [t, f] : curve) {
        double r = decay_eval(best, t) - f;
        ssr += r * r;
    }
    out.residual_rms = std::sqrt(ssr / n);

    // Forward-difference Jacobian at the optimum.
    Eigen::MatrixXd jac(n, 4);
    for (int j = 0; j < 4; ++j) {
        double h = std::max(1e-6, 1e-6 * std::abs(best[j]));
        std::vector<double> pp = best;
        pp[j] += h;
        for (size_t i = 0; i < n; ++i) {
            jac(i, j) = (decay_eval(pp, curve[i].first) - decay_eval(best, curve[i].first)) / h;
        }
    }
    double dof = n > 4 ? static_cast<double>(n - 4) : 1.0;
    Eigen::Matrix4d jtj = jac.transpose() * jac;
    out.covariance = (ssr / dof) * jtj.completeOrthogonalDecomposition().pseudoInverse();
    for (int j = 0; j < 4; ++j) {
        out.stderr_params(j) = std::sqrt(std::max(out.covariance(j, j), 0.0));
    }

    if (!converged && out.residual_rms > 0.05) {
        throw std::runtime_error("fit_effective_decay: did not converge (residual RMS " +
                                 std::to_string(out.residual_rms) + " after " +
                                 std::to_string(iterations) + " iterations)");
    }
    return out;
}

double commutator_norm(const Matrix& rho, const Vector& psi) {
    if (rho.rows() != rho.cols() || rho.rows() != psi.size()) {
        throw std::invalid_argument("commutator_norm: dimension mismatch");
    }
    Vector rp = rho * psi;
    double second = (psi.adjoint() * rho * rp)(0).real();
    double first = rp.dot(psi).real();  // <psi|rho|psi>
    double c2 = 2.0 * second - 2.0 * first * first;
    return std::sqrt(std::max(c2, 0.0));
}

}  // namespace rydbench
