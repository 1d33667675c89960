#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace rydbench {

struct MeanSem {
    double mean = 0.0;
    double sem = 0.0;
    int n = 0;
};
MeanSem mean_sem(const std::vector<double>& x);

// Ordinary least squares y ~ X beta with per-coefficient standard errors
// (residual-variance based) and the coefficient of determination.
struct LinearFit {
    Eigen::VectorXd beta;
    Eigen::VectorXd stderr_beta;
    double r_squared = 0.0;
    double residual_rms = 0.0;
};
LinearFit linear_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

// Polynomial fit of given degree; beta ordered constant-first.
LinearFit poly_fit(const std::vector<double>& x, const std::vector<double>& y,
                   int degree);

double r_squared(const std::vector<double>& y, const std::vector<double>& model);

// Nelder-Mead simplex minimizer. Returns the best vertex after convergence
// (simplex size below tol) or max_iter iterations.
struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};
SimplexResult minimize_simplex(const std::function<double(const std::vector<double>&)>& f,
                               std::vector<double> start,
                               std::vector<double> step,
                               double tol = 1e-10, int max_iter = 20000);

// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Upper-tail p-value of a chi-square statistic with dof degrees of freedom.
double chi_square_pvalue(double statistic, int dof);

// Pearson chi-square goodness-of-fit of observed counts against expected
// probabilities (cells with tiny expectation are pooled). Returns the p-value.
double chi_square_gof(const std::vector<long long>& counts,
                      const std::vector<double>& probs, double min_expected = 5.0);

}  // namespace rydbench
