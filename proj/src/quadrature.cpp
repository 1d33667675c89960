#include "rydbench/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace rydbench {

GaussHermite gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");

    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        double b = std::sqrt(0.5 * k);
        jacobi(k, k - 1) = b;
        jacobi(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("gauss_hermite: eigensolver failed");

    const double mu0 = std::sqrt(M_PI);  // integral of exp(-x^2)
    GaussHermite out;
    out.nodes.resize(n);
    out.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        out.nodes[i] = es.eigenvalues()(i);
        double v0 = es.eigenvectors()(0, i);
        out.weights[i] = mu0 * v0 * v0;
    }
    return out;
}

double gaussian_expectation(const std::function<double(double)>& f,
                            double mean, double sigma, int n_nodes) {
    if (sigma < 0.0) throw std::invalid_argument("gaussian_expectation: sigma < 0");
    if (sigma == 0.0) return f(mean);
    GaussHermite gh = gauss_hermite(n_nodes);
    const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
    double acc = 0.0;
    for (int i = 0; i < n_nodes; ++i)
        acc += gh.weights[i] * f(mean + std::sqrt(2.0) * sigma * gh.nodes[i]);
    return acc * inv_sqrt_pi;
}

}  // namespace rydbench
