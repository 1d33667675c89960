#pragma once

#include <functional>
#include <vector>

namespace rydbench {

// Gauss-Hermite rule: integral of exp(-x^2) f(x) dx = sum w_i f(x_i),
// nodes ascending. Computed from the symmetric tridiagonal Jacobi matrix.
struct GaussHermite {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussHermite gauss_hermite(int n);

// E[f(theta)] for theta ~ Normal(mean, sigma), by Gauss-Hermite quadrature.
double gaussian_expectation(const std::function<double(double)>& f,
                            double mean, double sigma, int n_nodes = 64);

}  // namespace rydbench
