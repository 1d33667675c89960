#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rydbench/tensor3.hpp"

namespace rydbench {

// Fidelity decay under globally correlated Hamiltonian parameter noise.
//
// For a quench under H0 + theta*V with V a sum of local terms, the overlap of
// two evolutions is Gaussian in (theta1 - theta2)*t with a per-site constant
// lambda. Averaging theta over a Gaussian shot-to-shot distribution of width
// sigma and miscalibration delta = (theta' - theta0)/sigma turns that
// response into a characteristic non-exponential decay law, which we also
// dress with a plain exponential to absorb the remaining (Markovian) noise.

struct DecayModel {
    double lambda = 0.0;        // per-site Gaussian-response constant
    double sigma = 0.0;         // shot-to-shot parameter spread
    double delta = 0.0;         // relative miscalibration (theta'-theta0)/sigma
    double gamma = 0.0;         // Markovian rate per cycle
    double f0 = 1.0;            // preparation prefactor
    double lambda_prime = 0.0;  // lambda * N * sigma^2

    void validate() const;  // lambda, sigma, gamma must be nonnegative
};

// exp(-N lambda (theta1-theta2)^2 t^2 / 2)
double gaussian_fidelity(double theta1, double theta2, int n_sites, double lambda, double t);

// (1+Lambda)^{-1/2} exp(-delta^2 Lambda / (2(1+Lambda))) with Lambda = N t^2 lambda sigma^2
double nonexp_decay(double lambda_big, double delta);

// F0 exp(-gamma t) * nonexp_decay(lambda_prime t^2, delta)
double effective_decay(const DecayModel& m, double t);

// Least squares of effective_decay over (f0, gamma, lambda_prime, delta).
// Covariance is residual-variance scaled (J^T J)^{-1} at the optimum; the
// delta column degenerates when lambda_prime -> 0, which simply shows up as
// a large standard error.
struct DecayFitResult {
    DecayModel model;
    double residual_rms = 0.0;
    Eigen::Matrix4d covariance;          // order: f0, gamma, lambda_prime, delta
    Eigen::Vector4d stderr_params;
    bool converged = false;
    int iterations = 0;
};
DecayFitResult fit_effective_decay(const std::vector<std::pair<double, double>>& curve);

// || [rho, |psi><psi|] ||_F by the moment formula
//     C^2 = 2 <psi|rho^2|psi> - 2 <psi|rho|psi>^2.
double commutator_norm(const Matrix& rho, const Vector& psi);

}  // namespace rydbench
