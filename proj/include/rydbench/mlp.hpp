#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace rydbench {

// Hidden-layer nonlinearity; all three are smooth and sigmoid-shaped, with
// derivatives expressible in the activation value itself.
enum class Activation { logistic, tanh_sig, softsign };

struct MlpSpec {
    std::vector<int> hidden_widths;  // one entry per hidden layer
    Activation activation = Activation::tanh_sig;
    double learning_rate = 1e-3;
    int batch_size = 64;
    double momentum = 0.9;
};

// Fully connected scalar regressor trained by mini-batch stochastic gradient
// descent with momentum on mean squared error. Everything is double
// precision and single threaded; given the same seed the whole training
// trajectory, and hence the final weights, are reproduced exactly.
class Mlp {
public:
    // Glorot-uniform initial weights drawn from the seed.
    Mlp(MlpSpec spec, int n_inputs, uint64_t seed);

    // Rows of x are samples.
    Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
    double predict_one(const Eigen::VectorXd& x) const;

    double rmse(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) const;

    // One shuffled pass over the training rows.
    void train_epoch(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

    // Train until the validation RMSE has not improved for `patience`
    // consecutive epochs (or max_epochs), then restore the best epoch's
    // weights. Returns the best validation RMSE.
    double fit(const Eigen::MatrixXd& x_train, const Eigen::VectorXd& y_train,
               const Eigen::MatrixXd& x_val, const Eigen::VectorXd& y_val,
               int patience, int max_epochs);

    const MlpSpec& spec() const { return spec_; }
    int n_inputs() const { return n_inputs_; }
    int n_parameters() const;

    // Weights and biases flattened layer by layer (column-major weights,
    // then bias), for persistence and for snapshotting the best epoch.
    Eigen::VectorXd parameters() const;
    void set_parameters(const Eigen::VectorXd& flat);

private:
    MlpSpec spec_;
    int n_inputs_ = 0;
    std::vector<Eigen::MatrixXd> w_;   // layer l: fan_in x fan_out
    std::vector<Eigen::VectorXd> b_;
    std::vector<Eigen::MatrixXd> vw_;  // momentum buffers
    std::vector<Eigen::VectorXd> vb_;
    std::mt19937_64 rng_;

    Eigen::MatrixXd activate(const Eigen::MatrixXd& z) const;
    Eigen::MatrixXd activate_derivative(const Eigen::MatrixXd& a) const;
};

}  // namespace rydbench
