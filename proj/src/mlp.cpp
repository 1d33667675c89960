#include "rydbench/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rydbench {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Mlp::Mlp(MlpSpec spec, int n_inputs, uint64_t seed)
    : spec_(std::move(spec)), n_inputs_(n_inputs), rng_(seed) {
    if (n_inputs < 1) throw std::invalid_argument("Mlp: need at least one input");
    if (spec_.hidden_widths.empty())
        throw std::invalid_argument("Mlp: need at least one hidden layer");
    for (int w : spec_.hidden_widths)
        if (w < 1) throw std::invalid_argument("Mlp: nonpositive layer width");
    if (spec_.learning_rate <= 0)
        throw std::invalid_argument("Mlp: learning rate must be positive");
    if (spec_.batch_size < 1)
        throw std::invalid_argument("Mlp: batch size must be positive");

    std::vector<int> widths;
    widths.push_back(n_inputs_);
    widths.insert(widths.end(), spec_.hidden_widths.begin(),
                  spec_.hidden_widths.end());
    widths.push_back(1);

    for (size_t l = 0; l + 1 < widths.size(); ++l) {
        const int fan_in = widths[l], fan_out = widths[l + 1];
        const double r = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> u(-r, r);
        MatrixXd w(fan_in, fan_out);
        for (int i = 0; i < fan_in; ++i)
            for (int j = 0; j < fan_out; ++j) w(i, j) = u(rng_);
        w_.push_back(std::move(w));
        b_.push_back(VectorXd::Zero(fan_out));
        vw_.push_back(MatrixXd::Zero(fan_in, fan_out));
        vb_.push_back(VectorXd::Zero(fan_out));
    }
}

MatrixXd Mlp::activate(const MatrixXd& z) const {
    switch (spec_.activation) {
        case Activation::logistic:
            return (1.0 + (-z.array()).exp()).inverse().matrix();
        case Activation::tanh_sig:
            return z.array().tanh().matrix();
        case Activation::softsign:
            return (z.array() / (1.0 + z.array().abs())).matrix();
    }
    throw std::logic_error("unreachable");
}

// Derivative written in terms of the activation value a:
// logistic a(1-a); tanh 1-a^2; softsign (1-|a|)^2.
MatrixXd Mlp::activate_derivative(const MatrixXd& a) const {
    switch (spec_.activation) {
        case Activation::logistic:
            return (a.array() * (1.0 - a.array())).matrix();
        case Activation::tanh_sig:
            return (1.0 - a.array().square()).matrix();
        case Activation::softsign:
            return (1.0 - a.array().abs()).square().matrix();
    }
    throw std::logic_error("unreachable");
}

VectorXd Mlp::predict(const MatrixXd& x) const {
    if (x.cols() != n_inputs_)
        throw std::invalid_argument("Mlp::predict: input width mismatch");
    MatrixXd a = x;
    for (size_t l = 0; l + 1 < w_.size(); ++l)
        a = activate(((a * w_[l]).rowwise() + b_[l].transpose()).eval());
    return (a * w_.back()).col(0) + VectorXd::Constant(x.rows(), b_.back()(0));
}

double Mlp::predict_one(const VectorXd& x) const {
    return predict(x.transpose())(0);
}

double Mlp::rmse(const MatrixXd& x, const VectorXd& y) const {
    if (x.rows() != y.size())
        throw std::invalid_argument("Mlp::rmse: row count mismatch");
    return std::sqrt((predict(x) - y).squaredNorm() / double(y.size()));
}

void Mlp::train_epoch(const MatrixXd& x, const VectorXd& y) {
    const int n = int(x.rows());
    if (n == 0 || x.cols() != n_inputs_ || y.size() != n)
        throw std::invalid_argument("Mlp::train_epoch: bad training arrays");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng_);

    const size_t n_layers = w_.size();
    std::vector<MatrixXd> acts(n_layers + 1);

    for (int start = 0; start < n; start += spec_.batch_size) {
        const int bsz = std::min(spec_.batch_size, n - start);
        MatrixXd xb(bsz, n_inputs_);
        VectorXd yb(bsz);
        for (int i = 0; i < bsz; ++i) {
            xb.row(i) = x.row(order[start + i]);
            yb(i) = y(order[start + i]);
        }

        acts[0] = xb;
        for (size_t l = 0; l + 1 < n_layers; ++l)
            acts[l + 1] =
                activate(((acts[l] * w_[l]).rowwise() + b_[l].transpose()).eval());
        acts[n_layers] = (acts[n_layers - 1] * w_.back()).rowwise() +
                         b_.back().transpose();

        // Backpropagate the summed squared-error gradient: the learning rate
        // acts per sample, so small batches and large batches take steps of
        // comparable aggregate size per epoch. The global gradient norm is
        // clipped so that large learning-rate draws stay stable instead of
        // diverging; early stopping then picks their best epoch.
        MatrixXd delta = (acts[n_layers].col(0) - yb) * 2.0;
        std::vector<MatrixXd> gw(n_layers);
        std::vector<VectorXd> gb(n_layers);
        double norm_sq = 0;
        for (size_t l = n_layers; l-- > 0;) {
            gw[l] = acts[l].transpose() * delta;
            gb[l] = delta.colwise().sum();
            norm_sq += gw[l].squaredNorm() + gb[l].squaredNorm();
            if (l > 0)
                delta = (delta * w_[l].transpose()).cwiseProduct(
                    activate_derivative(acts[l]));
        }
        const double clip = 1.0;
        const double scale =
            norm_sq > clip * clip ? clip / std::sqrt(norm_sq) : 1.0;
        for (size_t l = 0; l < n_layers; ++l) {
            vw_[l] = spec_.momentum * vw_[l] -
                     spec_.learning_rate * scale * gw[l];
            vb_[l] = spec_.momentum * vb_[l] -
                     spec_.learning_rate * scale * gb[l];
            w_[l] += vw_[l];
            b_[l] += vb_[l];
        }
    }
}

double Mlp::fit(const MatrixXd& x_train, const VectorXd& y_train,
                const MatrixXd& x_val, const VectorXd& y_val, int patience,
                int max_epochs) {
    if (patience < 1) throw std::invalid_argument("Mlp::fit: patience >= 1");
    double best = rmse(x_val, y_val);
    VectorXd best_params = parameters();
    int wait = 0;
    for (int epoch = 0; epoch < max_epochs; ++epoch) {
        train_epoch(x_train, y_train);
        const double val = rmse(x_val, y_val);
        if (val < best) {
            best = val;
            best_params = parameters();
            wait = 0;
        } else if (++wait >= patience) {
            break;
        }
    }
    set_parameters(best_params);
    return best;
}

int Mlp::n_parameters() const {
    int n = 0;
    for (size_t l = 0; l < w_.size(); ++l)
        n += int(w_[l].size()) + int(b_[l].size());
    return n;
}

VectorXd Mlp::parameters() const {
    VectorXd flat(n_parameters());
    int at = 0;
    for (size_t l = 0; l < w_.size(); ++l) {
        flat.segment(at, w_[l].size()) =
            Eigen::Map<const VectorXd>(w_[l].data(), w_[l].size());
        at += int(w_[l].size());
        flat.segment(at, b_[l].size()) = b_[l];
        at += int(b_[l].size());
    }
    return flat;
}

void Mlp::set_parameters(const VectorXd& flat) {
    if (flat.size() != n_parameters())
        throw std::invalid_argument("Mlp::set_parameters: size mismatch");
    int at = 0;
    for (size_t l = 0; l < w_.size(); ++l) {
        Eigen::Map<VectorXd>(w_[l].data(), w_[l].size()) =
            flat.segment(at, w_[l].size());
        at += int(w_[l].size());
        b_[l] = flat.segment(at, b_[l].size());
        at += int(b_[l].size());
    }
}

}  // namespace rydbench
