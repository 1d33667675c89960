#include "rydbench/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rydbench {

MeanSem mean_sem(const std::vector<double>& x) {
    MeanSem out;
    out.n = int(x.size());
    if (out.n == 0) return out;
    double s = 0.0;
    for (double v : x) s += v;
    out.mean = s / out.n;
    if (out.n < 2) return out;
    double sq = 0.0;
    for (double v : x) sq += (v - out.mean) * (v - out.mean);
    out.sem = std::sqrt(sq / (double(out.n) * (out.n - 1)));
    return out;
}

LinearFit linear_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    if (x.rows() != y.size()) throw std::invalid_argument("linear_fit: size mismatch");
    if (x.rows() < x.cols()) throw std::invalid_argument("linear_fit: underdetermined");

    LinearFit out;
    Eigen::MatrixXd xtx = x.transpose() * x;
    Eigen::LDLT<Eigen::MatrixXd> solver(xtx);
    out.beta = solver.solve(x.transpose() * y);

    Eigen::VectorXd resid = y - x * out.beta;
    double ss_res = resid.squaredNorm();
    double mean_y = y.mean();
    double ss_tot = (y.array() - mean_y).square().sum();
    out.r_squared = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;

    int dof = int(x.rows() - x.cols());
    double sigma2 = (dof > 0) ? ss_res / dof : 0.0;
    out.residual_rms = std::sqrt(ss_res / x.rows());
    Eigen::MatrixXd cov = solver.solve(Eigen::MatrixXd::Identity(x.cols(), x.cols()));
    out.stderr_beta.resize(x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j)
        out.stderr_beta(j) = std::sqrt(std::max(0.0, sigma2 * cov(j, j)));
    return out;
}

LinearFit poly_fit(const std::vector<double>& x, const std::vector<double>& y,
                   int degree) {
    if (x.size() != y.size()) throw std::invalid_argument("poly_fit: size mismatch");
    if (degree < 0) throw std::invalid_argument("poly_fit: negative degree");
    Eigen::MatrixXd m(x.size(), degree + 1);
    Eigen::VectorXd v(y.size());
    for (size_t i = 0; i < x.size(); ++i) {
        double p = 1.0;
        for (int d = 0; d <= degree; ++d) {
            m(i, d) = p;
            p *= x[i];
        }
        v(i) = y[i];
    }
    return linear_fit(m, v);
}

double r_squared(const std::vector<double>& y, const std::vector<double>& model) {
    if (y.size() != model.size() || y.empty())
        throw std::invalid_argument("r_squared: size mismatch");
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= double(y.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (size_t i = 0; i < y.size(); ++i) {
        ss_res += (y[i] - model[i]) * (y[i] - model[i]);
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    return (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
}

// ============================================================
// Nelder-Mead
// ============================================================

SimplexResult minimize_simplex(const std::function<double(const std::vector<double>&)>& f,
                               std::vector<double> start,
                               std::vector<double> step,
                               double tol, int max_iter) {
    const int n = int(start.size());
    if (n == 0 || step.size() != start.size())
        throw std::invalid_argument("minimize_simplex: bad start/step");

    std::vector<std::vector<double>> verts(n + 1, start);
    for (int i = 0; i < n; ++i) verts[i + 1][i] += step[i];
    std::vector<double> vals(n + 1);
    for (int i = 0; i <= n; ++i) vals[i] = f(verts[i]);

    auto order = [&]() {
        std::vector<int> idx(n + 1);
        for (int i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return vals[a] < vals[b]; });
        std::vector<std::vector<double>> v2(n + 1);
        std::vector<double> f2(n + 1);
        for (int i = 0; i <= n; ++i) {
            v2[i] = verts[idx[i]];
            f2[i] = vals[idx[i]];
        }
        verts = std::move(v2);
        vals = std::move(f2);
    };

    SimplexResult out;
    int it = 0;
    for (; it < max_iter; ++it) {
        order();
        double spread = std::abs(vals[n] - vals[0]);
        double size = 0.0;
        for (int i = 0; i < n; ++i)
            size = std::max(size, std::abs(verts[n][i] - verts[0][i]));
        if (spread < tol && size < std::sqrt(tol)) {
            out.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) centroid[j] += verts[i][j];
        }
        for (int j = 0; j < n; ++j) centroid[j] /= n;

        auto blend = [&](double t) {
            std::vector<double> p(n);
            for (int j = 0; j < n; ++j)
                p[j] = centroid[j] + t * (verts[n][j] - centroid[j]);
            return p;
        };

        auto refl = blend(-1.0);
        double f_refl = f(refl);
        if (f_refl < vals[0]) {
            auto expd = blend(-2.0);
            double f_exp = f(expd);
            if (f_exp < f_refl) {
                verts[n] = expd;
                vals[n] = f_exp;
            } else {
                verts[n] = refl;
                vals[n] = f_refl;
            }
        } else if (f_refl < vals[n - 1]) {
            verts[n] = refl;
            vals[n] = f_refl;
        } else {
            auto contr = blend(f_refl < vals[n] ? -0.5 : 0.5);
            double f_con = f(contr);
            if (f_con < std::min(f_refl, vals[n])) {
                verts[n] = contr;
                vals[n] = f_con;
            } else {  // shrink toward the best vertex
                for (int i = 1; i <= n; ++i) {
                    for (int j = 0; j < n; ++j)
                        verts[i][j] = 0.5 * (verts[i][j] + verts[0][j]);
                    vals[i] = f(verts[i]);
                }
            }
        }
    }
    order();
    out.x = verts[0];
    out.value = vals[0];
    out.iterations = it;
    return out;
}

// ============================================================
// Incomplete gamma and chi-square tails
// ============================================================

namespace {

double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int k = 1; k < 10000; ++k) {
        term *= x / (a + k);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
    // Lentz's algorithm for the continued fraction of Q(a, x).
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        double an = -double(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::invalid_argument("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_contfrac(a, x);
}

double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_contfrac(a, x);
}

double chi_square_pvalue(double statistic, int dof) {
    if (dof < 1) throw std::invalid_argument("chi_square_pvalue: dof must be >= 1");
    if (statistic <= 0.0) return 1.0;
    return gamma_q(0.5 * dof, 0.5 * statistic);
}

double chi_square_gof(const std::vector<long long>& counts,
                      const std::vector<double>& probs, double min_expected) {
    if (counts.size() != probs.size() || counts.empty())
        throw std::invalid_argument("chi_square_gof: size mismatch");
    long long total = 0;
    for (long long c : counts) {
        if (c < 0) throw std::invalid_argument("chi_square_gof: negative count");
        total += c;
    }
    if (total == 0) throw std::invalid_argument("chi_square_gof: no observations");

    // Sort cells by expected count and pool the small tail so every cell used
    // in the statistic has a healthy expectation.
    std::vector<size_t> idx(probs.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](size_t a, size_t b) { return probs[a] > probs[b]; });

    double stat = 0.0;
    int cells = 0;
    double pooled_e = 0.0;
    long long pooled_o = 0;
    for (size_t r = 0; r < idx.size(); ++r) {
        double e = probs[idx[r]] * double(total);
        long long o = counts[idx[r]];
        if (e >= min_expected) {
            stat += (o - e) * (o - e) / e;
            ++cells;
        } else {
            pooled_e += e;
            pooled_o += o;
        }
    }
    if (pooled_e > 0.0) {
        stat += (pooled_o - pooled_e) * (pooled_o - pooled_e) / pooled_e;
        ++cells;
    }
    if (cells < 2) return 1.0;
    return chi_square_pvalue(stat, cells - 1);
}

}  // namespace rydbench
