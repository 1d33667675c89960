#include "rydbench/negativity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "rydbench/fit.hpp"
#include "rydbench/rydberg.hpp"

namespace rydbench {

// ============================================================================
// Spectra and exact negativity
// ============================================================================

double vn_entropy(const std::vector<double>& schmidt_values) {
    double s = 0.0;
    for (double v : schmidt_values) {
        double w = v * v;
        if (w > 0.0) s -= w * std::log2(w);
    }
    return s;
}

double renyi_half(const std::vector<double>& schmidt_values) {
    double s = 0.0;
    for (double v : schmidt_values) s += std::abs(v);
    return 2.0 * std::log2(std::max(s, std::numeric_limits<double>::min()));
}

double vn_entropy(const SchmidtSpectrum& spec) { return spec.von_neumann(); }
double renyi_half(const SchmidtSpectrum& spec) { return spec.renyi_half(); }

LogNegativity log_negativity_mixed(const Matrix& rho, int n_sites, int cut) {
    if (n_sites < 2 || cut < 0 || cut >= n_sites - 1) {
        throw std::invalid_argument("log_negativity_mixed: cut must split the chain");
    }
    long dim = 1L << n_sites;
    if (rho.rows() != dim || rho.cols() != dim) {
        throw std::invalid_argument("log_negativity_mixed: matrix size does not match n_sites");
    }
    long dim_a = 1L << (cut + 1);
    long dim_b = dim / dim_a;

    Matrix pt(dim, dim);
    for (long a = 0; a < dim_a; ++a)
        for (long b = 0; b < dim_b; ++b)
            for (long ap = 0; ap < dim_a; ++ap)
                for (long bp = 0; bp < dim_b; ++bp)
                    pt(ap * dim_b + b, a * dim_b + bp) = rho(a * dim_b + b, ap * dim_b + bp);

    Eigen::SelfAdjointEigenSolver<Matrix> es(pt, Eigen::EigenvaluesOnly);
    double trace_norm = es.eigenvalues().cwiseAbs().sum();

    LogNegativity out;
    out.raw = std::log2(std::max(trace_norm, std::numeric_limits<double>::min()));
    out.value = std::max(out.raw, 0.0);
    return out;
}

// ============================================================================
// Proxy and refinements
// ============================================================================

double proxy(double e_pure, double fidelity) {
    if (fidelity <= 0.0 || fidelity > 1.0 + 1e-12) {
        throw std::invalid_argument("proxy: fidelity must lie in (0, 1]");
    }
    return e_pure + std::log2(std::min(fidelity, 1.0));
}

double mathfrak_f(double fidelity, double dim_a) {
    if (dim_a < 2.0) throw std::invalid_argument("mathfrak_f: dim_a must be at least 2");
    double dim = dim_a * dim_a;
    double fp = fidelity - (1.0 - fidelity) / (dim - 1.0);
    double x = fp * dim_a;
    if (x < 1.0) {
        throw std::invalid_argument(
            "mathfrak_f: fidelity too small for the depolarized expansion (F' * dim_a < 1)");
    }
    double lambda0 = (1.0 - fp) / x;
    double corr = 0.0;
    if (lambda0 > 0.0) {
        corr = (9.0 / 64.0) * fp * lambda0 * lambda0 *
               (8.0 * std::log(2.0) - 1.0 - 2.0 * std::log(lambda0));
    }
    return fp + corr;
}

double haar_depolarized_estimator(double e_pure, double fidelity, double dim_a) {
    return e_pure + std::log2(mathfrak_f(fidelity, dim_a));
}

TriangleBounds triangle_bounds(double fidelity, double e_pure, double perp_norm) {
    if (fidelity <= 0.0 || fidelity > 1.0) {
        throw std::invalid_argument("triangle_bounds: fidelity must lie in (0, 1]");
    }
    if (perp_norm < 0.0) throw std::invalid_argument("triangle_bounds: negative trace norm");
    double main_term = fidelity * std::exp2(e_pure);
    double perp_term = (1.0 - fidelity) * perp_norm;

    TriangleBounds out;
    out.upper = std::log2(main_term + perp_term);
    if (main_term > perp_term) {
        out.lower.value = std::log2(main_term - perp_term);
    } else {
        out.lower.vacuous = true;
        out.lower.value = -std::numeric_limits<double>::infinity();
    }
    return out;
}

namespace {

// Shared tail of the two correction-style lower bounds:
// e_pure + log2(F) + 2 log2(1 - penalty), vacuous once the penalty reaches 1.
BoundResult corrected_bound(double e_pure, double fidelity, double penalty) {
    BoundResult out;
    double corr = 1.0 - penalty;
    if (corr <= 0.0) {
        out.vacuous = true;
        out.value = -std::numeric_limits<double>::infinity();
        return out;
    }
    out.value = e_pure + std::log2(fidelity) + 2.0 * std::log2(corr);
    return out;
}

void check_f_alpha(const char* who, double fidelity, double alpha) {
    if (fidelity <= 0.0 || fidelity > 1.0) {
        throw std::invalid_argument(std::string(who) + ": fidelity must lie in (0, 1]");
    }
    if (alpha <= 0.0 || alpha > 1.0) {
        throw std::invalid_argument(std::string(who) + ": alpha must lie in (0, 1]");
    }
}

}  // namespace

BoundResult commutator_bound(double e_pure, double fidelity, double commutator, double alpha) {
    check_f_alpha("commutator_bound", fidelity, alpha);
    if (commutator < 0.0) {
        throw std::invalid_argument("commutator_bound: negative commutator norm");
    }
    double penalty = commutator / fidelity * std::sqrt((1.0 - alpha) / (2.0 * alpha));
    return corrected_bound(e_pure, fidelity, penalty);
}

double c_over_f_quasistatic(double fidelity) {
    if (fidelity <= 0.0 || fidelity > 1.0) {
        throw std::invalid_argument("c_over_f_quasistatic: fidelity must lie in (0, 1]");
    }
    double f2 = fidelity * fidelity;
    double inner = 2.0 / std::sqrt(3.0 + 2.0 * f2 - f2 * f2) - 1.0;
    return std::sqrt(2.0 * std::max(inner, 0.0));
}

BoundResult eigenstate_fidelity_bound(double e_pure, double fidelity, double f_eigen,
                                      double alpha) {
    check_f_alpha("eigenstate_fidelity_bound", fidelity, alpha);
    if (f_eigen <= 0.0 || f_eigen > 1.0) {
        throw std::invalid_argument("eigenstate_fidelity_bound: f must lie in (0, 1]");
    }
    double penalty = std::sqrt((1.0 - f_eigen) * (1.0 - alpha) / (f_eigen * alpha));
    return corrected_bound(e_pure, fidelity, penalty);
}

double cauchy_schwarz_f(double fidelity, double purity) {
    if (fidelity <= 0.0) throw std::invalid_argument("cauchy_schwarz_f: fidelity must be positive");
    double ratio = purity / (fidelity * fidelity);
    if (ratio < 1.0 - 1e-12) {
        throw std::invalid_argument("cauchy_schwarz_f: purity below fidelity squared");
    }
    ratio = std::max(ratio, 1.0);
    return (ratio + 1.0) / (2.0 * ratio);
}

// ============================================================================
// Truncated-state analytics
// ============================================================================

std::pair<double, double> truncated_maxent(int chi, int dim_a) {
    if (chi < 1 || chi > dim_a) {
        throw std::invalid_argument("truncated_maxent: need 1 <= chi <= dim_a");
    }
    return {static_cast<double>(chi) / dim_a, std::log2(static_cast<double>(chi))};
}

TruncatedHaarPoint truncated_haar_curve(double s_tilde_min) {
    if (s_tilde_min < 0.0 || s_tilde_min > 2.0) {
        throw std::invalid_argument("truncated_haar_curve: s_tilde must lie in [0, 2]");
    }
    const double pi = std::acos(-1.0);
    double s = s_tilde_min;
    double root = std::sqrt(std::max(4.0 - s * s, 0.0));
    double arc = 2.0 / pi * std::acos(s / 2.0);

    TruncatedHaarPoint out;
    out.s_tilde = s;
    out.chi_fraction = arc - s * root / (2.0 * pi);
    out.fidelity = arc + s * (2.0 - s * s) * root / (4.0 * pi);
    double sum_s_sq = std::pow(4.0 - s * s, 3) / (9.0 * pi * pi);  // (sum of kept s)^2 / D_A
    out.e_n_minus_log2_da =
        std::log2(std::max(sum_s_sq, std::numeric_limits<double>::min())) -
        std::log2(std::max(out.fidelity, std::numeric_limits<double>::min()));
    return out;
}

double delta_vs_depolarized(double fidelity) {
    if (fidelity <= 0.0 || fidelity > 1.0) {
        throw std::invalid_argument("delta_vs_depolarized: fidelity must lie in (0, 1]");
    }
    // Invert the monotone map s_tilde -> F by bisection, then evaluate the gap.
    double lo = 0.0, hi = 2.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (truncated_haar_curve(mid).fidelity > fidelity) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    double s = 0.5 * (lo + hi);
    return 3.0 * std::log2(4.0 / (4.0 - s * s)) + 2.0 * std::log2(fidelity);
}

double delta_vs_depolarized_approx(double fidelity) {
    if (fidelity < 0.0 || fidelity > 1.0) {
        throw std::invalid_argument("delta_vs_depolarized_approx: fidelity must lie in [0, 1]");
    }
    return 1.5 * std::pow(1.0 - fidelity, 2.0 / 3.0);
}

double haar_pure_negativity(int n_sites) {
    if (n_sites < 2 || n_sites % 2 != 0) {
        throw std::invalid_argument("haar_pure_negativity: need an even chain");
    }
    return 0.5 * n_sites + page_correction;
}

double blockaded_haar_entropy(int n_sites) {
    if (n_sites < 2 || n_sites % 2 != 0) {
        throw std::invalid_argument("blockaded_haar_entropy: need an even chain");
    }
    return std::log2(static_cast<double>(blockade_dimension(n_sites / 2))) - 0.47;
}

// ============================================================================
// Reporting
// ============================================================================

NegativityReport::NegativityReport()
    : commutator(std::numeric_limits<double>::quiet_NaN()),
      eigenstate_fidelity(std::numeric_limits<double>::quiet_NaN()),
      haar_estimate(std::numeric_limits<double>::quiet_NaN()) {}

std::string NegativityReport::text_record() const {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "E_N=%.8g E_pure=%.8g E_P=%.8g alpha=%.6g F=%.8g C=%.6g f_eigen=%.6g "
                  "E_haar=%.8g",
                  e_n, e_pure, e_p, alpha, fidelity, commutator, eigenstate_fidelity,
                  haar_estimate);
    return buf;
}

// ============================================================================
// Entanglement growth
// ============================================================================

namespace {

double growth_eval(double s0, double m1, double m2, double te, double sg, double t) {
    sg = std::max(sg, 1e-3);
    double z = (t - te) / sg;
    double logistic = z > 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    return s0 + m1 * t + (m2 - m1) * (t - te - sg) * logistic;
}

double growth_model(const std::vector<double>& p, double n, double t) {
    return growth_eval(p[0], p[1], p[2] + p[3] * n + p[4] * n * n, p[5] + p[6] * n,
                       p[7] + p[8] * n, t);
}

double growth_rms(const std::vector<double>& p, const std::vector<GrowthCurvePoint>& data) {
    double ss = 0.0;
    for (const auto& d : data) {
        double r = growth_model(p, d.n, d.t) - d.s;
        ss += r * r;
    }
    return std::sqrt(ss / data.size());
}

// Per-size warm start: a two-segment line fit seeds a 5-parameter single-size
// fit (s0, m1, m2, te, sg); the per-size results are then regressed onto the
// shared parametrization before the joint polish.
struct SingleFit {
    double s0 = 0.0, m1 = 0.0, m2 = 0.0, te = 0.0, sg = 0.0;
};

SingleFit fit_single_size(std::vector<GrowthCurvePoint> pts) {
    std::sort(pts.begin(), pts.end(),
              [](const GrowthCurvePoint& a, const GrowthCurvePoint& b) { return a.t < b.t; });
    auto line = [&](size_t lo, size_t hi) {
        std::vector<double> t, s;
        for (size_t i = lo; i < hi; ++i) {
            t.push_back(pts[i].t);
            s.push_back(pts[i].s);
        }
        LinearFit f = poly_fit(t, s, 1);
        return std::pair<double, double>(f.beta(0), f.beta(1));
    };
    size_t n = pts.size();
    auto [b1, m1] = line(0, std::max<size_t>(2, n / 2));
    auto [b2, m2] = line(n - std::max<size_t>(2, n / 3), n);
    double t_cross = std::abs(m1 - m2) > 1e-9 ? (b2 - b1) / (m1 - m2)
                                              : 0.5 * (pts.front().t + pts.back().t);
    t_cross = std::clamp(t_cross, pts.front().t, pts.back().t);

    auto objective = [&](const std::vector<double>& p) {
        double ss = 0.0;
        for (const auto& d : pts) {
            double r = growth_eval(p[0], p[1], p[2], p[3], p[4], d.t) - d.s;
            ss += r * r;
        }
        return std::sqrt(ss / pts.size());
    };
    std::vector<double> best = {b1, m1, m2, t_cross, std::max(0.2 * t_cross, 0.05)};
    double best_val = objective(best);
    for (double sg0 : {0.1, 0.35, 1.0}) {
        std::vector<double> start = {b1, m1, m2, t_cross, sg0 * std::max(t_cross, 0.5)};
        std::vector<double> step(5);
        for (size_t i = 0; i < 5; ++i) step[i] = std::max(0.1 * std::abs(start[i]), 0.02);
        SimplexResult r = minimize_simplex(objective, start, step, 1e-12, 20000);
        if (r.value < best_val) {
            best_val = r.value;
            best = r.x;
        }
    }
    return {best[0], best[1], best[2], best[3], std::max(best[4], 1e-3)};
}

}  // namespace

GrowthFit fit_entanglement_growth(const std::vector<GrowthCurvePoint>& data) {
    std::map<double, std::vector<GrowthCurvePoint>> groups;
    for (const auto& d : data) groups[d.n].push_back(d);
    if (groups.size() < 3) {
        throw std::invalid_argument(
            "fit_entanglement_growth: need at least three system sizes");
    }
    for (const auto& [n, pts] : groups) {
        if (pts.size() < 4) {
            throw std::invalid_argument(
                "fit_entanglement_growth: need at least four points per system size");
        }
    }

    std::vector<double> ns, m2s, tes, sgs;
    double m1_init = 0.0, s0_init = 0.0;
    for (const auto& [n, pts] : groups) {
        SingleFit sf = fit_single_size(pts);
        ns.push_back(n);
        m2s.push_back(sf.m2);
        tes.push_back(sf.te);
        sgs.push_back(sf.sg);
        m1_init += sf.m1;
        s0_init += sf.s0;
    }
    m1_init /= groups.size();
    s0_init /= groups.size();

    LinearFit m2_fit = poly_fit(ns, m2s, 2);
    LinearFit te_fit = poly_fit(ns, tes, 1);
    LinearFit sg_fit = poly_fit(ns, sgs, 1);

    std::vector<double> start = {s0_init,        m1_init,        m2_fit.beta(0),
                                 m2_fit.beta(1), m2_fit.beta(2), te_fit.beta(0),
                                 te_fit.beta(1), sg_fit.beta(0), sg_fit.beta(1)};

    // Penalize parameter sets whose width goes non-positive anywhere in the
    // observed size range; the raw model floors sigma, which would otherwise
    // leave the optimizer free to wander into the dead zone.
    double n_lo = ns.front(), n_hi = ns.back();
    auto objective = [&](const std::vector<double>& p) {
        double pen = 0.0;
        for (double n : {n_lo, n_hi}) {
            double sg = p[7] + p[8] * n;
            if (sg < 1e-2) pen += 10.0 * (1e-2 - sg) * (1e-2 - sg);
        }
        return growth_rms(p, data) + pen;
    };

    std::vector<double> best = start;
    double best_val = objective(start);
    for (double scale : {0.3, 1.0}) {
        std::vector<double> step(start.size());
        for (size_t i = 0; i < start.size(); ++i) {
            step[i] = scale * std::max(0.1 * std::abs(start[i]), 0.005);
        }
        SimplexResult r1 = minimize_simplex(objective, best, step, 1e-13, 60000);
        if (r1.value < best_val) {
            best_val = r1.value;
            best = r1.x;
        }
    }

    GrowthFit out;
    out.s0 = best[0];
    out.m1 = best[1];
    out.m2 = {best[2], best[3], best[4]};
    out.t_ent = {best[5], best[6]};
    out.sigma = {best[7], best[8]};
    out.residual_rms = growth_rms(best, data);
    return out;
}

double predict_s(const GrowthFit& fit, double n, double t) {
    std::vector<double> p = {fit.s0,       fit.m1,       fit.m2[0], fit.m2[1], fit.m2[2],
                             fit.t_ent[0], fit.t_ent[1], fit.sigma[0], fit.sigma[1]};
    return growth_model(p, n, t);
}

}  // namespace rydbench
