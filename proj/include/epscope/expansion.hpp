#pragma once

// Fractional-power (Puiseux) expansion of the eigenvalues around an EP.
//
// The chain-model series is anchored at a fixed impurity energy eps_bar and
// expands in zeta = lambda^{1/2}, lambda = eps_bar^2 - (1 - 2 g^2), as the
// coupling g is tuned through the EP coupling g_bar = sqrt((1 - eps_bar^2)/2).
// Along that path it is exact:
//   z_s = z_c + s beta_1 zeta + sum_{n>=2} beta_n (s zeta)^n,
//   z_c = (1 + eps_bar^2)/(2 eps_bar), beta_1 = (1 - eps_bar^2)/(2 eps_bar^2),
//   beta_n = 1/(2 eps_bar^{n+1}).

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "epscope/eplocator.hpp"
#include "epscope/errors.hpp"
#include "epscope/model.hpp"
#include "epscope/spectrum.hpp"

namespace epscope {

struct PuiseuxSeries {
    complex z_center;
    int period = 2;
    std::vector<complex> beta;  // beta[l-1] multiplies lambda^{l/p}
    EpRecord ep;
    complex anchor_eps_d;       // impurity energy the series is expanded at
    const char* factor = "f2";  // lambda = eps_d^2 - (1 - 2 g^2)
    bool near_degenerate = false;  // |eps_bar| tiny: coefficients blow up
};

/// Series anchored at an arbitrary nonzero real impurity energy eps_bar.
inline PuiseuxSeries puiseux_series_at(double eps_bar, int order) {
    if (order < 1) throw Error(ErrorKind::InvalidArgument, "order must be at least 1");
    if (eps_bar == 0.0 || !std::isfinite(eps_bar))
        throw Error(ErrorKind::DegenerateCoupling, "series anchor eps_bar must be finite and nonzero");
    if (std::abs(eps_bar) >= 1.0)
        throw Error(ErrorKind::InvalidArgument, "real EPs need |eps_bar| < 1");
    PuiseuxSeries s;
    s.anchor_eps_d = eps_bar;
    s.z_center = (1.0 + eps_bar * eps_bar) / (2.0 * eps_bar);
    s.beta.resize(static_cast<std::size_t>(order));
    s.beta[0] = (1.0 - eps_bar * eps_bar) / (2.0 * eps_bar * eps_bar);
    for (int n = 2; n <= order; ++n) s.beta[static_cast<std::size_t>(n - 1)] = 0.5 / std::pow(eps_bar, n + 1);
    s.near_degenerate = std::abs(eps_bar) < 1e-3;

    const double g_bar = std::sqrt((1.0 - eps_bar * eps_bar) / 2.0);
    s.ep.eps_bar = eps_bar;
    s.ep.z_center = s.z_center;
    s.ep.sheet = RiemannSheet::Second;
    s.ep.sign_q = q_sign(s.z_center, RiemannSheet::Second);
    s.ep.period = 2;
    s.ep.residual = std::abs(self_energy_derivative(s.z_center, RiemannSheet::Second, g_bar) - 1.0);
    return s;
}

/// Series at the EP eps_bar = +/-sqrt(1 - 2 g^2) of coupling g.
inline PuiseuxSeries puiseux_coefficients_prototype(Branch ep_side, double g, int order) {
    if (!(g > 0.0)) throw Error(ErrorKind::InvalidArgument, "series needs g > 0");
    const double f1 = detail::require_nondegenerate(g);
    if (f1 < 0.0) throw Error(ErrorKind::InvalidArgument, "real EPs need g < 1/sqrt(2)");
    const double eps_bar = (ep_side == Branch::Plus ? 1.0 : -1.0) * std::sqrt(f1);
    return puiseux_series_at(eps_bar, order);
}

struct SeriesValue {
    complex z;
    bool within_radius = true;  // |lambda^{1/2} / eps_bar| < 1
};

/// z_center + sum_{l=1}^{order} beta_l e^{2 pi i l h / p} (lambda^{1/p})^l with the principal root.
inline SeriesValue evaluate_series(const PuiseuxSeries& s, complex lam, int branch_h, int order) {
    if (branch_h < 0 || branch_h >= s.period) throw Error(ErrorKind::InvalidArgument, "branch index out of range");
    if (order < 0 || static_cast<std::size_t>(order) > s.beta.size())
        throw Error(ErrorKind::InvalidArgument, "order exceeds available coefficients");
    const complex root = std::pow(lam, 1.0 / s.period);
    const complex rotated = root * std::polar(1.0, 2.0 * std::numbers::pi * branch_h / s.period);
    complex term = 1.0;
    complex z = s.z_center;
    for (int l = 1; l <= order; ++l) {
        term *= rotated;
        z += s.beta[static_cast<std::size_t>(l - 1)] * term;
    }
    const double ratio = std::abs(std::sqrt(lam)) / std::abs(s.anchor_eps_d);
    return {z, ratio < 1.0};
}

/// Evaluate at a parameter point; lambda is computed from (eps_d, g) as the polynomial factor f2.
inline SeriesValue evaluate_series(const PuiseuxSeries& s, const ModelParams& p, int branch_h, int order) {
    return evaluate_series(s, lambda(p), branch_h, order);
}

/// Coupling at which the anchored series sees a given lambda.
inline double coupling_for_lambda(double eps_bar, double lam) {
    const double g2 = (lam + 1.0 - eps_bar * eps_bar) / 2.0;
    if (g2 < 0.0) throw Error(ErrorKind::InvalidArgument, "lambda below the g = 0 limit");
    return std::sqrt(g2);
}

namespace detail {

inline double least_squares_slope(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i];
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxy / sxx;
}

}  // namespace detail

struct ExponentSample {
    double lambda_abs;
    double distance;  // |z - z_center|
};

/// Least-squares slope of log|z - z_c| against log|lambda|.
inline double fit_leading_exponent(std::span<const ExponentSample> samples) {
    if (samples.size() < 5) throw Error(ErrorKind::InsufficientSpan, "need at least 5 samples");
    std::vector<double> x, y;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& s : samples) {
        if (!(s.lambda_abs > 0.0) || !(s.distance > 0.0))
            throw Error(ErrorKind::InsufficientSpan, "samples must have positive |lambda| and distance");
        x.push_back(std::log(s.lambda_abs));
        y.push_back(std::log(s.distance));
        lo = std::min(lo, s.lambda_abs);
        hi = std::max(hi, s.lambda_abs);
    }
    if (std::log10(hi / lo) < 2.0 - 1e-9)
        throw Error(ErrorKind::InsufficientSpan, "samples must span at least two decades of |lambda|");
    return detail::least_squares_slope(x, y);
}

struct PuiseuxSample {
    ModelParams params;
    complex z;
};

inline constexpr double max_fit_condition = 1e12;

/// Recovers beta_1..beta_order from eigenvalues sampled on one branch by linear
/// least squares in the basis e^{2 pi i l h/p} lambda^{l/p}.
///
/// `guard_terms` extra powers are fitted and discarded so that the truncated
/// tail does not bias the returned coefficients. The condition number is that of
/// the column-equilibrated design matrix.
inline std::vector<complex> fit_coefficients_numeric(std::span<const PuiseuxSample> samples, const EpRecord& ep,
                                                     int order, int branch_h = 0, int guard_terms = 8) {
    if (order < 1) throw Error(ErrorKind::InvalidArgument, "order must be at least 1");
    const int period = ep.period > 0 ? ep.period : 2;
    if (branch_h < 0 || branch_h >= period) throw Error(ErrorKind::InvalidArgument, "branch index out of range");
    const int columns = order + std::max(0, guard_terms);
    const auto rows = static_cast<Eigen::Index>(samples.size());
    if (rows < columns) throw Error(ErrorKind::IllConditioned, "fewer samples than fitted powers");

    using Matrix = Eigen::Matrix<complex, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<complex, Eigen::Dynamic, 1>;
    Matrix a(rows, columns);
    Vector b(rows);
    const complex phase = std::polar(1.0, 2.0 * std::numbers::pi * branch_h / period);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& s = samples[static_cast<std::size_t>(i)];
        const complex root = std::pow(lambda(s.params), 1.0 / period) * phase;
        complex term = 1.0;
        for (Eigen::Index l = 0; l < columns; ++l) {
            term *= root;
            a(i, l) = term;
        }
        b(i) = s.z - ep.z_center;
    }
    Eigen::VectorXd scale(columns);
    for (Eigen::Index l = 0; l < columns; ++l) {
        scale(l) = a.col(l).norm();
        if (scale(l) == 0.0) throw Error(ErrorKind::IllConditioned, "a basis column vanishes on every sample");
        a.col(l) /= scale(l);
    }
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    if (!(smin > 0.0) || sv(0) / smin > max_fit_condition)
        throw Error(ErrorKind::IllConditioned, "design matrix condition exceeds 1e12");
    const Vector x = svd.solve(b);
    std::vector<complex> beta(static_cast<std::size_t>(order));
    for (int l = 0; l < order; ++l) beta[static_cast<std::size_t>(l)] = x(l) / scale(l);
    return beta;
}

}  // namespace epscope
