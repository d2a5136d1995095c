#pragma once

// Observables of the transition at the real EP eps_bar_+ where two anti-bound
// states turn into a resonance / anti-resonance pair.

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <vector>

#include "epscope/errors.hpp"
#include "epscope/expansion.hpp"
#include "epscope/model.hpp"
#include "epscope/spectrum.hpp"

namespace epscope {

enum class TransitionSide { Critical, NonCritical, AtEP };

constexpr const char* to_string(TransitionSide s) noexcept {
    switch (s) {
        case TransitionSide::Critical: return "critical";
        case TransitionSide::NonCritical: return "non-critical";
        case TransitionSide::AtEP: return "at-ep";
    }
    return "?";
}

struct QptObservables {
    double gamma = 0.0;
    std::optional<double> gap;         // anti-bound window only
    std::optional<double> xi_inverse;  // resonance window only
    TransitionSide side = TransitionSide::NonCritical;
};

namespace detail {

struct RealWindow {
    double eps;
    double eps_bar;    // sqrt(1 - 2 g^2)
    double eps_delta;  // 1 - g^2
};

inline RealWindow real_window(const ModelParams& p, ErrorKind kind) {
    require_prototype(p);
    if (!p.has_real_eps_d()) throw Error(kind, "window observables need a real impurity energy");
    const double f1 = require_nondegenerate(p.g);
    if (f1 < 0.0) throw Error(kind, "no real EPs for g > 1/sqrt(2)");
    return {p.eps_d.real(), std::sqrt(f1), 1.0 - p.g * p.g};
}

}  // namespace detail

/// Gamma = -2 Im z_minus.
inline double decay_width(const ModelParams& p) {
    const double gamma = -2.0 * eigenvalues(p).first.imag();
    return gamma == 0.0 ? 0.0 : gamma;
}

/// z_plus - z_minus between the two anti-bound states, eps_bar <= |eps_d| <= eps_delta.
inline double pseudo_gap(const ModelParams& p) {
    const auto w = detail::real_window(p, ErrorKind::OutsideWindow);
    const double a = std::abs(w.eps);
    if (!(a >= w.eps_bar && a <= w.eps_delta))
        throw Error(ErrorKind::OutsideWindow, "eps_d outside the anti-bound window");
    const auto [zm, zp] = eigenvalues(p);
    return (zp - zm).real();
}

/// Impurity-to-site-x correlation through z_minus, proportional to e^{i k_minus x}
/// and normalized to 1 at x = 0.
///
/// Defined for |eps_d| < 1 - g^2, where z_minus is the resonance (|eps_d| < eps_bar)
/// or an anti-bound state (real correlations up to sign).
inline complex correlation(int x, const ModelParams& p) {
    if (x < 0) throw Error(ErrorKind::InvalidArgument, "site index must be nonnegative");
    const auto w = detail::real_window(p, ErrorKind::OutsideWindow);
    if (!(std::abs(w.eps) < w.eps_delta))
        throw Error(ErrorKind::OutsideWindow, "z_minus is not a resonance or anti-bound state here");
    if (x == 0) return 1.0;
    const complex k = wave_numbers(p).first;
    return std::exp(complex(0.0, 1.0) * k * static_cast<double>(x));
}

/// xi^{-1} = phi_res on the critical side.
inline double correlation_length_inverse(const ModelParams& p) {
    try {
        return resonance_phase(p);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::OutsideResonanceWindow) throw Error(ErrorKind::OutsideWindow, e.what());
        throw;
    }
}

inline QptObservables observables(const ModelParams& p) {
    const auto w = detail::real_window(p, ErrorKind::OutsideWindow);
    QptObservables o;
    o.gamma = decay_width(p);
    const double a = std::abs(w.eps);
    if (std::abs(lambda(p)) < 1e-14)
        o.side = TransitionSide::AtEP;
    else if (a < w.eps_bar)
        o.side = TransitionSide::Critical;
    else
        o.side = TransitionSide::NonCritical;
    if (o.side == TransitionSide::Critical) o.xi_inverse = resonance_phase(p);
    if (o.side != TransitionSide::Critical && a <= w.eps_delta) o.gap = pseudo_gap(p);
    if (o.side == TransitionSide::AtEP) o.gap = 0.0;
    return o;
}

struct CriticalExponents {
    double beta_order = 0.0;  // Gamma ~ (eps_bar - eps_d)^beta
    double z_dynamic = 0.0;   // Gamma ~ |phi_res - pi|^z
};

/// Log-log fits over eps_d in [eps_lo, eps_hi], which must lie on the critical side
/// of eps_bar_+ and span at least two decades of eps_bar_+ - eps_d.
inline CriticalExponents fit_critical_exponents(double g, double eps_lo, double eps_hi, int samples = 31) {
    if (!(g > 0.0)) throw Error(ErrorKind::InvalidArgument, "g must be positive");
    const double f1 = detail::require_nondegenerate(g);
    if (f1 < 0.0) throw Error(ErrorKind::InvalidArgument, "real EPs need g < 1/sqrt(2)");
    if (samples < 5) throw Error(ErrorKind::InsufficientSpan, "need at least 5 samples");
    const double eps_bar = std::sqrt(f1);
    if (!(eps_lo < eps_hi) || !(eps_hi < eps_bar) || !(eps_lo > 0.0))
        throw Error(ErrorKind::InsufficientSpan, "window must lie strictly inside (0, eps_bar)");
    const double d_min = eps_bar - eps_hi, d_max = eps_bar - eps_lo;
    if (std::log10(d_max / d_min) < 2.0 - 1e-9)
        throw Error(ErrorKind::InsufficientSpan, "window must span two decades of eps_bar - eps_d");
    std::vector<double> log_d, log_gamma, log_phase;
    for (int i = 0; i < samples; ++i) {
        const double t = static_cast<double>(i) / (samples - 1);
        const double d = d_min * std::pow(d_max / d_min, t);
        const ModelParams p{eps_bar - d, g};
        const double gamma = decay_width(p);
        const double phase_dev = std::abs(resonance_phase(p) - std::numbers::pi);
        log_d.push_back(std::log(d));
        log_gamma.push_back(std::log(gamma));
        log_phase.push_back(std::log(phase_dev));
    }
    return {detail::least_squares_slope(log_d, log_gamma), detail::least_squares_slope(log_phase, log_gamma)};
}

struct SlopeJump {
    double left = 0.0;   // dGamma/deps_d just below eps_bar_+
    double right = 0.0;  // just above
    double ratio = 0.0;  // |left| / |right|, infinite when right vanishes
};

/// One-sided difference quotients of Gamma on either side of eps_bar_+, using
/// the points at distances delta and 2 delta from the EP.
inline SlopeJump decay_width_slope_jump(double g, double delta) {
    if (!(delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "delta must be positive");
    const double f1 = detail::require_nondegenerate(g);
    if (f1 < 0.0) throw Error(ErrorKind::InvalidArgument, "real EPs need g < 1/sqrt(2)");
    const double eps_bar = std::sqrt(f1);
    auto gamma = [&](double eps) { return decay_width(ModelParams{eps, g}); };
    SlopeJump s;
    s.left = (gamma(eps_bar - delta) - gamma(eps_bar - 2.0 * delta)) / delta;
    s.right = (gamma(eps_bar + 2.0 * delta) - gamma(eps_bar + delta)) / delta;
    s.ratio = s.right == 0.0 ? std::numeric_limits<double>::infinity() : std::abs(s.left) / std::abs(s.right);
    return s;
}

}  // namespace epscope
