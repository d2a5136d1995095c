#pragma once

// Exceptional points: closed forms for the chain model and a Newton locator
// for any self-energy that can report its value and first derivative.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <concepts>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "epscope/errors.hpp"
#include "epscope/model.hpp"
#include "epscope/spectrum.hpp"

namespace epscope {

/// A self-energy usable by the locator. Branch points are the points the
/// iteration (and contour checks) must keep away from.
template <class S>
concept SelfEnergyModel = requires(const S& s, complex z, RiemannSheet sheet) {
    { s.value(z, sheet) } -> std::convertible_to<complex>;
    { s.derivative(z, sheet) } -> std::convertible_to<complex>;
    { s.branch_points() } -> std::convertible_to<std::vector<complex>>;
};

/// The chain self-energy g^2 (z -/+ sqrt(z^2 - 1)) as a SelfEnergyModel.
struct ChainSelfEnergy {
    double g = 0.0;

    [[nodiscard]] complex value(complex z, RiemannSheet sheet) const { return self_energy(z, sheet, g); }
    [[nodiscard]] complex derivative(complex z, RiemannSheet sheet) const {
        return self_energy_derivative(z, sheet, g, 0.0);
    }
    [[nodiscard]] std::vector<complex> branch_points() const { return {complex(1.0), complex(-1.0)}; }
};

struct EpRecord {
    complex eps_bar;             // impurity energy at the EP
    complex z_center;            // coalescence energy
    int period = 0;              // 0 until filled in by the winding count
    Branch sign_q = Branch::Plus;
    RiemannSheet sheet = RiemannSheet::Second;
    std::string factor_id = "f2";
    int iterations = 0;
    double residual = 0.0;  // |Sigma'(z_center) - 1|
};

struct Discriminant {
    complex value;
    double f1 = 0.0;   // 1 - 2 g^2
    complex f2;        // eps_d^2 - (1 - 2 g^2), the same quantity as lambda
    double prefactor = 0.0;  // -4 g^4
};

/// D(eps_d; g) = -4 g^4 (1 - 2 g^2)(eps_d^2 - (1 - 2 g^2)).
inline Discriminant discriminant(const ModelParams& p) {
    require_prototype(p);
    Discriminant d;
    d.f1 = coupling_factor(p.g);
    d.f2 = lambda(p);
    d.prefactor = -4.0 * std::pow(p.g, 4);
    d.value = d.prefactor * d.f1 * d.f2;
    return d;
}

/// Centers (z_c^+, z_c^-) = +/-(1 - g^2)/sqrt(1 - 2 g^2).
inline std::pair<double, double> centers_closed_form(double g) {
    if (!(g >= 0.0)) throw Error(ErrorKind::InvalidArgument, "coupling g must be nonnegative");
    const double f1 = detail::require_nondegenerate(g);
    if (f1 < 0.0) throw Error(ErrorKind::InvalidArgument, "real centers need g < 1/sqrt(2)");
    const double c = (1.0 - g * g) / std::sqrt(f1);
    return {c, -c};
}

struct EpLocations {
    complex plus;
    complex minus;
    bool real = true;
};

/// eps_bar = +/- sqrt(1 - 2 g^2); imaginary when g > 1/sqrt(2).
inline EpLocations ep_locations_closed_form(double g) {
    const Thresholds t = thresholds(g);
    return {t.eps_bar_plus, t.eps_bar_minus, t.reality != EpReality::Imaginary};
}

/// EpRecord for the chain model from the closed forms.
inline EpRecord ep_record_closed_form(double g, Branch side) {
    const auto [cp, cm] = centers_closed_form(g);
    const auto eps = ep_locations_closed_form(g);
    EpRecord r;
    r.z_center = side == Branch::Plus ? cp : cm;
    r.eps_bar = side == Branch::Plus ? eps.plus : eps.minus;
    r.sheet = RiemannSheet::Second;
    r.sign_q = q_sign(r.z_center, r.sheet);
    r.residual = std::abs(self_energy_derivative(r.z_center, r.sheet, g) - 1.0);
    return r;
}

namespace detail {

/// f'(z) from the trapezoid rule on a small circle (Cauchy's integral formula).
template <class F>
complex circle_derivative(F&& f, complex z, double radius, int points = 16) {
    complex acc = 0.0;
    for (int j = 0; j < points; ++j) {
        const complex w = std::polar(1.0, 2.0 * std::numbers::pi * j / points);
        acc += f(z + radius * w) / w;
    }
    return acc / (radius * static_cast<double>(points));
}

inline double distance_to(const std::vector<complex>& points, complex z) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& p : points) d = std::min(d, std::abs(z - p));
    return d;
}

enum class NewtonOutcome { Converged, Failed, HitBranchPoint };

struct NewtonResult {
    NewtonOutcome outcome = NewtonOutcome::Failed;
    complex z;
    int iterations = 0;
    double residual = 0.0;
};

template <SelfEnergyModel S>
NewtonResult center_newton(const S& sigma, RiemannSheet sheet, complex z, double tol, int max_iter) {
    constexpr double branch_guard = 1e-8;
    const std::vector<complex> bps = sigma.branch_points();
    auto h = [&](complex w) { return sigma.derivative(w, sheet) - 1.0; };
    NewtonResult res;
    if (distance_to(bps, z) < branch_guard) {
        res.outcome = NewtonOutcome::HitBranchPoint;
        return res;
    }
    complex hz = h(z);
    for (int it = 0; it < max_iter; ++it) {
        res.iterations = it;
        res.residual = std::abs(hz);
        if (std::isfinite(res.residual) && res.residual < tol) {
            res.outcome = NewtonOutcome::Converged;
            res.z = z;
            return res;
        }
        const double radius = std::min(1e-3, 0.25 * distance_to(bps, z));
        const complex dh = detail::circle_derivative(h, z, radius);
        if (dh == 0.0 || !std::isfinite(std::abs(dh))) return res;
        const complex step = hz / dh;
        // backtrack until |h| decreases
        double t = 1.0;
        bool accepted = false;
        for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
            const complex trial = z - t * step;
            if (distance_to(bps, trial) < branch_guard) continue;
            const complex ht = h(trial);
            if (std::isfinite(std::abs(ht)) && std::abs(ht) < std::abs(hz)) {
                z = trial;
                hz = ht;
                accepted = true;
                break;
            }
        }
        if (!accepted) return res;
        if (distance_to(bps, z) < branch_guard) {
            res.outcome = NewtonOutcome::HitBranchPoint;
            return res;
        }
    }
    res.iterations = max_iter;
    res.residual = std::abs(hz);
    if (res.residual < tol) {
        res.outcome = NewtonOutcome::Converged;
        res.z = z;
    }
    return res;
}

}  // namespace detail

/// Finds a center z_c with Sigma'(z_c) = 1 by safeguarded Newton iteration and
/// back-substitutes eps_bar = z_c - Sigma(z_c).
///
/// The requested sheet is tried first. If the center condition has no solution
/// there the other sheet (the opposite sign q in front of the root) is tried, and
/// the record reports the sheet on which the pair actually coalesces.
template <SelfEnergyModel S>
EpRecord locate_ep_numeric(const S& sigma, RiemannSheet sheet, complex z_guess, double tol = 1e-12,
                           int max_iter = 100) {
    if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");
    bool hit_branch = false;
    for (const RiemannSheet candidate : {sheet, other(sheet)}) {
        const auto res = detail::center_newton(sigma, candidate, z_guess, tol, max_iter);
        if (res.outcome == detail::NewtonOutcome::HitBranchPoint) hit_branch = true;
        if (res.outcome != detail::NewtonOutcome::Converged) continue;

        // consistency check: of the two back-substituted candidates, keep the
        // sheet whose dispersion has a double root at z_c
        const double on_this = std::abs(sigma.derivative(res.z, candidate) - 1.0);
        const double on_other = std::abs(sigma.derivative(res.z, other(candidate)) - 1.0);
        const RiemannSheet chosen = on_this <= on_other ? candidate : other(candidate);

        EpRecord r;
        r.z_center = res.z;
        r.sheet = chosen;
        r.eps_bar = res.z - sigma.value(res.z, chosen);
        r.sign_q = q_sign(res.z, chosen);
        r.iterations = res.iterations;
        r.residual = std::min(on_this, on_other);
        return r;
    }
    if (hit_branch)
        throw Error(ErrorKind::BranchPointSingularity, "Newton iterates reached a branch point");
    throw Error(ErrorKind::NoConvergence, "center condition Sigma'(z) = 1 not satisfied within max_iter");
}

/// Analytic eps_d-derivative (dz_minus, dz_plus) of the closed-form eigenvalues.
inline std::pair<complex, complex> eigenvalue_derivative(const ModelParams& p) {
    require_prototype(p);
    const double f1 = detail::require_nondegenerate(p.g);
    const complex lam = lambda(p);
    if (std::abs(lam) < 1e-14) throw Error(ErrorKind::AtExceptionalPoint, "eigenvalue derivative diverges at the EP");
    const double g2 = p.g * p.g;
    const double regular = (1.0 - g2) / f1;
    const complex singular = g2 * p.eps_d / (f1 * std::sqrt(lam));
    return {regular - singular, regular + singular};
}

/// The same derivative from the dispersion relation: dz/deps_d = 1 / (1 - Sigma'(z)) on the sheet of z.
inline std::pair<complex, complex> eigenvalue_derivative_from_self_energy(const ModelParams& p) {
    if (std::abs(lambda(p)) < 1e-14) throw Error(ErrorKind::AtExceptionalPoint, "eigenvalue derivative diverges at the EP");
    const auto pts = spectrum(p);
    auto one = [&](const SpectralPoint& s) { return 1.0 / (1.0 - self_energy_derivative(s.z, s.sheet, p.g)); };
    return {one(pts[0]), one(pts[1])};
}

}  // namespace epscope
