#pragma once

// Cycle structure near EPs: contour winding counts and adiabatic encirclement.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "epscope/eplocator.hpp"
#include "epscope/errors.hpp"
#include "epscope/model.hpp"
#include "epscope/spectrum.hpp"

namespace epscope {

struct ContourSpec {
    complex center;
    double radius = 0.05;
    RiemannSheet sheet = RiemannSheet::First;
    int points = 2048;
};

struct WindingResult {
    int period = 0;
    double residual = 0.0;   // |W - period| of the quadrature value
    complex quadrature;      // W = (1/2 pi i) closed integral of D'/D
    int argument_count = 0;  // winding from the unwrapped argument of D
};

/// Winding number of a function D around a circle, by the trapezoid rule on
/// D'/D and, independently, by unwrapping arg D along the ordered contour points.
template <class Fn, class DFn>
WindingResult winding_number(Fn&& d, DFn&& d_prime, complex center, double radius, int points) {
    if (!(radius > 0.0) || points < 8) throw Error(ErrorKind::InvalidArgument, "contour needs radius > 0 and >= 8 points");
    complex w = 0.0;
    double total_arg = 0.0;
    complex first_value = 0.0, previous = 0.0;
    for (int j = 0; j < points; ++j) {
        const complex e = std::polar(1.0, 2.0 * std::numbers::pi * j / points);
        const complex z = center + radius * e;
        const complex value = d(z);
        if (value == 0.0 || !std::isfinite(std::abs(value)))
            throw Error(ErrorKind::ContourTooLarge, "contour passes through a zero or singularity");
        w += d_prime(z) / value * (radius * e);
        if (j == 0)
            first_value = value;
        else
            total_arg += std::arg(value / previous);
        previous = value;
    }
    total_arg += std::arg(first_value / previous);
    WindingResult r;
    r.quadrature = w / static_cast<double>(points);
    r.period = static_cast<int>(std::lround(r.quadrature.real()));
    r.residual = std::abs(r.quadrature - static_cast<double>(r.period));
    r.argument_count = static_cast<int>(std::lround(total_arg / (2.0 * std::numbers::pi)));
    if (r.residual > 0.1 || r.argument_count != r.period)
        throw Error(ErrorKind::NonIntegerWinding, "winding quadrature did not settle on an integer");
    return r;
}

/// Number of solutions of z - eps_d = Sigma_sheet(z) inside the contour, counted with
/// multiplicity: the period p when the contour surrounds an EP center.
///
/// This is the winding of the denominator z - eps_d - Sigma(z) of <d|G|d>; the winding
/// of log <d|G|d> itself is the negative of it.
inline WindingResult winding_period(const ContourSpec& c, const ModelParams& p) {
    require_prototype(p);
    if (!(c.radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "contour radius must be positive");
    for (const double edge : {1.0, -1.0})
        if (std::abs(c.center - edge) <= c.radius)
            throw Error(ErrorKind::ContourTooLarge, "contour encloses or touches a branch point");
    if (std::abs(coupling_factor(p.g)) >= degenerate_coupling_tol) {
        const auto [zm, zp] = eigenvalues(p);
        for (const complex z : {zm, zp}) {
            if (dispersion_residual(z, p, c.sheet) > 1e-8 * (1.0 + std::abs(z))) continue;  // other sheet
            const double dist = std::abs(z - c.center);
            if (dist >= 0.5 * c.radius && dist <= c.radius * (1.0 + 1e-3))
                throw Error(ErrorKind::ContourTooLarge, "contour reaches an eigenvalue away from its center");
        }
    }
    auto d = [&](complex z) { return z - p.eps_d - self_energy(z, c.sheet, p.g); };
    auto dd = [&](complex z) { return 1.0 - self_energy_derivative(z, c.sheet, p.g, 0.0); };
    return winding_number(d, dd, c.center, c.radius, c.points);
}

enum class Permutation { Identity, Swap };

constexpr const char* to_string(Permutation p) noexcept { return p == Permutation::Identity ? "identity" : "swap"; }

struct EncircleResult {
    Permutation permutation = Permutation::Identity;
    int loops_to_identity = 1;  // order of the permutation
    std::vector<std::array<complex, 2>> tracks;  // (track started at z_minus, track started at z_plus)
    std::vector<complex> path;                   // eps_d along the loop
};

/// Follows both closed-form eigenvalues along eps_d(theta), theta in [0, 2 pi loops],
/// matching each step to the previous by nearest neighbour.
inline EncircleResult track_eigenvalues(double g, const std::function<complex(double)>& eps_of_theta, int steps,
                                        int loops = 1) {
    if (steps < 64) throw Error(ErrorKind::InvalidArgument, "encirclement needs at least 64 steps per loop");
    if (loops < 1) throw Error(ErrorKind::InvalidArgument, "loops must be positive");
    constexpr double ambiguity = 1e-12;
    EncircleResult r;
    const int total = steps * loops;
    r.tracks.reserve(static_cast<std::size_t>(total + 1));
    r.path.reserve(static_cast<std::size_t>(total + 1));
    const complex eps0 = eps_of_theta(0.0);
    const auto [zm0, zp0] = eigenvalues(ModelParams{eps0, g});
    std::array<complex, 2> current{zm0, zp0};
    r.tracks.push_back(current);
    r.path.push_back(eps0);
    for (int j = 1; j <= total; ++j) {
        const double theta = 2.0 * std::numbers::pi * j / steps;
        const complex eps = eps_of_theta(theta);
        const auto [a, b] = eigenvalues(ModelParams{eps, g});
        const double keep = std::abs(a - current[0]) + std::abs(b - current[1]);
        const double swap = std::abs(b - current[0]) + std::abs(a - current[1]);
        if (std::abs(keep - swap) < ambiguity)
            throw Error(ErrorKind::TrackingAmbiguity, "eigenvalue tracks collide");
        current = keep < swap ? std::array<complex, 2>{a, b} : std::array<complex, 2>{b, a};
        r.tracks.push_back(current);
        r.path.push_back(eps);
    }
    const double stay = std::abs(current[0] - zm0) + std::abs(current[1] - zp0);
    const double cross = std::abs(current[0] - zp0) + std::abs(current[1] - zm0);
    if (std::abs(stay - cross) < ambiguity) throw Error(ErrorKind::TrackingAmbiguity, "cannot resolve final matching");
    r.permutation = stay < cross ? Permutation::Identity : Permutation::Swap;
    r.loops_to_identity = r.permutation == Permutation::Identity ? 1 : 2;
    return r;
}

/// Loops eps_d around the EP via eps_d(theta)^2 = 1 - 2 g^2 + delta e^{i theta}
/// (principal root; negated for the EP on the negative axis).
///
/// The principal root only traces a closed loop while delta < 1 - 2 g^2.
inline EncircleResult encircle_ep(double g, double delta, int steps, int loops = 1, Branch side = Branch::Plus) {
    if (!(g >= 0.0)) throw Error(ErrorKind::InvalidArgument, "coupling g must be nonnegative");
    const double f1 = detail::require_nondegenerate(g);
    if (f1 < 0.0) throw Error(ErrorKind::InvalidArgument, "encirclement of real EPs needs g < 1/sqrt(2)");
    if (!(delta > 0.0) || !(delta < f1))
        throw Error(ErrorKind::InvalidArgument, "delta must lie in (0, 1 - 2 g^2)");
    const double sign = side == Branch::Plus ? 1.0 : -1.0;
    return track_eigenvalues(
        g, [=](double theta) { return sign * std::sqrt(f1 + delta * std::polar(1.0, theta)); }, steps, loops);
}

/// Loops eps_d on a circle that need not contain an EP.
inline EncircleResult encircle_point(double g, complex center, double radius, int steps, int loops = 1) {
    if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "radius must be positive");
    return track_eigenvalues(
        g, [=](double theta) { return center + radius * std::polar(1.0, theta); }, steps, loops);
}

struct Cycle {
    std::vector<Branch> members;
    int period = 0;
};

/// The cycle formed at an EP, read off one encirclement of it.
inline Cycle cycle_at(const EpRecord& ep, const ModelParams& params, int steps = 400) {
    require_prototype(params);
    const double f1 = coupling_factor(params.g);
    if (!(f1 > 0.0)) throw Error(ErrorKind::InvalidArgument, "real EPs need g < 1/sqrt(2)");
    const Branch side = ep.eps_bar.real() >= 0.0 ? Branch::Plus : Branch::Minus;
    const auto result = encircle_ep(params.g, 0.25 * f1, steps, 1, side);
    Cycle c;
    if (result.permutation == Permutation::Swap)
        c.members = {Branch::Minus, Branch::Plus};
    else
        c.members = {Branch::Minus};
    c.period = static_cast<int>(c.members.size());
    return c;
}

}  // namespace epscope
