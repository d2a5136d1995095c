#pragma once

// Closed-form discrete spectrum of the chain-with-impurity model.

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "epscope/errors.hpp"
#include "epscope/model.hpp"
#include "epscope/parallel.hpp"

namespace epscope {

enum class StateLabel { Bound, AntiBound, Resonance, AntiResonance, BandEdge, Continuum };

constexpr const char* to_string(StateLabel l) noexcept {
    switch (l) {
        case StateLabel::Bound: return "bound";
        case StateLabel::AntiBound: return "anti-bound";
        case StateLabel::Resonance: return "resonance";
        case StateLabel::AntiResonance: return "anti-resonance";
        case StateLabel::BandEdge: return "band-edge";
        case StateLabel::Continuum: return "continuum";
    }
    return "?";
}

struct SpectralPoint {
    complex z;
    complex k;
    RiemannSheet sheet = RiemannSheet::First;
    StateLabel label = StateLabel::Continuum;
    Branch branch = Branch::Minus;
};

/// 1 - 2 g^2; vanishes at the special coupling g = 1/sqrt(2).
constexpr double coupling_factor(double g) noexcept { return 1.0 - 2.0 * g * g; }

/// lambda = eps_d^2 - (1 - 2 g^2), the discriminant factor that vanishes at the EPs.
/// A negative-zero imaginary part (negative real eps_d) is dropped so the
/// principal root stays on the upper side of the cut for every real eps_d.
inline complex lambda(const ModelParams& p) {
    complex lam = p.eps_d * p.eps_d - coupling_factor(p.g);
    if (lam.imag() == 0.0) lam = {lam.real(), 0.0};
    return lam;
}

inline constexpr double degenerate_coupling_tol = 1e-12;
inline constexpr double default_classify_tol = 1e-9;

namespace detail {
inline double require_nondegenerate(double g) {
    const double f1 = coupling_factor(g);
    if (std::abs(f1) < degenerate_coupling_tol)
        throw Error(ErrorKind::DegenerateCoupling, "g = 1/sqrt(2) makes the closed form singular");
    return f1;
}
}  // namespace detail

/// The two roots (z_minus, z_plus) of z - eps_d = Sigma(z), principal sqrt of lambda.
inline std::pair<complex, complex> eigenvalues(const ModelParams& p) {
    require_prototype(p);
    const double f1 = detail::require_nondegenerate(p.g);
    const double g2 = p.g * p.g;
    const complex center = p.eps_d * (1.0 - g2) / f1;
    const complex split = g2 * std::sqrt(lambda(p)) / f1;
    return {center - split, center + split};
}

/// (k_minus, k_plus) with k = i log(-eps_d -/+ sqrt(lambda)), so that -cos k = z.
inline std::pair<complex, complex> wave_numbers(const ModelParams& p) {
    require_prototype(p);
    detail::require_nondegenerate(p.g);
    const complex root = std::sqrt(lambda(p));
    return {k_from_inverse_phase(-p.eps_d - root), k_from_inverse_phase(-p.eps_d + root)};
}

/// |z - eps_d - Sigma_sheet(z)|.
inline double dispersion_residual(complex z, const ModelParams& p, RiemannSheet sheet) {
    return std::abs(z - p.eps_d - self_energy(z, sheet, p.g));
}

/// Sheet on which z solves the dispersion equation; ties (band edges, g = 0) go by the sign of Im k.
inline RiemannSheet assign_sheet(complex z, complex k, const ModelParams& p) {
    const double r1 = dispersion_residual(z, p, RiemannSheet::First);
    const double r2 = dispersion_residual(z, p, RiemannSheet::Second);
    const double tie = 1e-13 * (1.0 + std::abs(z));
    if (std::abs(r1 - r2) <= tie) return k.imag() >= 0.0 ? RiemannSheet::First : RiemannSheet::Second;
    return r1 < r2 ? RiemannSheet::First : RiemannSheet::Second;
}

/// Label from the energy and wave number. In-band real energies with real k
/// (only reachable at g = 0) are reported as Continuum.
inline StateLabel classify(complex z, complex k, double tol = default_classify_tol) {
    if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "classification tolerance must be positive");
    if (std::abs(z - 1.0) < tol || std::abs(z + 1.0) < tol) return StateLabel::BandEdge;
    if (z.imag() < -tol) return StateLabel::Resonance;
    if (z.imag() > tol) return StateLabel::AntiResonance;
    if (k.imag() > tol) return StateLabel::Bound;
    if (k.imag() < -tol) return StateLabel::AntiBound;
    return StateLabel::Continuum;
}

inline StateLabel classify(const SpectralPoint& point, double tol = default_classify_tol) {
    return classify(point.z, point.k, tol);
}

/// Both discrete solutions with sheet and label attached: {minus, plus}.
inline std::array<SpectralPoint, 2> spectrum(const ModelParams& p, double tol = default_classify_tol) {
    const auto [zm, zp] = eigenvalues(p);
    const auto [km, kp] = wave_numbers(p);
    std::array<SpectralPoint, 2> out;
    out[0] = {zm, km, assign_sheet(zm, km, p), classify(zm, km, tol), Branch::Minus};
    out[1] = {zp, kp, assign_sheet(zp, kp, p), classify(zp, kp, tol), Branch::Plus};
    return out;
}

enum class EpReality { Real, Imaginary, Degenerate };

struct Thresholds {
    double eps_delta_plus = 0.0;   // +(1 - g^2): bound state reaches the band edge z = 1
    double eps_delta_minus = 0.0;  // -(1 - g^2)
    complex eps_bar_plus;          // +sqrt(1 - 2 g^2): exceptional point
    complex eps_bar_minus;
    EpReality reality = EpReality::Real;
};

inline Thresholds thresholds(double g) {
    if (!(g >= 0.0)) throw Error(ErrorKind::InvalidArgument, "coupling g must be nonnegative");
    const double f1 = coupling_factor(g);
    Thresholds t;
    t.eps_delta_plus = 1.0 - g * g;
    t.eps_delta_minus = -t.eps_delta_plus;
    t.eps_bar_plus = std::sqrt(complex(f1, 0.0));
    t.eps_bar_minus = -t.eps_bar_plus;
    t.reality = std::abs(f1) < 1e-14 ? EpReality::Degenerate : (f1 > 0.0 ? EpReality::Real : EpReality::Imaginary);
    if (t.reality == EpReality::Degenerate) t.eps_bar_plus = t.eps_bar_minus = 0.0;
    return t;
}

/// Re k_minus inside the resonance window |eps_d| < sqrt(1 - 2 g^2); lies in (0, pi).
///
/// Taken directly from the wave number with the principal logarithm; the
/// arctan form agrees with it for eps_d > 0.
inline double resonance_phase(const ModelParams& p) {
    require_prototype(p);
    if (!p.has_real_eps_d())
        throw Error(ErrorKind::OutsideResonanceWindow, "resonance phase needs a real impurity energy");
    const double f1 = detail::require_nondegenerate(p.g);
    if (f1 < 0.0) throw Error(ErrorKind::OutsideResonanceWindow, "no real EPs for g > 1/sqrt(2)");
    const double eps = p.eps_d.real();
    if (!(std::abs(eps) < std::sqrt(f1)))
        throw Error(ErrorKind::OutsideResonanceWindow, "eps_d outside (eps_bar_minus, eps_bar_plus)");
    return wave_numbers(p).first.real();
}

/// Imaginary part of the resonance wave number, log sqrt(1 - 2 g^2).
inline double resonance_decay_rate(double g) { return std::log(std::sqrt(coupling_factor(g))); }

struct SweepRow {
    double eps_d = 0.0;
    std::optional<std::array<SpectralPoint, 2>> points;
    std::optional<ErrorKind> error;
    std::string message;
};

/// Spectrum along a grid of real impurity energies at fixed g, in grid order.
/// Per-point failures are recorded in the row rather than thrown.
inline std::vector<SweepRow> sweep(double g, std::span<const double> grid, unsigned threads = 1,
                                   double tol = default_classify_tol) {
    return parallel_map(
        grid.size(),
        [&](std::size_t i) {
            SweepRow row;
            row.eps_d = grid[i];
            try {
                row.points = spectrum(ModelParams{grid[i], g}, tol);
            } catch (const Error& e) {
                row.error = e.kind();
                row.message = e.what();
            }
            return row;
        },
        threads);
}

}  // namespace epscope
