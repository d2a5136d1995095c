#pragma once

// Semi-infinite tight-binding chain (hopping -1/2, band [-1, 1]) with an
// impurity of energy eps_d attached to the end site with coupling -g/sqrt(2).
// All energies are in units of the half-bandwidth.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "epscope/errors.hpp"

namespace epscope {

using complex = std::complex<double>;

inline constexpr double prototype_F = 0.5;

struct ModelParams {
    complex eps_d{0.0, 0.0};
    double g = 0.0;
    double F = prototype_F;

    [[nodiscard]] bool is_prototype() const noexcept { return std::abs(1.0 - 2.0 * F) < 1e-14; }
    [[nodiscard]] bool has_real_eps_d() const noexcept { return eps_d.imag() == 0.0; }
};

inline void validate(const ModelParams& p) {
    if (!(p.g >= 0.0) || !std::isfinite(p.g))
        throw Error(ErrorKind::InvalidArgument, "coupling g must be finite and nonnegative");
    if (!std::isfinite(p.eps_d.real()) || !std::isfinite(p.eps_d.imag()) || !std::isfinite(p.F))
        throw Error(ErrorKind::InvalidArgument, "model parameters must be finite");
}

inline void require_prototype(const ModelParams& p) {
    validate(p);
    if (!p.is_prototype())
        throw Error(ErrorKind::InvalidArgument, "operation requires the prototype F = 1/2");
}

enum class RiemannSheet { First, Second };

/// Root selector: Minus/Plus in the closed forms, or decaying/growing wave number in k_of_z.
enum class Branch { Minus, Plus };

constexpr const char* to_string(RiemannSheet s) noexcept { return s == RiemannSheet::First ? "I" : "II"; }
constexpr const char* to_string(Branch b) noexcept { return b == Branch::Minus ? "minus" : "plus"; }

constexpr RiemannSheet other(RiemannSheet s) noexcept {
    return s == RiemannSheet::First ? RiemannSheet::Second : RiemannSheet::First;
}

/// Unperturbed chain dispersion eps_k = -cos k.
inline complex chain_dispersion(complex k) { return -std::cos(k); }

/// sqrt(z^2 - 1) with its cut on the real segment [-1, 1].
///
/// Behaves like z at infinity: positive for real z > 1, negative for real z < -1.
/// Real inputs inside (-1, 1) resolve to the limit from Im z -> 0+.
inline complex branch_sqrt(complex z) {
    if (z.imag() == 0.0) z = {z.real(), 0.0};  // drop a negative zero
    return std::sqrt(z - 1.0) * std::sqrt(z + 1.0);
}

namespace detail {

/// The pair (z - sqrt(z^2-1), z + sqrt(z^2-1)). Their product is 1, so the
/// smaller one is formed by division to avoid cancellation at large |z|.
inline std::pair<complex, complex> root_pair(complex z) {
    const complex s = branch_sqrt(z);
    complex minus = z - s;
    complex plus = z + s;
    if (std::abs(minus) <= std::abs(plus))
        minus = 1.0 / plus;
    else
        plus = 1.0 / minus;
    return {minus, plus};
}

inline double wrap_phase(double re) {
    constexpr double pi = std::numbers::pi;
    re = std::remainder(re, 2.0 * pi);
    if (re <= -pi) re += 2.0 * pi;
    if (re == 0.0) re = 0.0;  // -0 -> +0
    return re;
}

}  // namespace detail

/// Sign attached to the branch-cut root on each sheet: Sigma = g^2 (z - sign * sqrt(z^2-1)).
constexpr double sheet_sign(RiemannSheet s) noexcept { return s == RiemannSheet::First ? 1.0 : -1.0; }

/// Self-energy of the semi-infinite chain seen from the impurity.
///
/// First sheet: g^2 (z - sqrt(z^2-1)), which vanishes at infinity.
/// Second sheet: g^2 (z + sqrt(z^2-1)).
inline complex self_energy(complex z, RiemannSheet sheet, double g) {
    const auto [minus, plus] = detail::root_pair(z);
    return g * g * (sheet == RiemannSheet::First ? minus : plus);
}

/// dSigma/dz on the requested sheet.
inline complex self_energy_derivative(complex z, RiemannSheet sheet, double g, double tol = 1e-12) {
    if (std::abs(z - 1.0) < tol || std::abs(z + 1.0) < tol)
        throw Error(ErrorKind::BranchPointSingularity, "self-energy derivative requested at a band edge");
    return g * g * (1.0 - sheet_sign(sheet) * z / branch_sqrt(z));
}

/// The sign q for which Sigma'(z) = g^2 (1 - z / (q * principal_sqrt(z^2 - 1))) on `sheet`.
inline Branch q_sign(complex z, RiemannSheet sheet) {
    const complex ratio = sheet_sign(sheet) * branch_sqrt(z) / std::sqrt(z * z - 1.0);
    return ratio.real() >= 0.0 ? Branch::Plus : Branch::Minus;
}

/// Wave number k with -cos k = z, Re k wrapped into (-pi, pi].
///
/// Minus picks the root with |e^{ik}| <= 1 (decaying, first sheet);
/// Plus picks its reciprocal partner (growing, second sheet).
inline complex k_of_z(complex z, Branch branch) {
    const auto [minus, plus] = detail::root_pair(z);
    // e^{-ik} = -(z + s) for Minus, -(z - s) for Plus
    const complex u = branch == Branch::Minus ? -plus : -minus;
    const complex k = complex(0.0, 1.0) * std::log(u);
    return {detail::wrap_phase(k.real()), k.imag()};
}

/// k from e^{-ik} = u, i.e. k = i log u, with Re k wrapped into (-pi, pi].
inline complex k_from_inverse_phase(complex u) {
    const complex k = complex(0.0, 1.0) * std::log(u);
    return {detail::wrap_phase(k.real()), k.imag()};
}

/// Real symmetric tridiagonal matrix stored by its two bands.
struct SymmetricTridiagonal {
    std::vector<double> diagonal;
    std::vector<double> off_diagonal;  // size() - 1 entries

    [[nodiscard]] std::size_t size() const noexcept { return diagonal.size(); }

    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const {
        if (i == j) return diagonal.at(i);
        if (i + 1 == j) return off_diagonal.at(i);
        if (j + 1 == i) return off_diagonal.at(j);
        return 0.0;
    }

    /// Row-major dense copy.
    [[nodiscard]] std::vector<double> dense() const {
        const std::size_t n = size();
        std::vector<double> out(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            out[i * n + i] = diagonal[i];
            if (i + 1 < n) out[i * n + i + 1] = out[(i + 1) * n + i] = off_diagonal[i];
        }
        return out;
    }
};

/// Hamiltonian of the impurity plus an N-site chain. Index 0 is the impurity, index n the chain site n.
inline SymmetricTridiagonal finite_chain_matrix(std::size_t n_sites, const ModelParams& params) {
    require_prototype(params);
    if (n_sites < 2) throw Error(ErrorKind::InvalidArgument, "finite chain needs at least 2 sites");
    if (!params.has_real_eps_d())
        throw Error(ErrorKind::InvalidArgument, "finite chain oracle requires a real impurity energy");
    SymmetricTridiagonal h;
    h.diagonal.assign(n_sites + 1, 0.0);
    h.diagonal[0] = params.eps_d.real();
    h.off_diagonal.assign(n_sites, -0.5);
    h.off_diagonal[0] = -params.g / std::numbers::sqrt2;
    return h;
}

/// Number of eigenvalues strictly below x (Sturm sequence of the LDL^T pivots).
inline std::size_t sturm_count(const SymmetricTridiagonal& h, double x) {
    constexpr double tiny = std::numeric_limits<double>::min();
    std::size_t count = 0;
    double pivot = h.diagonal[0] - x;
    if (pivot == 0.0) pivot = -tiny;
    if (pivot < 0.0) ++count;
    for (std::size_t i = 1; i < h.size(); ++i) {
        const double e = h.off_diagonal[i - 1];
        pivot = (h.diagonal[i] - x) - e * e / pivot;
        if (pivot == 0.0) pivot = -tiny;
        if (pivot < 0.0) ++count;
    }
    return count;
}

/// The `index`-th largest eigenvalue (0 = largest) by bisection on the Sturm count.
inline double eigenvalue_descending(const SymmetricTridiagonal& h, std::size_t index) {
    const std::size_t n = h.size();
    if (index >= n) throw Error(ErrorKind::InvalidArgument, "eigenvalue index out of range");
    double lo = std::numeric_limits<double>::max();
    double hi = std::numeric_limits<double>::lowest();
    for (std::size_t i = 0; i < n; ++i) {
        double radius = 0.0;
        if (i > 0) radius += std::abs(h.off_diagonal[i - 1]);
        if (i + 1 < n) radius += std::abs(h.off_diagonal[i]);
        lo = std::min(lo, h.diagonal[i] - radius);
        hi = std::max(hi, h.diagonal[i] + radius);
    }
    // want the eigenvalue with exactly n - 1 - index eigenvalues below it
    const std::size_t below = n - 1 - index;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (sturm_count(h, mid) > below)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

inline double largest_eigenvalue(const SymmetricTridiagonal& h) { return eigenvalue_descending(h, 0); }

/// Largest residual of the bulk chain recursion for psi(x) = C e^{ikx}, C = psi(1) e^{-ik}, psi(1) = 1,
/// over sites 2..x_max. Each site's residual is measured relative to max(1, local amplitude) so that
/// growing (second-sheet) waves are held to the same standard as decaying ones.
inline double verify_chain_recursion(complex k, int x_max) {
    if (x_max < 3) throw Error(ErrorKind::InvalidArgument, "x_max must be at least 3");
    const complex i{0.0, 1.0};
    const complex c = std::exp(-i * k);
    auto psi = [&](int x) { return c * std::exp(i * k * static_cast<double>(x)); };
    const complex eps_k = chain_dispersion(k);
    double worst = 0.0;
    for (int x = 2; x <= x_max; ++x) {
        const complex left = psi(x - 1), mid = psi(x), right = psi(x + 1);
        const double scale = std::max({1.0, std::abs(left), std::abs(mid), std::abs(right)});
        worst = std::max(worst, std::abs(-0.5 * (left + right) - eps_k * mid) / scale);
    }
    return worst;
}

}  // namespace epscope
