#pragma once

// Effective Hamiltonian of the impurity sector, the polynomial in w = e^{ik}
// that it produces, and solution/EP counting for leads with quadratic dispersion.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "epscope/errors.hpp"
#include "epscope/model.hpp"

namespace epscope {

struct SystemShape {
    std::uint64_t n_discrete = 1;
    std::uint64_t n_continua = 1;
};

inline void validate(const SystemShape& s) {
    if (s.n_discrete + s.n_continua < 1) throw Error(ErrorKind::InvalidArgument, "shape needs n_D + n_C >= 1");
    if (s.n_continua > 40) throw Error(ErrorKind::InvalidArgument, "n_C too large to count in 64 bits");
}

/// 2^{n_C} (n_D + n_C).
inline std::uint64_t n_solutions(const SystemShape& s) {
    validate(s);
    return (std::uint64_t{1} << s.n_continua) * (s.n_discrete + s.n_continua);
}

/// n (n - 1): EPs of a closed Hamiltonian of dimension n.
inline std::uint64_t n_eps_closed(std::uint64_t n) {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be at least 1");
    return n * (n - 1);
}

/// N (N - 1) with N = n_solutions(shape).
inline std::uint64_t n_eps_open(const SystemShape& s) { return n_eps_closed(n_solutions(s)); }

/// True when F removes the two extra solutions (F = 1/2).
inline bool degenerate_reduction_check(double F) { return std::abs(1.0 - 2.0 * F) < 1e-14; }

/// 2x2 energy-dependent Hamiltonian [[eps_d, -g/sqrt2], [-g/sqrt2, -F e^{ik}]].
struct EffectiveHamiltonian2x2 {
    std::array<complex, 4> entries{};  // row-major

    [[nodiscard]] complex operator()(int i, int j) const { return entries[static_cast<std::size_t>(2 * i + j)]; }

    /// det(z - H).
    [[nodiscard]] complex secular(complex z) const {
        return (z - (*this)(0, 0)) * (z - (*this)(1, 1)) - (*this)(0, 1) * (*this)(1, 0);
    }
};

inline EffectiveHamiltonian2x2 effective_hamiltonian_k(const ModelParams& p, complex k) {
    validate(p);
    const complex w = std::exp(complex(0.0, 1.0) * k);
    const double off = -p.g / std::numbers::sqrt2;
    return {{p.eps_d, off, off, -p.F * w}};
}

/// H_eff at energy z, with e^{ik} taken on the given sheet: the decaying root
/// e^{ik} = -(z - sqrt(z^2-1)) on the first sheet, its reciprocal on the second.
inline EffectiveHamiltonian2x2 effective_hamiltonian(const ModelParams& p, complex z, RiemannSheet sheet) {
    validate(p);
    const auto [minus, plus] = detail::root_pair(z);
    const complex w = sheet == RiemannSheet::First ? -minus : -plus;
    const double off = -p.g / std::numbers::sqrt2;
    return {{p.eps_d, off, off, -p.F * w}};
}

inline constexpr double trim_tol = 1e-14;

struct WPolynomial {
    std::vector<complex> coefficients;  // ascending powers of w, trailing zeros trimmed
    int degree = 0;
    bool near_degenerate = false;  // leading coefficient small but kept
};

/// w^2 [(w + 1/w + 2 eps_d)((1 - 2F) w + 1/w) - 2 g^2] as a polynomial in w = e^{ik}.
inline WPolynomial w_polynomial(const ModelParams& p) {
    validate(p);
    const complex e = p.eps_d;
    const double a = 1.0 - 2.0 * p.F;
    std::vector<complex> c{1.0, 2.0 * e, a + 1.0 - 2.0 * p.g * p.g, 2.0 * e * a, a};
    while (c.size() > 1 && std::abs(c.back()) < trim_tol) c.pop_back();
    WPolynomial w;
    w.degree = static_cast<int>(c.size()) - 1;
    w.near_degenerate = std::abs(c.back()) < 1e-8;
    w.coefficients = std::move(c);
    return w;
}

struct WRoot {
    complex w;
    complex z;  // -(w + 1/w)/2
};

namespace detail {

inline complex horner(std::span<const complex> c, complex x) {
    complex acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
}

inline complex horner_derivative(std::span<const complex> c, complex x) {
    complex acc = 0.0;
    for (std::size_t i = c.size() - 1; i >= 1; --i) acc = acc * x + static_cast<double>(i) * c[i];
    return acc;
}

inline double horner_scale(std::span<const complex> c, complex x) {
    double acc = 0.0;
    const double ax = std::abs(x);
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * ax + std::abs(*it);
    return acc;
}

}  // namespace detail

/// All roots of an ascending-coefficient polynomial by Weierstrass (Durand-Kerner)
/// iteration from a fixed ring of starting points, sorted by argument then modulus.
inline std::vector<complex> polynomial_roots(std::span<const complex> coefficients, int max_sweeps = 1000) {
    std::vector<complex> c(coefficients.begin(), coefficients.end());
    while (c.size() > 1 && std::abs(c.back()) < trim_tol) c.pop_back();
    const int n = static_cast<int>(c.size()) - 1;
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "polynomial must have degree >= 1");
    const complex lead = c.back();
    for (auto& x : c) x /= lead;

    double radius = 0.0;
    for (int i = 0; i < n; ++i) radius = std::max(radius, std::abs(c[static_cast<std::size_t>(i)]));
    radius += 1.0;
    std::vector<complex> roots(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) roots[static_cast<std::size_t>(j)] = std::polar(radius, 2.0 * std::numbers::pi * j / n + 0.4);

    bool converged = false;
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            auto& r = roots[static_cast<std::size_t>(i)];
            complex denom = 1.0;
            for (int j = 0; j < n; ++j)
                if (j != i) denom *= r - roots[static_cast<std::size_t>(j)];
            const complex step = detail::horner(c, r) / denom;
            if (!std::isfinite(std::abs(step))) continue;
            r -= step;
            worst = std::max(worst, std::abs(step) / std::max(1.0, std::abs(r)));
        }
        converged = worst < 1e-15;
    }
    // Newton polish on the monic polynomial, then a backward-error check
    for (auto& r : roots) {
        for (int it = 0; it < 3; ++it) {
            const complex dp = detail::horner_derivative(c, r);
            if (dp == 0.0) break;
            const complex step = detail::horner(c, r) / dp;
            if (!std::isfinite(std::abs(step))) break;
            r -= step;
        }
        const double backward = std::abs(detail::horner(c, r)) / detail::horner_scale(c, r);
        if (!(backward < 1e-12)) throw Error(ErrorKind::NoConvergence, "root iteration did not reach residual 1e-12");
    }
    std::sort(roots.begin(), roots.end(), [](complex a, complex b) {
        const double aa = std::arg(a), ab = std::arg(b);
        if (aa != ab) return aa < ab;
        return std::abs(a) < std::abs(b);
    });
    return roots;
}

/// Roots w of the polynomial and their energies z = -(w + 1/w)/2.
inline std::vector<WRoot> w_roots(std::span<const complex> coefficients) {
    std::vector<WRoot> out;
    for (const complex w : polynomial_roots(coefficients)) out.push_back({w, -0.5 * (w + 1.0 / w)});
    return out;
}

inline std::vector<WRoot> w_roots(const WPolynomial& poly) { return w_roots(poly.coefficients); }

}  // namespace epscope
