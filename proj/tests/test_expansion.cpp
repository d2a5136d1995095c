#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "epscope/expansion.hpp"
#include "reference.hpp"

using namespace epscope;

namespace {

// Eigenvalue on the branch the series labels h = 0 (z_plus) or h = 1 (z_minus),
// at the anchored impurity energy and the coupling that produces lambda.
complex exact(double eps_bar, double lam, int h) {
    const ModelParams p{eps_bar, coupling_for_lambda(eps_bar, lam)};
    const auto [zm, zp] = eigenvalues(p);
    return h == 0 ? zp : zm;
}

std::vector<PuiseuxSample> samples_on_path(double eps_bar, int h, int count, double lo, double hi) {
    std::vector<PuiseuxSample> out;
    for (int sign : {1, -1})
        for (int i = 0; i < count; ++i) {
            const double lam = sign * lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
            const ModelParams p{eps_bar, coupling_for_lambda(eps_bar, lam)};
            out.push_back({p, exact(eps_bar, lam, h)});
        }
    return out;
}

}  // namespace

TEST(Series, ClosedFormCoefficients) {
    const auto s = puiseux_coefficients_prototype(Branch::Plus, ref::g, 4);
    EXPECT_NEAR(s.z_center.real(), ref::z_center, 1e-14);
    EXPECT_NEAR(s.beta[0].real(), ref::beta1, 1e-13);
    EXPECT_NEAR(s.beta[1].real(), ref::beta2, 1e-12);
    EXPECT_NEAR(s.beta[2].real(), ref::beta3, 1e-11);
    EXPECT_NEAR(s.beta[3].real(), ref::beta4, 1e-10);
    EXPECT_EQ(s.period, 2);
    EXPECT_EQ(s.ep.sheet, RiemannSheet::Second);
    EXPECT_LT(s.ep.residual, 1e-13);
    EXPECT_FALSE(s.near_degenerate);
}

TEST(Series, MinusSideFlipsEvenCoefficients) {
    const auto p = puiseux_coefficients_prototype(Branch::Plus, ref::g, 6);
    const auto m = puiseux_coefficients_prototype(Branch::Minus, ref::g, 6);
    EXPECT_NEAR(m.z_center.real(), -p.z_center.real(), 1e-15);
    for (std::size_t l = 0; l < 6; ++l) {
        const double sign = (l + 1) % 2 == 0 ? -1.0 : 1.0;
        EXPECT_NEAR(m.beta[l].real(), sign * p.beta[l].real(), 1e-10 * std::abs(p.beta[l]));
    }
}

TEST(Series, MatchesEigenvaluesAlongCouplingPath) {
    const auto s = puiseux_coefficients_prototype(Branch::Plus, ref::g, 8);
    for (double mag : {1e-3, 5e-4, 1e-4, 1e-6})
        for (double lam : {mag, -mag})
            for (int h : {0, 1}) {
                const auto v = evaluate_series(s, complex(lam, 0.0), h, 8);
                EXPECT_TRUE(v.within_radius);
                EXPECT_LT(std::abs(v.z - exact(ref::eps_bar, lam, h)), 1e-8) << lam << " h=" << h;
            }
}

TEST(Series, MinusSideMatchesToo) {
    const auto s = puiseux_coefficients_prototype(Branch::Minus, ref::g, 8);
    for (double lam : {1e-3, -1e-3, 1e-5})
        for (int h : {0, 1}) {
            const double eps = -ref::eps_bar;
            const ModelParams p{eps, coupling_for_lambda(eps, lam)};
            const auto [zm, zp] = eigenvalues(p);
            const complex z = evaluate_series(s, p, h, 8).z;
            EXPECT_LT(std::min(std::abs(z - zm), std::abs(z - zp)), 1e-8);
        }
}

TEST(Series, TruncationErrorHalvingRatio) {
    const auto s = puiseux_coefficients_prototype(Branch::Plus, ref::g, 12);
    for (int n : {2, 3, 4, 5, 6}) {
        const double lam = 1e-4;
        const double e1 = std::abs(evaluate_series(s, lam, 0, n).z - exact(ref::eps_bar, lam, 0));
        const double e2 = std::abs(evaluate_series(s, lam / 2, 0, n).z - exact(ref::eps_bar, lam / 2, 0));
        const double expected = std::pow(2.0, -(n + 1) / 2.0);
        EXPECT_NEAR(e2 / e1 / expected, 1.0, 0.1) << "order " << n;
    }
}

TEST(Series, OutsideRadiusFlagged) {
    const auto s = puiseux_coefficients_prototype(Branch::Plus, ref::g, 4);
    EXPECT_FALSE(evaluate_series(s, complex(0.2, 0.0), 0, 4).within_radius);
}

TEST(Series, Preconditions) {
    EXPECT_THROW((void)puiseux_coefficients_prototype(Branch::Plus, 0.8, 4), Error);
    EXPECT_THROW((void)puiseux_coefficients_prototype(Branch::Plus, ref::g, 0), Error);
    const auto s = puiseux_coefficients_prototype(Branch::Plus, ref::g, 4);
    EXPECT_THROW((void)evaluate_series(s, complex(1e-4), 2, 4), Error);
    EXPECT_THROW((void)evaluate_series(s, complex(1e-4), 0, 5), Error);
    try {
        (void)puiseux_series_at(0.0, 4);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DegenerateCoupling);
    }
    EXPECT_TRUE(puiseux_series_at(1e-4, 2).near_degenerate);
}

TEST(LeadingExponent, HalfPowerAtEp) {
    const auto s = puiseux_coefficients_prototype(Branch::Plus, ref::g, 1);
    std::vector<ExponentSample> samples;
    for (int i = 0; i <= 20; ++i) {
        const double lam = 1e-10 * std::pow(1e4, i / 20.0);
        samples.push_back({lam, std::abs(exact(ref::eps_bar, lam, 0) - s.z_center)});
    }
    EXPECT_NEAR(fit_leading_exponent(samples), 0.5, 1e-3);
}

TEST(LeadingExponent, InsufficientSpan) {
    std::vector<ExponentSample> few{{1e-4, 1e-2}, {2e-4, 1.4e-2}, {3e-4, 1.7e-2}};
    EXPECT_THROW((void)fit_leading_exponent(few), Error);
    std::vector<ExponentSample> narrow;
    for (int i = 0; i < 10; ++i) narrow.push_back({1e-4 * (1 + i), 1e-2});
    try {
        (void)fit_leading_exponent(narrow);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InsufficientSpan);
    }
}

TEST(CoefficientFit, RecoversClosedForm) {
    const auto ep = ep_record_closed_form(ref::g, Branch::Plus);
    const auto samples = samples_on_path(ref::eps_bar, 0, 20, 1e-5, 1e-3);
    const auto beta = fit_coefficients_numeric(samples, EpRecord{ep.eps_bar, ep.z_center, 2}, 3);
    EXPECT_NEAR(beta[0].real() / ref::beta1, 1.0, 1e-6);
    EXPECT_NEAR(beta[1].real() / ref::beta2, 1.0, 1e-6);
    EXPECT_NEAR(beta[2].real() / ref::beta3, 1.0, 1e-6);
    for (const auto& b : beta) EXPECT_LT(std::abs(b.imag()), 1e-6 * std::abs(b));
}

TEST(CoefficientFit, OtherBranchSameCoefficients) {
    const auto ep = ep_record_closed_form(ref::g, Branch::Plus);
    const auto samples = samples_on_path(ref::eps_bar, 1, 20, 1e-5, 1e-3);
    const auto beta = fit_coefficients_numeric(samples, EpRecord{ep.eps_bar, ep.z_center, 2}, 3, 1);
    EXPECT_NEAR(beta[0].real() / ref::beta1, 1.0, 1e-6);
    EXPECT_NEAR(beta[1].real() / ref::beta2, 1.0, 1e-6);
}

TEST(CoefficientFit, IllConditioned) {
    const auto ep = ep_record_closed_form(ref::g, Branch::Plus);
    const EpRecord rec{ep.eps_bar, ep.z_center, 2};
    const auto few = samples_on_path(ref::eps_bar, 0, 3, 1e-5, 1e-3);
    try {
        (void)fit_coefficients_numeric(few, rec, 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::IllConditioned);
    }
    // every sample at the same lambda makes the columns parallel
    std::vector<PuiseuxSample> same(30, samples_on_path(ref::eps_bar, 0, 2, 1e-4, 1e-3).front());
    EXPECT_THROW((void)fit_coefficients_numeric(same, rec, 3), Error);
}
