#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "epscope/spectrum.hpp"
#include "reference.hpp"

using namespace epscope;

namespace {
ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no epscope::Error thrown";
    return ErrorKind::InvalidArgument;
}
}  // namespace

TEST(Eigenvalues, ReferenceValues) {
    auto [zm, zp] = eigenvalues(ModelParams{1.0, ref::g});
    EXPECT_NEAR(zm.real(), ref::z_minus_eps1, 1e-14);
    EXPECT_NEAR(zp.real(), ref::z_plus_eps1, 1e-13);
    EXPECT_EQ(zm.imag(), 0.0);

    std::tie(zm, zp) = eigenvalues(ModelParams{0.5, ref::g});
    EXPECT_NEAR(zm.real(), ref::z_minus_eps05, 1e-14);
    EXPECT_NEAR(zp.real(), ref::z_plus_eps05, 1e-13);

    std::tie(zm, zp) = eigenvalues(ModelParams{0.0, ref::g});
    EXPECT_NEAR(zm.imag(), ref::im_z_minus_eps0, 1e-14);
    EXPECT_NEAR(zp.imag(), -ref::im_z_minus_eps0, 1e-14);
    EXPECT_NEAR(zm.real(), 0.0, 1e-15);
}

TEST(Eigenvalues, SatisfyDispersionOnAssignedSheet) {
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> ue(-2.0, 2.0), ug(0.0, 0.7);
    for (int i = 0; i < 2000; ++i) {
        const ModelParams p{ue(rng), ug(rng)};
        for (const auto& s : spectrum(p)) {
            EXPECT_LT(dispersion_residual(s.z, p, s.sheet), 1e-10) << p.eps_d << " g=" << p.g;
            EXPECT_LT(std::abs(chain_dispersion(s.k) - s.z), 1e-10 * (1.0 + std::abs(s.z)));
        }
    }
}

TEST(Eigenvalues, ComplexImpurityEnergy) {
    const ModelParams p{complex(0.4, -0.2), 0.5};
    for (const auto& s : spectrum(p)) EXPECT_LT(dispersion_residual(s.z, p, s.sheet), 1e-12);
}

TEST(Eigenvalues, DegenerateCouplingRejected) {
    EXPECT_EQ(kind_of([] { (void)eigenvalues(ModelParams{0.3, 1.0 / std::numbers::sqrt2}); }),
              ErrorKind::DegenerateCoupling);
}

TEST(Eigenvalues, ZeroCouplingLeavesImpurityLevel) {
    const auto pts = spectrum(ModelParams{0.3, 0.0});
    for (const auto& s : pts) {
        EXPECT_NEAR(s.z.real(), 0.3, 1e-15);
        EXPECT_EQ(s.label, StateLabel::Continuum);
    }
    EXPECT_EQ(spectrum(ModelParams{1.5, 0.0})[0].label, StateLabel::Bound);
}

TEST(Labels, RegionsAtFixedCoupling) {
    const double g = ref::g;
    auto labels = [&](double eps) {
        const auto s = spectrum(ModelParams{eps, g});
        return std::pair{s[0].label, s[1].label};
    };
    EXPECT_EQ(labels(1.0), std::pair(StateLabel::Bound, StateLabel::AntiBound));
    EXPECT_EQ(labels(0.45), std::pair(StateLabel::AntiBound, StateLabel::AntiBound));
    EXPECT_EQ(labels(0.1), std::pair(StateLabel::Resonance, StateLabel::AntiResonance));
    EXPECT_EQ(labels(-0.1), std::pair(StateLabel::Resonance, StateLabel::AntiResonance));
    EXPECT_EQ(labels(-0.45), std::pair(StateLabel::AntiBound, StateLabel::AntiBound));
    EXPECT_EQ(labels(-1.0), std::pair(StateLabel::AntiBound, StateLabel::Bound));
}

TEST(Labels, BandEdgeAtEpsDelta) {
    const auto th = thresholds(ref::g);
    const auto s = spectrum(ModelParams{th.eps_delta_plus, ref::g});
    EXPECT_NEAR(s[0].z.real(), 1.0, 1e-12);
    EXPECT_EQ(s[0].label, StateLabel::BandEdge);
}

TEST(Labels, SheetsFollowTheState) {
    const auto bound = spectrum(ModelParams{1.0, ref::g});
    EXPECT_EQ(bound[0].sheet, RiemannSheet::First);
    EXPECT_EQ(bound[1].sheet, RiemannSheet::Second);
    for (const auto& s : spectrum(ModelParams{0.1, ref::g})) EXPECT_EQ(s.sheet, RiemannSheet::Second);
}

TEST(Classify, ExplicitCases) {
    EXPECT_EQ(classify(complex(2.0, 0.0), complex(std::numbers::pi, 1.0)), StateLabel::Bound);
    EXPECT_EQ(classify(complex(2.0, 0.0), complex(std::numbers::pi, -1.0)), StateLabel::AntiBound);
    EXPECT_EQ(classify(complex(0.0, -1.0), complex(1.0, -1.0)), StateLabel::Resonance);
    EXPECT_EQ(classify(complex(0.0, 1.0), complex(1.0, -1.0)), StateLabel::AntiResonance);
    EXPECT_EQ(classify(complex(1.0, 0.0), complex(0.0, 0.0)), StateLabel::BandEdge);
    EXPECT_THROW((void)classify(complex(2.0, 0.0), complex(0.0, 1.0), 0.0), Error);
}

TEST(WaveNumbers, ReferenceValues) {
    const auto [km, kp] = wave_numbers(ModelParams{1.0, ref::g});
    EXPECT_NEAR(km.real(), std::numbers::pi, 1e-15);
    EXPECT_NEAR(km.imag(), ref::im_k_minus_eps1, 1e-13);
    EXPECT_LT(kp.imag(), 0.0);
    const auto [kr, kar] = wave_numbers(ModelParams{0.1, ref::g});
    EXPECT_NEAR(kr.real(), ref::re_k_minus_eps01, 1e-13);
    EXPECT_NEAR(kr.imag(), ref::im_k_res, 1e-13);
    EXPECT_NEAR(kar.imag(), ref::im_k_res, 1e-13);
}

TEST(WaveNumbers, RealPartPinnedOutsideAntiBoundWindow) {
    const auto th = thresholds(ref::g);
    for (double eps = th.eps_delta_plus + 1e-3; eps < 2.0; eps += 0.05)
        EXPECT_NEAR(wave_numbers(ModelParams{eps, ref::g}).first.real(), std::numbers::pi, 1e-10);
    for (double eps = th.eps_delta_minus - 1e-3; eps > -2.0; eps -= 0.05)
        EXPECT_NEAR(wave_numbers(ModelParams{eps, ref::g}).first.real(), 0.0, 1e-10);
}

TEST(Thresholds, ClosedForms) {
    const auto t = thresholds(ref::g);
    EXPECT_NEAR(t.eps_delta_plus, 0.5511, 1e-12);
    EXPECT_NEAR(t.eps_bar_plus.real(), ref::eps_bar, 1e-15);
    EXPECT_NEAR(t.eps_bar_minus.real(), -ref::eps_bar, 1e-15);
    EXPECT_EQ(t.reality, EpReality::Real);
    EXPECT_EQ(thresholds(0.8).reality, EpReality::Imaginary);
    EXPECT_GT(thresholds(0.8).eps_bar_plus.imag(), 0.0);
    EXPECT_EQ(thresholds(1.0 / std::numbers::sqrt2).reality, EpReality::Degenerate);
}

TEST(ResonancePhase, ReferenceValuesAndLimits) {
    EXPECT_NEAR(resonance_phase(ModelParams{0.1, ref::g}), ref::re_k_minus_eps01, 1e-13);
    EXPECT_NEAR(resonance_phase(ModelParams{-0.1, ref::g}), ref::re_k_minus_epsm01, 1e-13);
    EXPECT_NEAR(resonance_phase(ModelParams{0.0, ref::g}), std::numbers::pi / 2, 1e-15);
    EXPECT_NEAR(resonance_phase(ModelParams{ref::eps_bar - 1e-12, ref::g}), std::numbers::pi, 1e-4);
    EXPECT_NEAR(resonance_decay_rate(ref::g), std::log(ref::eps_bar), 1e-14);
    // reflection eps -> -eps maps phi -> pi - phi
    EXPECT_NEAR(ref::re_k_minus_eps01 + ref::re_k_minus_epsm01, std::numbers::pi, 1e-15);
}

TEST(ResonancePhase, OutsideWindow) {
    EXPECT_EQ(kind_of([] { (void)resonance_phase(ModelParams{0.4, ref::g}); }), ErrorKind::OutsideResonanceWindow);
    EXPECT_EQ(kind_of([] { (void)resonance_phase(ModelParams{0.1, 0.8}); }), ErrorKind::OutsideResonanceWindow);
}

TEST(ResonancePhase, ArctanFormOnPositiveSide) {
    for (double eps : {0.05, 0.1, 0.2, 0.3}) {
        const double f1 = coupling_factor(ref::g);
        const double phi = std::numbers::pi - std::atan(std::sqrt(f1 - eps * eps) / eps);
        EXPECT_NEAR(resonance_phase(ModelParams{eps, ref::g}), phi, 1e-13);
    }
}

TEST(Sweep, DeterministicAcrossThreadCounts) {
    std::vector<double> grid;
    for (int i = 0; i <= 300; ++i) grid.push_back(-1.5 + 3.0 * i / 300);
    const auto a = sweep(ref::g, grid, 1), b = sweep(ref::g, grid, 4);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        ASSERT_TRUE(a[i].points && b[i].points);
        for (int j = 0; j < 2; ++j) {
            EXPECT_EQ((*a[i].points)[j].z, (*b[i].points)[j].z);
            EXPECT_EQ((*a[i].points)[j].label, (*b[i].points)[j].label);
        }
    }
}

TEST(Sweep, FailuresAreRecordedPerRow) {
    const std::vector<double> grid{0.0, 0.5};
    const auto rows = sweep(1.0 / std::numbers::sqrt2, grid);
    for (const auto& r : rows) {
        EXPECT_FALSE(r.points);
        ASSERT_TRUE(r.error);
        EXPECT_EQ(*r.error, ErrorKind::DegenerateCoupling);
    }
}
