// Locates the EP at positive impurity energy, checks its period with a contour
// count, then drags eps_d once and twice around it.

#include <cstdio>

#include "epscope/epscope.hpp"

int main() {
    using namespace epscope;
    const double g = 0.67;
    const auto ep = locate_ep_numeric(ChainSelfEnergy{g}, RiemannSheet::Second, 2.0);
    std::printf("EP: eps_bar = %.12f  z_c = %.12f  (%d Newton steps)\n", ep.eps_bar.real(), ep.z_center.real(),
                ep.iterations);

    const auto w = winding_period(ContourSpec{ep.z_center, 0.05, RiemannSheet::Second}, ModelParams{ep.eps_bar, g});
    std::printf("contour count p = %d  (quadrature off by %.1e)\n", w.period, w.residual);

    for (int loops : {1, 2}) {
        const auto r = encircle_ep(g, 0.05, 400, loops);
        std::printf("%d loop(s): %s\n", loops, to_string(r.permutation));
    }

    const auto series = puiseux_coefficients_prototype(Branch::Plus, g, 4);
    for (std::size_t l = 0; l < series.beta.size(); ++l)
        std::printf("beta_%zu = %.10f\n", l + 1, series.beta[l].real());
}
