// Walks the impurity energy across the g = 0.67 spectrum and prints where
// the two poles sit and what kind of state each one is.

#include <cstdio>

#include "epscope/epscope.hpp"

int main() {
    using namespace epscope;
    const double g = 0.67;
    const auto th = thresholds(g);
    std::printf("g = %.2f  eps_delta = %+.6f  eps_bar = %+.6f\n", g, th.eps_delta_plus, th.eps_bar_plus.real());
    for (double eps = -1.2; eps <= 1.2001; eps += 0.1) {
        const auto pts = spectrum(ModelParams{eps, g});
        std::printf("%+5.2f", eps);
        for (const auto& s : pts)
            std::printf("   z = %+.6f%+.6fi  %-4s %-14s", s.z.real(), s.z.imag(), to_string(s.sheet), to_string(s.label));
        std::printf("\n");
    }
}
