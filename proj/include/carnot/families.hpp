#ifndef CARNOT_FAMILIES_HPP
#define CARNOT_FAMILIES_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "carnot/grid.hpp"
#include "carnot/spectral.hpp"
#include "carnot/wavelet.hpp"

namespace carnot {

/// Smooth interior envelope: 1 at the center, 0 beyond `fraction` of the
/// box along every axis.
inline GridFunction interior_envelope(const GridSpec& g, double fraction = 0.6) {
    GridFunction out(g);
    for (size_t i = 0; i < g.N; ++i) {
        Point x = g.node(i);
        double v = 1.0;
        for (int k = 0; k < g.group.n; ++k)
            v *= detail::smooth_step(2.0 - 2.0 * std::abs(x[k]) /
                                               (fraction * g.extent[k]));
        out.values[i] = cplx(v, 0.0);
    }
    return out;
}

/// Seeded band-limited test functions: white noise windowed to the box
/// interior, passed through a spectral plateau filter, unit L2.
inline std::vector<GridFunction> band_passed_family(
    const SubLaplacianMatrix& Lm, const MultiplierProfile& plateau, int count,
    uint64_t seed, const std::string& backend = "eig",
    double envelope_fraction = 0.6) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    GridFunction env = interior_envelope(Lm.grid, envelope_fraction);
    std::vector<GridFunction> family;
    for (int c = 0; c < count; ++c) {
        GridFunction noise(Lm.grid);
        for (size_t i = 0; i < Lm.grid.N; ++i)
            noise.values[i] = env.values[i] * gauss(rng);
        GridFunction u = apply_multiplier(Lm, plateau, noise, backend);
        double n2 = lp_norm(u, 2.0);
        if (n2 > 0.0) u *= cplx(1.0 / n2, 0.0);
        family.push_back(std::move(u));
    }
    return family;
}

/// Dilated and translated copies of a base kernel, materialized by
/// interpolation: f(x) = t^Q base(delta_t (y^{-1} x)).
inline GridFunction translate_dilate(const GridFunction& base, double t,
                                     const Point& y) {
    const GridSpec& g = base.grid;
    GridFunction out(g);
    double tQ = std::pow(t, g.group.Q);
    Point yinv = g.group.inverse(y);
    for (size_t i = 0; i < g.N; ++i)
        out.values[i] = tQ * base.interpolate(g.group.dilate(
                                 t, g.group.product(yinv, g.node(i))));
    return out;
}

} // namespace carnot

#endif
