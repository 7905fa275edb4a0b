#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <random>

#include <carnot/grid.hpp>
#include <carnot/group.hpp>
#include <carnot/io.hpp>

using namespace carnot;

namespace {

GridSpec line_grid(double R, int pts) {
    return GridSpec(GroupSpec::make_preset("euclidean(1)"), R, {pts});
}

GridFunction gaussian(const GridSpec& g, double a = 1.0, double scale = 1.0) {
    return sample(g, [a, scale](const Point& x) {
        double s = 0.0;
        for (double c : x) s += c * c;
        return cplx(scale * std::exp(-a * s), 0.0);
    });
}

} // namespace

TEST_CASE("sampling fills nodes in row-major order") {
    GridSpec g = line_grid(1.0, 5);
    GridFunction one = sample(g, [](const Point&) { return cplx(1.0, 0.0); });
    for (const auto& v : one.values) CHECK(v == cplx(1.0, 0.0));

    GridFunction f = gaussian(g);
    CHECK(f.values[g.identity_index()] == cplx(1.0, 0.0));

    CHECK_THROWS_AS(
        sample(g, [](const Point& x) { return cplx(1.0 / x[0], 0.0); }),
        NonFiniteValue);
}

TEST_CASE("rectangle rule integrates constants exactly") {
    GridSpec g(GroupSpec::make_preset("euclidean(1)"), 1.0, {374});
    GridFunction zero(g);
    CHECK(integrate(zero) == cplx(0.0));
    GridFunction one = sample(g, [](const Point&) { return cplx(1.0, 0.0); });
    CHECK(integrate(one).real() == Catch::Approx(2.0).margin(1e-14));

    // half-box indicator integrates to half the volume up to one cell
    GridFunction ind =
        sample(g, [](const Point& x) { return cplx(x[0] < 0.0 ? 1.0 : 0.0, 0.0); });
    CHECK(std::abs(integrate(ind).real() - 1.0) <= g.spacing[0] + 1e-14);
}

TEST_CASE("Gaussian quadrature benchmark on the line") {
    GridSpec g = line_grid(6.0, 256);
    GridFunction f = gaussian(g);
    CHECK(integrate(f).real() == Catch::Approx(std::sqrt(M_PI)).margin(1e-6));
    CHECK(std::abs(moment(f, {0}).real() - std::sqrt(M_PI)) < 1e-6);
    GridFunction xf = sample(g, [](const Point& x) {
        return cplx(x[0] * std::exp(-x[0] * x[0]), 0.0);
    });
    CHECK(std::abs(moment(xf, {1}).real() - std::sqrt(M_PI) / 2) < 1e-5);
    CHECK(std::abs(moment(xf, {0}).real()) < 1e-12); // odd integrand
}

TEST_CASE("discrete delta is a convolution unit") {
    GridSpec g = line_grid(4.0, 64);
    GridFunction f = gaussian(g);
    GridFunction delta(g);
    delta.values[g.identity_index()] = cplx(1.0 / g.volume_element, 0.0);
    GridFunction conv = convolve(f, delta);
    for (size_t i = 0; i < g.N; ++i)
        CHECK(std::abs(conv.values[i] - f.values[i]) < 1e-10);
}

TEST_CASE("Gaussian convolution matches the analytic variance sum") {
    GridSpec g = line_grid(8.0, 512);
    // two unit-mass variance-1/2 Gaussians convolve to a variance-1 one
    GridFunction f = gaussian(g, 1.0, 1.0 / std::sqrt(M_PI));
    GridFunction conv = convolve(f, f);
    double sup = 0.0;
    for (size_t i = 0; i < g.N; ++i) {
        double x = g.node(i)[0];
        double expect = std::exp(-x * x / 2) / std::sqrt(2 * M_PI);
        sup = std::max(sup, std::abs(conv.values[i].real() - expect));
    }
    CHECK(sup <= 1e-4);
}

TEST_CASE("noncommutative convolution agrees with a brute-force loop") {
    GroupSpec h1 = GroupSpec::make_preset("heisenberg(1)");
    GridSpec g(h1, 3.0, {16, 16, 16});
    std::mt19937_64 rng(23);
    std::normal_distribution<double> gauss(0.0, 1.0);
    GridFunction f = gaussian(g, 0.7);
    GridFunction h(g);
    for (auto& v : h.values) v = cplx(gauss(rng), gauss(rng));

    GridFunction conv = convolve(f, h);

    // independent oracle: explicit Heisenberg product and inline trilinear
    // interpolation, no shared code with convolve
    std::uniform_int_distribution<size_t> pick(0, g.N - 1);
    for (int trial = 0; trial < 10; ++trial) {
        size_t ix = pick(rng);
        Point x = g.node(ix);
        cplx acc(0.0);
        for (size_t iy = 0; iy < g.N; ++iy) {
            Point y = g.node(iy);
            double w0 = x[0] - y[0];
            double w1 = x[1] - y[1];
            double w2 = x[2] - y[2] + 0.5 * (-y[0] * x[1] + y[1] * x[0]);
            double u0 = w0 / g.spacing[0] + g.center[0];
            double u1 = w1 / g.spacing[1] + g.center[1];
            double u2 = w2 / g.spacing[2] + g.center[2];
            cplx interp(0.0);
            double b0 = std::floor(u0), b1 = std::floor(u1), b2 = std::floor(u2);
            for (int c = 0; c < 8; ++c) {
                int k0 = static_cast<int>(b0) + (c & 1);
                int k1 = static_cast<int>(b1) + ((c >> 1) & 1);
                int k2 = static_cast<int>(b2) + ((c >> 2) & 1);
                if (k0 < 0 || k0 >= 16 || k1 < 0 || k1 >= 16 || k2 < 0 || k2 >= 16)
                    continue;
                double wgt = ((c & 1) ? u0 - b0 : 1 - (u0 - b0)) *
                             (((c >> 1) & 1) ? u1 - b1 : 1 - (u1 - b1)) *
                             (((c >> 2) & 1) ? u2 - b2 : 1 - (u2 - b2));
                interp += wgt * h.values[(static_cast<size_t>(k0) * 16 + k1) * 16 + k2];
            }
            acc += f.values[iy] * interp;
        }
        acc *= g.volume_element;
        CHECK(std::abs(acc - conv.values[ix]) < 1e-12 * (1.0 + std::abs(acc)));
    }
}

TEST_CASE("involution fixes real even functions and squares to identity") {
    GridSpec g = line_grid(4.0, 128);
    GridFunction f = gaussian(g);
    GridFunction fs = involution(f);
    for (size_t i = 0; i < g.N; ++i)
        CHECK(std::abs(fs.values[i] - f.values[i]) < 1e-15);

    std::mt19937_64 rng(31);
    std::normal_distribution<double> gauss_d(0.0, 1.0);
    GridFunction r(g);
    for (auto& v : r.values) v = cplx(gauss_d(rng), gauss_d(rng));
    GridFunction rr = involution(involution(r));
    for (size_t i = 0; i < g.N; ++i) CHECK(rr.values[i] == r.values[i]);
}

TEST_CASE("involution is the convolution adjoint") {
    GridSpec g = line_grid(6.0, 128);
    std::mt19937_64 rng(37);
    std::normal_distribution<double> gauss_d(0.0, 1.0);
    auto smooth = [&](double a, double b, double c) {
        return sample(g, [&](const Point& x) {
            return cplx((a + b * x[0]) * std::exp(-c * x[0] * x[0]), 0.0);
        });
    };
    for (int trial = 0; trial < 5; ++trial) {
        GridFunction f = smooth(gauss_d(rng), gauss_d(rng), 0.8);
        GridFunction gg = smooth(gauss_d(rng), gauss_d(rng), 1.1);
        GridFunction h = smooth(gauss_d(rng), gauss_d(rng), 0.9);
        cplx lhs = inner(convolve(gg, f), h);
        cplx rhs = inner(gg, convolve(h, involution(f)));
        CHECK(std::abs(lhs - rhs) < 1e-8 * (1.0 + std::abs(lhs)));
    }
}

TEST_CASE("mass-preserving dilation") {
    GridSpec g = line_grid(8.0, 512);
    GridFunction f = sample(g, [](const Point& x) {
        double t = std::abs(x[0]) / 2.0;
        return cplx(t < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0, 0.0);
    });
    GridFunction id = dilate_fn(1.0, f);
    for (size_t i = 0; i < g.N; ++i)
        CHECK(std::abs(id.values[i] - f.values[i]) < 1e-14);

    double l1 = lp_norm(f, 1.0);
    for (double a : {0.5, 2.0})
        CHECK(std::abs(lp_norm(dilate_fn(a, f), 1.0) - l1) < 1e-3 * l1);

    // half then double recovers f wherever the doubled point stays in-box
    GridFunction comp = dilate_fn(2.0, dilate_fn(0.5, f));
    for (size_t i = 0; i < g.N; ++i) {
        double x = g.node(i)[0];
        if (std::abs(2.0 * x) < 0.9 * g.extent[0])
            CHECK(std::abs(comp.values[i] - f.values[i]) < 1e-8);
    }
    CHECK_THROWS_AS(dilate_fn(-2.0, f), NonPositiveScale);
}

TEST_CASE("norms and inner products are consistent") {
    GridSpec g = line_grid(2.0, 64);
    GridFunction zero(g);
    CHECK(lp_norm(zero, 2.0) == 0.0);
    GridFunction one = sample(g, [](const Point&) { return cplx(1.0, 0.0); });
    CHECK(lp_norm(one, 1.0) == Catch::Approx(4.0).margin(1e-13));

    GridFunction f = gaussian(g);
    CHECK(lp_norm(f, 2.0) * lp_norm(f, 2.0) ==
          Catch::Approx(inner(f, f).real()).margin(1e-12));
    CHECK(lp_norm(f, std::numeric_limits<double>::infinity()) ==
          Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("convolution obeys the L1-L_p bound") {
    GridSpec g = line_grid(6.0, 128);
    GridFunction f = gaussian(g, 1.3);
    GridFunction h = gaussian(g, 0.6);
    for (double p : {1.0, 2.0}) {
        double lhs = lp_norm(convolve(f, h), p);
        CHECK(lhs <= lp_norm(f, p) * lp_norm(h, 1.0) * 1.01);
    }
}

TEST_CASE("oscillation of smooth functions") {
    GridSpec g = line_grid(4.0, 128);
    GridFunction c = sample(g, [](const Point&) { return cplx(3.0, 0.0); });
    GridFunction oc = osc(c, 0.5);
    for (const auto& v : oc.values) CHECK(std::abs(v) < 1e-14);

    GridFunction lin = sample(g, [](const Point& x) { return cplx(x[0], 0.0); });
    double r = 0.5;
    GridFunction ol = osc(lin, r);
    for (size_t i = 0; i < g.N; ++i) {
        double x = g.node(i)[0];
        if (std::abs(x) < g.extent[0] - 2 * r)
            CHECK(std::abs(ol.values[i].real() - r) <= g.spacing[0] + 1e-12);
    }

    // monotone in the radius
    GridFunction f = gaussian(g);
    GridFunction o1 = osc(f, 0.25), o2 = osc(f, 0.5);
    for (size_t i = 0; i < g.N; ++i)
        CHECK(o1.values[i].real() <= o2.values[i].real() + 1e-12);
}

TEST_CASE("interpolation error falls by four when spacing halves") {
    auto max_err = [](int pts) {
        GridSpec g = line_grid(4.0, pts);
        GridFunction f = gaussian(g);
        double worst = 0.0;
        for (int k = 0; k < 200; ++k) {
            double x = -3.0 + 6.0 * k / 199.0 + 0.37 * g.spacing[0];
            worst = std::max(worst, std::abs(f.interpolate({x}).real() -
                                             std::exp(-x * x)));
        }
        return worst;
    };
    double e1 = max_err(128), e2 = max_err(256);
    CHECK(e1 / e2 > 3.0);
    CHECK(e1 / e2 < 5.0);
}

TEST_CASE("grid-function container round-trips through disk") {
    GroupSpec h1 = GroupSpec::make_preset("heisenberg(1)");
    GridSpec g(h1, 2.0, {8, 8, 8});
    std::mt19937_64 rng(41);
    std::normal_distribution<double> gauss_d(0.0, 1.0);
    GridFunction f(g);
    for (auto& v : f.values) v = cplx(gauss_d(rng), gauss_d(rng));

    auto path = std::filesystem::temp_directory_path() / "roundtrip_test.gfn";
    save_gfn(path.string(), f);
    GridFunction back = load_gfn(path.string());
    REQUIRE(back.grid == g);
    for (size_t i = 0; i < g.N; ++i) CHECK(back.values[i] == f.values[i]);
    std::filesystem::remove(path);
}
