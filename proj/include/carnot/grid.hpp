#ifndef CARNOT_GRID_HPP
#define CARNOT_GRID_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "carnot/errors.hpp"
#include "carnot/group.hpp"

namespace carnot {

using cplx = std::complex<double>;

/// Truncated anisotropic box grid on a stratified group.
///
/// Axis i covers [-R^{d_i}, R^{d_i}) with m_i equispaced nodes at
/// x = (k - m_i/2) * h_i, h_i = 2 R^{d_i} / m_i. The rectangle rule
/// sum(values) * volume_element is then exact for constants, and for
/// even m_i the identity 0 is a grid node.
class GridSpec {
public:
    GroupSpec group;
    double half_width = 0.0; // R
    std::vector<int> points_per_axis;
    std::vector<double> spacing;
    std::vector<double> extent;  // R^{d_i} per axis
    std::vector<int> center;     // index of the 0 node per axis
    double volume_element = 1.0;
    size_t N = 0;

    GridSpec() = default;

    GridSpec(GroupSpec g, double R, std::vector<int> points)
        : group(std::move(g)), half_width(R), points_per_axis(std::move(points)) {
        if (static_cast<int>(points_per_axis.size()) == 1 && group.n > 1)
            points_per_axis.assign(group.n, points_per_axis[0]);
        if (static_cast<int>(points_per_axis.size()) != group.n)
            throw DimensionMismatch("points_per_axis length != group dimension");
        if (!(R > 0.0)) throw ConfigError("half_width must be > 0");
        N = 1;
        for (int i = 0; i < group.n; ++i) {
            int m = points_per_axis[i];
            if (m < 4) throw ConfigError("need at least 4 points per axis");
            double e = std::pow(R, group.weights[i]);
            extent.push_back(e);
            spacing.push_back(2.0 * e / m);
            center.push_back(m / 2);
            N *= static_cast<size_t>(m);
        }
        volume_element = 1.0;
        for (double h : spacing) volume_element *= h;
    }

    bool operator==(const GridSpec& o) const {
        return group.name == o.group.name && group.n == o.group.n &&
               half_width == o.half_width && points_per_axis == o.points_per_axis;
    }

    Point node(size_t flat) const {
        Point x(group.n);
        for (int i = group.n - 1; i >= 0; --i) {
            int m = points_per_axis[i];
            int k = static_cast<int>(flat % m);
            flat /= m;
            x[i] = (k - center[i]) * spacing[i];
        }
        return x;
    }

    size_t flat_index(const std::vector<int>& idx) const {
        size_t f = 0;
        for (int i = 0; i < group.n; ++i)
            f = f * points_per_axis[i] + idx[i];
        return f;
    }

    /// Flat index of the identity node (0 must be a grid node).
    size_t identity_index() const {
        std::vector<int> idx(center.begin(), center.end());
        for (int i = 0; i < group.n; ++i) {
            double x0 = (idx[i] - center[i]) * spacing[i];
            if (x0 != 0.0) throw IdentityNodeMissing("0 is not a grid node");
        }
        return flat_index(idx);
    }

    /// Whether x lies in the hull of grid nodes [-ext, ext - h] per axis.
    bool inside(const Point& x) const {
        for (int i = 0; i < group.n; ++i)
            if (x[i] < -extent[i] || x[i] > extent[i] - spacing[i]) return false;
        return true;
    }
};

/// Complex samples of a function on a GridSpec, row-major axis order.
class GridFunction {
public:
    GridSpec grid;
    std::vector<cplx> values;

    GridFunction() = default;
    explicit GridFunction(GridSpec g) : grid(std::move(g)), values(grid.N, cplx(0.0)) {}
    GridFunction(GridSpec g, std::vector<cplx> v) : grid(std::move(g)), values(std::move(v)) {
        if (values.size() != grid.N) throw DimensionMismatch("value count != grid size");
    }

    size_t size() const { return values.size(); }

    /// Multilinear interpolation, zero outside the box.
    cplx interpolate(const Point& x) const {
        const int n = grid.group.n;
        if (n > 16) throw DimensionMismatch("interpolation supports n <= 16");
        double frac[16];
        int base[16];
        for (int i = 0; i < n; ++i) {
            double u = x[i] / grid.spacing[i] + grid.center[i];
            double fl = std::floor(u);
            base[i] = static_cast<int>(fl);
            frac[i] = u - fl;
            if (base[i] < -1 || base[i] > grid.points_per_axis[i] - 1)
                return cplx(0.0);
        }
        cplx acc(0.0);
        const int corners = 1 << n;
        for (int c = 0; c < corners; ++c) {
            double w = 1.0;
            size_t flat = 0;
            bool ok = true;
            for (int i = 0; i < n; ++i) {
                int bit = (c >> i) & 1;
                int k = base[i] + bit;
                w *= bit ? frac[i] : 1.0 - frac[i];
                if (k < 0 || k >= grid.points_per_axis[i]) {
                    ok = false;
                    break;
                }
                flat = flat * grid.points_per_axis[i] + static_cast<size_t>(k);
            }
            if (ok && w != 0.0) acc += w * values[flat];
        }
        return acc;
    }

    GridFunction& operator+=(const GridFunction& o) {
        check_same(o);
        for (size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
        return *this;
    }
    GridFunction& operator-=(const GridFunction& o) {
        check_same(o);
        for (size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
        return *this;
    }
    GridFunction& operator*=(cplx a) {
        for (auto& v : values) v *= a;
        return *this;
    }
    friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
    friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
    friend GridFunction operator*(cplx a, GridFunction f) { return f *= a; }

    void check_same(const GridFunction& o) const {
        if (!(grid == o.grid)) throw GridMismatch("grid functions live on different grids");
    }
};

inline GridFunction sample(const GridSpec& grid,
                           const std::function<cplx(const Point&)>& field) {
    GridFunction f(grid);
    for (size_t i = 0; i < grid.N; ++i) {
        cplx v = field(grid.node(i));
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NonFiniteValue("sampled field is not finite on the box");
        f.values[i] = v;
    }
    return f;
}

inline cplx integrate(const GridFunction& f) {
    cplx s(0.0);
    for (const auto& v : f.values) s += v;
    return s * f.grid.volume_element;
}

inline cplx inner(const GridFunction& f, const GridFunction& g) {
    f.check_same(g);
    cplx s(0.0);
    for (size_t i = 0; i < f.values.size(); ++i)
        s += f.values[i] * std::conj(g.values[i]);
    return s * f.grid.volume_element;
}

/// L^p quadrature norm; p = infinity is the max modulus. `exclude_band`
/// drops the outermost fraction of the box on every axis (the Dirichlet
/// truncation pollutes a boundary layer; norm comparisons cut it away).
inline double lp_norm(const GridFunction& f, double p, double exclude_band = 0.0) {
    const auto& g = f.grid;
    bool all = exclude_band <= 0.0;
    double s = 0.0, mx = 0.0;
    for (size_t i = 0; i < f.values.size(); ++i) {
        if (!all) {
            Point x = g.node(i);
            bool interior = true;
            for (int k = 0; k < g.group.n; ++k)
                if (std::abs(x[k]) > (1.0 - exclude_band) * g.extent[k]) {
                    interior = false;
                    break;
                }
            if (!interior) continue;
        }
        double a = std::abs(f.values[i]);
        if (std::isinf(p))
            mx = std::max(mx, a);
        else
            s += std::pow(a, p);
    }
    if (std::isinf(p)) return mx;
    return std::pow(s * g.volume_element, 1.0 / p);
}

inline double rel_l2_dist(const GridFunction& a, const GridFunction& b,
                          double exclude_band = 0.0) {
    GridFunction d = a;
    d -= b;
    double den = lp_norm(b, 2.0, exclude_band);
    return den == 0.0 ? lp_norm(d, 2.0, exclude_band)
                      : lp_norm(d, 2.0, exclude_band) / den;
}

/// f*(x) = conj(f(-x)). Node reflection k -> m-k is exact for every node
/// except the single bottom-edge node per axis, which maps to itself.
inline GridFunction involution(const GridFunction& f) {
    const auto& g = f.grid;
    GridFunction out(g);
    const int n = g.group.n;
    std::vector<int> idx(n, 0);
    for (size_t flat = 0; flat < g.N; ++flat) {
        size_t s = flat;
        std::vector<int> ridx(n);
        for (int i = n - 1; i >= 0; --i) {
            int m = g.points_per_axis[i];
            int k = static_cast<int>(s % m);
            s /= m;
            int r = (2 * g.center[i] - k) % m;
            if (r < 0) r += m;
            ridx[i] = r;
        }
        out.values[flat] = std::conj(f.values[g.flat_index(ridx)]);
    }
    return out;
}

/// L1-normalized dilation D_a f(x) = a^Q f(delta_a x), interpolated.
inline GridFunction dilate_fn(double a, const GridFunction& f) {
    if (!(a > 0.0)) throw NonPositiveScale("dilation scale must be > 0");
    const auto& g = f.grid;
    GridFunction out(g);
    double aQ = std::pow(a, g.group.Q);
    for (size_t i = 0; i < g.N; ++i) {
        Point x = g.node(i);
        out.values[i] = aQ * f.interpolate(g.group.dilate(a, x));
    }
    return out;
}

/// Group convolution (f*g)(x) = int f(y) g(y^{-1} x) dy by the rectangle
/// rule over grid nodes y, with multilinear interpolation of g at the
/// generally off-grid points y^{-1} x and zero extension outside the box.
inline GridFunction convolve(const GridFunction& f, const GridFunction& g) {
    f.check_same(g);
    const auto& gr = f.grid;
    const GroupSpec& G = gr.group;
    const int n = G.n;
    GridFunction out(gr);

    // precompute node coordinates once; grids are small enough
    std::vector<double> coords(gr.N * n);
    for (size_t i = 0; i < gr.N; ++i) {
        Point x = gr.node(i);
        for (int k = 0; k < n; ++k) coords[i * n + k] = x[k];
    }

    Point my(n), w(n), br(n), br2(n);
    const bool step2 = G.step >= 2;
    const bool step3 = G.step >= 3;
    for (size_t ix = 0; ix < gr.N; ++ix) {
        const double* x = &coords[ix * n];
        cplx acc(0.0);
        for (size_t iy = 0; iy < gr.N; ++iy) {
            cplx fy = f.values[iy];
            if (fy == cplx(0.0)) continue;
            const double* y = &coords[iy * n];
            for (int k = 0; k < n; ++k) {
                my[k] = -y[k];
                w[k] = x[k] - y[k];
            }
            if (step2) {
                br = G.bracket(my, Point(x, x + n));
                for (int k = 0; k < n; ++k) w[k] += 0.5 * br[k];
                if (step3) {
                    br2 = G.bracket(my, br);
                    Point xb = G.bracket(Point(x, x + n), br);
                    for (int k = 0; k < n; ++k) w[k] += (br2[k] - xb[k]) / 12.0;
                }
            }
            acc += fy * g.interpolate(w);
        }
        out.values[ix] = acc * gr.volume_element;
    }
    return out;
}

/// int f(x) x^I dx by quadrature.
inline cplx moment(const GridFunction& f, const std::vector<int>& I) {
    const auto& g = f.grid;
    cplx s(0.0);
    for (size_t i = 0; i < g.N; ++i) {
        Point x = g.node(i);
        double mono = 1.0;
        for (int k = 0; k < g.group.n; ++k)
            for (int c = 0; c < I[k]; ++c) mono *= x[k];
        s += f.values[i] * mono;
    }
    return s * g.volume_element;
}

/// Sample points of the shell {|y| <= r}: all grid nodes in the shell
/// plus the 2n axis extremes at quasi-norm exactly r.
inline std::vector<Point> oscillation_shell(const GridSpec& g, double r) {
    std::vector<Point> shell;
    for (size_t i = 0; i < g.N; ++i) {
        Point y = g.node(i);
        double norm = g.group.quasi_norm(y);
        if (norm > 0.0 && norm <= r) shell.push_back(y);
    }
    for (int k = 0; k < g.group.n; ++k) {
        for (double sgn : {-1.0, 1.0}) {
            Point y(g.group.n, 0.0);
            y[k] = sgn * std::pow(r, g.group.weights[k]);
            shell.push_back(y);
        }
    }
    return shell;
}

/// osc_U(f)(x) = sup_{|y| <= r} |f(x) - f(x y^{-1})| over the sampled
/// shell; shifted points that leave the box are skipped rather than read
/// as zero, so the truncation edge does not masquerade as oscillation.
inline GridFunction osc(const GridFunction& f, double r) {
    const auto& g = f.grid;
    if (!(r > 0.0) || r >= g.half_width)
        throw ConfigError("oscillation radius must be in (0, half_width)");
    auto shell = oscillation_shell(g, r);
    GridFunction out(g);
    for (size_t i = 0; i < g.N; ++i) {
        Point x = g.node(i);
        double sup = 0.0;
        for (const auto& y : shell) {
            Point xy = g.group.product(x, g.group.inverse(y));
            if (!g.inside(xy)) continue;
            sup = std::max(sup, std::abs(f.values[i] - f.interpolate(xy)));
        }
        out.values[i] = sup;
    }
    return out;
}

} // namespace carnot

#endif
