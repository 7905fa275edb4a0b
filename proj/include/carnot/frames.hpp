#ifndef CARNOT_FRAMES_HPP
#define CARNOT_FRAMES_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "carnot/besov.hpp"
#include "carnot/errors.hpp"
#include "carnot/grid.hpp"
#include "carnot/wavelet.hpp"

namespace carnot {

/// Scaled lattice with a coordinate-box tile whose group translates tile
/// the group. Supported lattices: alpha Z^n on euclidean(n), and the
/// alpha-dilated integer lattice {(k, l, m/2)} on heisenberg(1), whose
/// tile is [0,alpha) x [0,alpha) x [0,alpha^2/2).
class SamplingSet {
public:
    GroupSpec group;
    double alpha = 1.0;
    std::vector<Point> points;       // lattice cap inflated box
    std::vector<double> tile;        // per-coordinate tile extents
    double tile_volume = 0.0;        // |W|
    GridSpec box;

    /// Lattice point whose tile contains x (constructive covering).
    Point locate(const Point& x) const {
        const int n = group.n;
        Point g(n, 0.0);
        for (int i = 0; i < n; ++i) {
            if (i == n - 1 && heisenberg_) break;
            g[i] = tile[i] * std::floor(x[i] / tile[i]);
        }
        if (heisenberg_) {
            double t = x[2] + 0.5 * (g[1] * x[0] - g[0] * x[1]);
            g[2] = tile[2] * std::floor(t / tile[2]);
        }
        return g;
    }

    /// Whether x lies in the tile of gamma.
    bool in_tile(const Point& gamma, const Point& x) const {
        Point w = group.product(group.inverse(gamma), x);
        for (int i = 0; i < group.n; ++i)
            if (w[i] < 0.0 || w[i] >= tile[i]) return false;
        return true;
    }

    bool is_heisenberg() const { return heisenberg_; }
    void set_heisenberg(bool h) { heisenberg_ = h; }

private:
    bool heisenberg_ = false;
};

/// dilation_headroom widens the candidate enumeration so that sample sets
/// delta_{2^{-j}} Gamma still cover the box for j up to log2(headroom).
inline SamplingSet make_lattice(const GroupSpec& G, double alpha,
                                const GridSpec& box, uint64_t seed = 7,
                                double dilation_headroom = 2.0) {
    if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");
    SamplingSet S;
    S.group = G;
    S.alpha = alpha;
    S.box = box;

    bool heis = G.name.rfind("heisenberg", 0) == 0 && G.n == 3;
    bool eucl = true;
    for (int w : G.weights)
        if (w != 1) eucl = false;
    if (!heis && !eucl)
        throw ConfigError("lattices implemented for euclidean(n) and heisenberg(1)");
    S.set_heisenberg(heis);

    S.tile.resize(G.n);
    for (int i = 0; i < G.n; ++i) S.tile[i] = std::pow(alpha, G.weights[i]);
    if (heis) S.tile[2] *= 0.5; // covolume of the half-integer center lattice
    S.tile_volume = 1.0;
    for (double t : S.tile) S.tile_volume *= t;

    // enumerate within the box inflated by one tile
    std::vector<long> lo(G.n), hi(G.n);
    for (int i = 0; i < G.n; ++i) {
        double ext =
            box.extent[i] * std::pow(dilation_headroom, G.weights[i]) + S.tile[i];
        lo[i] = static_cast<long>(std::floor(-ext / S.tile[i]));
        hi[i] = static_cast<long>(std::ceil(ext / S.tile[i]));
    }
    std::vector<long> k(G.n, 0);
    std::function<void(int)> rec = [&](int axis) {
        if (axis == G.n) {
            Point p(G.n);
            for (int i = 0; i < G.n; ++i) p[i] = k[i] * S.tile[i];
            S.points.push_back(p);
            return;
        }
        for (long v = lo[axis]; v <= hi[axis]; ++v) {
            k[axis] = v;
            rec(axis + 1);
        }
    };
    rec(0);

    // Monte-Carlo tiling audit: each random box point must lie in exactly
    // one tile among the neighbors of its constructively located one.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const int draws = 10000;
    for (int d = 0; d < draws; ++d) {
        Point x(G.n);
        for (int i = 0; i < G.n; ++i) x[i] = unif(rng) * box.extent[i];
        Point g0 = S.locate(x);
        if (!S.in_tile(g0, x))
            throw TilingViolation("constructive covering failed");
        int count = 0;
        std::vector<long> off(G.n, -1);
        while (true) {
            Point g(G.n);
            for (int i = 0; i < G.n; ++i) g[i] = g0[i] + off[i] * S.tile[i];
            if (S.in_tile(g, x)) ++count;
            int axis = 0;
            while (axis < G.n && ++off[axis] > 1) off[axis++] = -1;
            if (axis == G.n) break;
        }
        if (count != 1)
            throw TilingViolation("tile overlap or gap detected");
    }
    return S;
}

struct CoefficientArray {
    std::map<std::pair<int, size_t>, cplx> entries; // (j, point index) -> c
    const SamplingSet* sampling = nullptr;
    int jmin = 0, jmax = 0;
    size_t dropped = 0; // sample points that fell outside the box
};

/// c_{j,gamma} = (u * psi_j^*)(delta_{2^{-j}} gamma): the group Fourier
/// coefficients of the frame, read off the band functions by
/// interpolation.
inline CoefficientArray analysis(const GridFunction& u, const LPWavelet& w,
                                 const SamplingSet& S, int jmin, int jmax) {
    CoefficientArray c;
    c.sampling = &S;
    c.jmin = jmin;
    c.jmax = jmax;
    size_t in_box = 0;
    for (int j = jmin; j <= jmax; ++j) {
        GridFunction band = lp_band(u, w, j);
        double a = std::pow(2.0, -j);
        for (size_t gi = 0; gi < S.points.size(); ++gi) {
            Point p = S.group.dilate(a, S.points[gi]);
            if (!u.grid.inside(p)) {
                ++c.dropped;
                continue;
            }
            ++in_box;
            c.entries[{j, gi}] = band.interpolate(p);
        }
    }
    if (in_box == 0) throw EmptySampleSet("no sample points inside the box");
    return c;
}

/// Sequence-space norm (sum_j (sum_gamma (2^{j(s-Q/p)} |c|)^p)^{q/p})^{1/q}.
inline double seq_norm(const CoefficientArray& c, const BesovParams& params) {
    const double Q = c.sampling->group.Q;
    std::vector<double> per_scale;
    for (int j = c.jmin; j <= c.jmax; ++j) {
        double weight = std::pow(2.0, j * (params.s - Q / params.p));
        std::vector<double> terms;
        for (const auto& [key, val] : c.entries)
            if (key.first == j) terms.push_back(weight * std::abs(val));
        per_scale.push_back(detail::lq_accumulate(terms, params.p));
    }
    return detail::lq_accumulate(per_scale, params.q);
}

inline double osc_l1(const GridFunction& K, double r) {
    return integrate(osc(K, r)).real();
}

/// Quasi-norm diameter of the tile, estimated over seeded random pairs.
inline double tile_diameter(const SamplingSet& S, uint64_t seed = 11,
                            int draws = 512) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double diam = 0.0;
    for (int d = 0; d < draws; ++d) {
        Point u(S.group.n), v(S.group.n);
        for (int i = 0; i < S.group.n; ++i) {
            u[i] = unif(rng) * S.tile[i];
            v[i] = unif(rng) * S.tile[i];
        }
        diam = std::max(
            diam, S.group.quasi_norm(S.group.product(S.group.inverse(v), u)));
    }
    return diam;
}

namespace detail {

/// Per-axis bound b on the support of atom(x) = psi_j(p^{-1} x): the
/// translate of the kernel's coordinate support box through the group
/// product at p (exact for step <= 2; whole box for deeper groups).
inline std::vector<double> atom_support(const GroupSpec& G, const Point& p,
                                        const std::vector<double>& kernel_support) {
    std::vector<double> b = kernel_support;
    if (G.step > 2) {
        b.assign(G.n, std::numeric_limits<double>::infinity());
        return b;
    }
    for (int k = 0; k < G.n; ++k)
        for (int i = 0; i < G.n; ++i)
            for (int jj = 0; jj < G.n; ++jj) {
                double cc = G.bracket_coeff(i, jj, k);
                if (cc != 0.0)
                    b[k] += 0.5 * std::abs(cc) * std::abs(p[i]) * kernel_support[jj];
            }
    return b;
}

/// Coordinate support radii of a kernel: where |f| exceeds 1e-8 of peak.
inline std::vector<double> kernel_support_radii(const GridFunction& f) {
    const auto& g = f.grid;
    double peak = lp_norm(f, std::numeric_limits<double>::infinity());
    std::vector<double> r(g.group.n, 0.0);
    for (size_t i = 0; i < g.N; ++i) {
        if (std::abs(f.values[i]) <= 1e-8 * peak) continue;
        Point x = g.node(i);
        for (int k = 0; k < g.group.n; ++k)
            r[k] = std::max(r[k], std::abs(x[k]));
    }
    for (int k = 0; k < g.group.n; ++k) r[k] += g.spacing[k];
    return r;
}

} // namespace detail

/// Materialize the atom psi_{j,gamma}(x) = 2^{jQ} psi(gamma^{-1}
/// delta_{2^j} x) = psi_j(p^{-1} x) with p = delta_{2^{-j}} gamma.
inline GridFunction make_atom(const LPWavelet& w, int j, const Point& gamma) {
    const GridFunction& psi_j = w.psi_j(j);
    const GridSpec& g = psi_j.grid;
    Point p = g.group.dilate(std::pow(2.0, -j), gamma);
    GridFunction out(g);
    Point pinv = g.group.inverse(p);
    for (size_t i = 0; i < g.N; ++i)
        out.values[i] = psi_j.interpolate(g.group.product(pinv, g.node(i)));
    return out;
}

/// sum_{j,gamma} c_{j,gamma} psi_{j,gamma}, accumulating each atom only
/// over the nodes inside its support box.
inline GridFunction synthesis(const CoefficientArray& c, const LPWavelet& w,
                              const SamplingSet& S) {
    const GridSpec* gptr = nullptr;
    for (int j = c.jmin; j <= c.jmax; ++j) {
        gptr = &w.psi_j(j).grid;
        break;
    }
    if (!gptr) throw ConfigError("empty scale range");
    const GridSpec& g = *gptr;
    const GroupSpec& G = g.group;
    const int n = G.n;
    GridFunction out(g);

    std::map<int, std::vector<double>> support;
    for (int j = c.jmin; j <= c.jmax; ++j)
        support[j] = detail::kernel_support_radii(w.psi_j(j));

    for (const auto& [key, coeff] : c.entries) {
        if (coeff == cplx(0.0)) continue;
        int j = key.first;
        const GridFunction& psi_j = w.psi_j(j);
        Point p = G.dilate(std::pow(2.0, -j), S.points[key.second]);
        Point pinv = G.inverse(p);
        std::vector<double> b = detail::atom_support(G, p, support[j]);

        // index window per axis around p
        std::vector<int> ilo(n), ihi(n);
        bool empty = false;
        for (int i = 0; i < n; ++i) {
            double xlo = p[i] - b[i], xhi = p[i] + b[i];
            ilo[i] = std::max(0, static_cast<int>(
                                     std::floor(xlo / g.spacing[i] + g.center[i])));
            ihi[i] = std::min(g.points_per_axis[i] - 1,
                              static_cast<int>(std::ceil(xhi / g.spacing[i] +
                                                         g.center[i])));
            if (ilo[i] > ihi[i]) empty = true;
        }
        if (empty) continue;

        std::vector<int> idx(ilo);
        Point x(n);
        while (true) {
            for (int i = 0; i < n; ++i)
                x[i] = (idx[i] - g.center[i]) * g.spacing[i];
            out.values[g.flat_index(idx)] +=
                coeff * psi_j.interpolate(G.product(pinv, x));
            int axis = n - 1;
            while (axis >= 0 && ++idx[axis] > ihi[axis]) idx[axis--] = ilo[axis];
            if (axis < 0) break;
        }
    }
    return out;
}

/// Frame operator S f = sum_{j,gamma} 2^{-jQ} <f, psi_{j,gamma}> psi_{j,gamma}.
inline GridFunction frame_operator(const GridFunction& f, const LPWavelet& w,
                                   const SamplingSet& S, int jmin, int jmax) {
    CoefficientArray c = analysis(f, w, S, jmin, jmax);
    double Q = f.grid.group.Q;
    for (auto& [key, val] : c.entries) val *= std::pow(2.0, -key.first * Q);
    return synthesis(c, w, S);
}

struct NeumannResult {
    GridFunction g;
    int iterations = 0;
    std::vector<double> residuals; // ||f - |W| S g_n|| / ||f||
};

/// Inverts |W| S by the Neumann series g_{n+1} = g_n + (f - |W| S g_n);
/// converges when the deviation rho = ||f - |W| S f|| / ||f|| is < 1.
inline NeumannResult neumann_invert(const GridFunction& f, const LPWavelet& w,
                                    const SamplingSet& S, int jmin, int jmax,
                                    double tol = 1e-3, int max_iter = 30) {
    double fnorm = lp_norm(f, 2.0);
    if (fnorm == 0.0) return {f, 0, {0.0}};
    NeumannResult res;
    res.g = f;
    for (int it = 0; it <= max_iter; ++it) {
        GridFunction Sg = frame_operator(res.g, w, S, jmin, jmax);
        Sg *= cplx(S.tile_volume, 0.0);
        GridFunction r = f;
        r -= Sg;
        double rel = lp_norm(r, 2.0) / fnorm;
        res.residuals.push_back(rel);
        if (it == 0 && rel >= 1.0)
            throw NotContractive("deviation rho >= 1: sampling too sparse");
        if (rel <= tol) {
            res.iterations = it;
            return res;
        }
        res.g += r;
    }
    throw MaxIterExceeded("Neumann iteration did not reach tolerance");
}

/// Dual-frame coefficients <f, dual psi_{j,gamma}> = <S^{-1} f, psi_{j,gamma}>.
inline CoefficientArray dual_coefficients(const GridFunction& f,
                                          const LPWavelet& w,
                                          const SamplingSet& S, int jmin,
                                          int jmax, double tol = 1e-3,
                                          int max_iter = 30) {
    NeumannResult inv = neumann_invert(f, w, S, jmin, jmax, tol, max_iter);
    GridFunction ginv = inv.g;
    ginv *= cplx(S.tile_volume, 0.0); // S^{-1} = |W| (|W| S)^{-1}
    return analysis(ginv, w, S, jmin, jmax);
}

struct DiscreteEquivReport {
    RatioStats norm_ratios;     // seq_norm / besov_norm per function
    double band_fraction = 0.0; // share of (u, j) pairs inside the eps band
    double osc = 0.0;           // measured osc_l1 at the tile radius
    double scale_covariance = 0.0; // max per-scale mean-ratio deviation
};

inline DiscreteEquivReport discrete_equiv_report(
    const std::vector<GridFunction>& test_set, const LPWavelet& w,
    const SamplingSet& S, const BesovParams& params, int jmin, int jmax) {
    DiscreteEquivReport rep;
    double r = tile_diameter(S);
    // density precheck on the L1-normalized reproducing kernel
    GridFunction Kn = w.K.kernel;
    double l1 = lp_norm(Kn, 1.0);
    if (l1 > 0.0) Kn *= cplx(1.0 / l1, 0.0);
    rep.osc = osc_l1(Kn, r);
    if (rep.osc >= 1.0)
        throw DensityPrecheckFailed("oscillation L1 norm >= 1 at tile radius");

    const double Q = S.group.Q;
    std::map<int, std::vector<double>> per_scale_ratio;
    size_t pairs = 0, in_band = 0;
    double eps = rep.osc;
    for (const auto& u : test_set) {
        // one band computation per scale serves the sampled coefficients,
        // the sequence norm, and the continuous norm alike
        std::vector<double> seq_scales, bes_scales;
        for (int j = jmin; j <= jmax; ++j) {
            GridFunction band = lp_band(u, w, j);
            double band_norm = lp_norm(band, params.p);
            bes_scales.push_back(std::pow(2.0, j * params.s) * band_norm);

            double a = std::pow(2.0, -j);
            std::vector<double> samples;
            for (const auto& gamma : S.points) {
                Point p = S.group.dilate(a, gamma);
                if (u.grid.inside(p))
                    samples.push_back(std::abs(band.interpolate(p)));
            }
            std::vector<double> wterms(samples);
            double sweight = std::pow(2.0, j * (params.s - Q / params.p));
            for (auto& t : wterms) t *= sweight;
            seq_scales.push_back(detail::lq_accumulate(wterms, params.p));

            if (band_norm <= 0.0) continue;
            std::vector<double> rterms(samples);
            double rweight = std::pow(2.0, -j * Q / params.p);
            for (auto& t : rterms) t *= rweight;
            double ratio = detail::lq_accumulate(rterms, params.p) / band_norm;
            per_scale_ratio[j].push_back(ratio);
            ++pairs;
            double lo = (1.0 - eps) / std::pow(S.tile_volume, 1.0 / params.p);
            double hi = (1.0 + eps) / std::pow(S.tile_volume, 1.0 / params.p);
            if (ratio >= lo && ratio <= hi) ++in_band;
        }
        double seq = detail::lq_accumulate(seq_scales, params.q);
        double bes = detail::lq_accumulate(bes_scales, params.q);
        if (bes > 0.0) rep.norm_ratios.add(seq / bes);
    }
    rep.band_fraction = pairs ? static_cast<double>(in_band) / pairs : 0.0;
    // scale covariance: per-scale mean ratios against the j=0 (or first) one
    double ref = -1.0, worst = 0.0;
    for (const auto& [j, v] : per_scale_ratio) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= v.empty() ? 1.0 : static_cast<double>(v.size());
        if (ref < 0.0) ref = mean;
        if (ref > 0.0) worst = std::max(worst, std::abs(mean / ref - 1.0));
    }
    rep.scale_covariance = worst;
    return rep;
}

struct MoleculeDecay {
    double sup_weighted = 0.0; // sup |m(x)| (1 + 2^min |p^{-1}x|)^{Q+1} 2^{-jQ}
    double theta_fit = 0.0;    // decay exponent vs scale separation
};

inline double molecule_weighted_sup(const LPWavelet& w, const SamplingSet& S,
                                    int j, int l, size_t gamma_index) {
    const GroupSpec& G = S.group;
    GridFunction atom = make_atom(w, j, S.points[gamma_index]);
    GridFunction m = wavelet_band(w, atom, l);
    Point p = G.dilate(std::pow(2.0, -j), S.points[gamma_index]);
    Point pinv = G.inverse(p);
    double scale = std::pow(2.0, std::min(j, l));
    double sup = 0.0;
    for (size_t i = 0; i < m.grid.N; ++i) {
        double d = G.quasi_norm(G.product(pinv, m.grid.node(i)));
        double wgt = std::pow(1.0 + scale * d, G.Q + 1);
        sup = std::max(sup, std::abs(m.values[i]) * wgt);
    }
    return sup * std::pow(2.0, -j * static_cast<double>(G.Q));
}

inline MoleculeDecay molecule_decay_check(const LPWavelet& w,
                                          const SamplingSet& S, int j, int l,
                                          size_t gamma_index) {
    MoleculeDecay out;
    out.sup_weighted = molecule_weighted_sup(w, S, j, l, gamma_index);
    if (j != l) {
        double base = molecule_weighted_sup(w, S, j, j, gamma_index);
        out.theta_fit =
            -std::log2(out.sup_weighted / base) / std::abs(j - l);
    }
    return out;
}

struct FrameReport {
    double alpha = 0.0;
    double tile_volume = 0.0;
    double osc = 0.0;
    double rho = 0.0; // max ||f - |W| S f|| / ||f|| over the probe set
    int neumann_iters = 0;
    double reconstruction_residual = 0.0;
    double spread = 0.0;

    json to_json() const {
        return {{"alpha", alpha},
                {"tile_volume", tile_volume},
                {"osc_l1", osc},
                {"rho", rho},
                {"neumann_iters", neumann_iters},
                {"reconstruction_residual", reconstruction_residual},
                {"spread", spread}};
    }
};

/// Per-density tightness sweep: oscillation, contraction deviation, and
/// discrete-equivalence spread, all of which tighten as alpha decreases.
inline std::vector<FrameReport> tightness_vs_density(
    const LPWavelet& w, const std::vector<double>& alpha_list,
    const std::vector<GridFunction>& test_set, const GridSpec& box,
    const BesovParams& params, int jmin, int jmax) {
    if (alpha_list.size() < 3) throw ConfigError("need at least 3 densities");
    std::vector<FrameReport> table;
    for (double alpha : alpha_list) {
        SamplingSet S = make_lattice(box.group, alpha, box);
        FrameReport rep;
        rep.alpha = alpha;
        rep.tile_volume = S.tile_volume;
        GridFunction Kn = w.K.kernel;
        double l1 = lp_norm(Kn, 1.0);
        if (l1 > 0.0) Kn *= cplx(1.0 / l1, 0.0);
        rep.osc = osc_l1(Kn, tile_diameter(S));
        double rho = 0.0;
        for (const auto& f : test_set) {
            double fn = lp_norm(f, 2.0);
            if (fn == 0.0) continue;
            GridFunction Sf = frame_operator(f, w, S, jmin, jmax);
            Sf *= cplx(S.tile_volume, 0.0);
            GridFunction r = f;
            r -= Sf;
            rho = std::max(rho, lp_norm(r, 2.0) / fn);
        }
        rep.rho = rho;
        rep.spread =
            discrete_equiv_report(test_set, w, S, params, jmin, jmax)
                .norm_ratios.spread();
        table.push_back(rep);
    }
    return table;
}

} // namespace carnot

#endif
