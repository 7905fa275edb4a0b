#ifndef CARNOT_BESOV_HPP
#define CARNOT_BESOV_HPP

#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "carnot/errors.hpp"
#include "carnot/grid.hpp"
#include "carnot/spectral.hpp"
#include "carnot/wavelet.hpp"

namespace carnot {

struct BesovParams {
    double p = 2.0;
    double q = 2.0;
    double s = 0.0;
};

struct LPCoefficients {
    std::map<int, double> by_scale; // j -> ||u * psi_j^*||_p
    BesovParams params;
    int J = 0;
};

struct RatioStats {
    double min = std::numeric_limits<double>::infinity();
    double max = 0.0;
    std::vector<double> ratios;

    void add(double r) {
        ratios.push_back(r);
        min = std::min(min, r);
        max = std::max(max, r);
    }
    double spread() const { return min > 0.0 ? max / min : std::numeric_limits<double>::infinity(); }
};

inline GridFunction lp_band(const GridFunction& u, const LPWavelet& w, int j) {
    return wavelet_band(w, u, j);
}

namespace detail {
inline double lq_accumulate(const std::vector<double>& terms, double q) {
    if (std::isinf(q)) {
        double m = 0.0;
        for (double t : terms) m = std::max(m, t);
        return m;
    }
    double s = 0.0;
    for (double t : terms) s += std::pow(t, q);
    return std::pow(s, 1.0 / q);
}
} // namespace detail

/// Truncated dyadic norm: l^q over |j| <= J (clipped to the cached scale
/// range) of 2^{js} ||u * psi_j^*||_p.
inline std::pair<double, LPCoefficients> besov_norm(const GridFunction& u,
                                                    const LPWavelet& w,
                                                    const BesovParams& params,
                                                    int J) {
    if (std::abs(params.s) >= w.moments_order)
        throw MomentOrderTooLow("need |s| < verified moment order");
    LPCoefficients coeffs;
    coeffs.params = params;
    coeffs.J = J;
    std::vector<double> terms;
    for (int j = std::max(-J, w.jmin); j <= std::min(J, w.jmax); ++j) {
        double band = lp_norm(lp_band(u, w, j), params.p);
        coeffs.by_scale[j] = band;
        terms.push_back(std::pow(2.0, j * params.s) * band);
    }
    return {detail::lq_accumulate(terms, params.q), coeffs};
}

/// Continuous-scale norm: L^q(da/a) trapezoid in log a of
/// a^s ||u * D_a psi^*||_p over a log-spaced scale grid, with
/// D_a psi realized as the kernel of m(lambda / a^2).
inline double cwt_norm(const GridFunction& u, const SubLaplacianMatrix& Lm,
                       const MultiplierProfile& m, int moment_order,
                       const BesovParams& params,
                       const std::vector<double>& scale_grid,
                       const std::string& backend = "eig") {
    if (std::abs(params.s) >= moment_order)
        throw MomentOrderTooLow("need |s| < moment order of the wavelet");
    if (scale_grid.size() < 2) throw ConfigError("need at least two scales");
    std::vector<double> vals(scale_grid.size());
    for (size_t i = 0; i < scale_grid.size(); ++i) {
        double a = scale_grid[i];
        if (!(a > 0.0)) throw NonPositiveScale("scales must be > 0");
        MultiplierProfile prof = scaled_profile(m, 1.0 / (a * a));
        GridFunction band = apply_multiplier(Lm, prof, u, backend);
        vals[i] = std::pow(a, params.s) * lp_norm(band, params.p);
    }
    if (std::isinf(params.q)) {
        double mx = 0.0;
        for (double v : vals) mx = std::max(mx, v);
        return mx;
    }
    // trapezoid in log a of vals^q
    double s = 0.0;
    for (size_t i = 0; i + 1 < scale_grid.size(); ++i) {
        double dl = std::log(scale_grid[i + 1] / scale_grid[i]);
        s += 0.5 * dl * (std::pow(vals[i], params.q) + std::pow(vals[i + 1], params.q));
    }
    return std::pow(s, 1.0 / params.q);
}

inline std::vector<double> log_scale_grid(double eps, double A, int n) {
    if (!(eps > 0.0) || !(A > eps) || n < 2) throw ConfigError("bad scale grid");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = eps * std::pow(A / eps, static_cast<double>(i) / (n - 1));
    return g;
}

/// Heat-semigroup characterization: the continuous norm taken with the
/// kernel of lambda^k e^{-lambda}.
inline double heat_char_norm(const GridFunction& u, const SubLaplacianMatrix& Lm,
                             int k, const BesovParams& params,
                             const std::vector<double>& t_grid,
                             const std::string& backend = "eig") {
    MultiplierProfile prof;
    prof.evaluator = [k](double lam) { return std::pow(lam, k) * std::exp(-lam); };
    prof.descriptor = "mexican-" + std::to_string(k) + "[heat]";
    return cwt_norm(u, Lm, prof, 2 * k, params, t_grid, backend);
}

/// Per-function ratios of the dyadic norms taken with two different
/// wavelet systems (possibly over two different sub-Laplacians on the
/// same grid).
inline RatioStats norm_equiv_report(const std::vector<GridFunction>& test_set,
                                    const LPWavelet& w1, const LPWavelet& w2,
                                    const BesovParams& params, int J) {
    RatioStats stats;
    for (const auto& u : test_set) {
        double n1 = besov_norm(u, w1, params, J).first;
        double n2 = besov_norm(u, w2, params, J).first;
        if (n2 > 0.0) stats.add(n1 / n2);
    }
    return stats;
}

/// Ratios ||L^k u||_{s-2k} / ||u||_s over a test set; the smoothing-order
/// shift is an isomorphism so the spread stays bounded.
inline RatioStats laplacian_shift_check(const std::vector<GridFunction>& test_set,
                                        const SubLaplacianMatrix& Lm,
                                        const LPWavelet& w, int k,
                                        const BesovParams& params, int J) {
    RatioStats stats;
    BesovParams shifted = params;
    shifted.s = params.s - 2.0 * k;
    for (const auto& u : test_set) {
        GridFunction v = u;
        for (int i = 0; i < k; ++i) {
            GridFunction lv(v.grid);
            Eigen::VectorXd re(v.grid.N), im(v.grid.N);
            for (size_t m = 0; m < v.grid.N; ++m) {
                re[m] = v.values[m].real();
                im[m] = v.values[m].imag();
            }
            Eigen::VectorXd lre = Lm.matrix * re, lim = Lm.matrix * im;
            for (size_t m = 0; m < v.grid.N; ++m)
                lv.values[m] = cplx(lre[m], lim[m]);
            v = lv;
        }
        double num = besov_norm(v, w, shifted, J).first;
        double den = besov_norm(u, w, params, J).first;
        if (den > 0.0) stats.add(num / den);
    }
    return stats;
}

/// max ||L1^k f||_2 / ||L2^k f||_2 and its reciprocal over band-passed f.
inline std::pair<double, double> sublaplacian_commensurability(
    const SubLaplacianMatrix& Lm1, const SubLaplacianMatrix& Lm2, int k,
    const std::vector<GridFunction>& test_set) {
    if (!(Lm1.grid == Lm2.grid)) throw GridMismatch("operators on different grids");
    double fwd = 0.0, rev = 0.0;
    for (const auto& f : test_set) {
        Eigen::VectorXd re(f.grid.N);
        for (size_t m = 0; m < f.grid.N; ++m) re[m] = f.values[m].real();
        Eigen::VectorXd v1 = re, v2 = re;
        for (int i = 0; i < k; ++i) {
            v1 = Lm1.matrix * v1;
            v2 = Lm2.matrix * v2;
        }
        double n1 = v1.norm(), n2 = v2.norm();
        if (n1 > 0.0 && n2 > 0.0) {
            fwd = std::max(fwd, n1 / n2);
            rev = std::max(rev, n2 / n1);
        }
    }
    return {fwd, rev};
}

} // namespace carnot

#endif
