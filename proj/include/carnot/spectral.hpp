#ifndef CARNOT_SPECTRAL_HPP
#define CARNOT_SPECTRAL_HPP

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "carnot/errors.hpp"
#include "carnot/grid.hpp"
#include "carnot/io.hpp"

namespace carnot {

/// Scalar spectral profile on [0, infinity).
struct MultiplierProfile {
    std::function<double(double)> evaluator;
    std::string smoothness_class = "schwartz"; // compact-smooth | schwartz | entire
    std::optional<std::pair<double, double>> support_hint;
    std::string descriptor = "anon"; // human-readable id, used as cache key

    double operator()(double lambda) const { return evaluator(lambda); }
};

/// Sparse symmetric discretization of L = -sum_i Y_i^2 on a truncated box
/// with zero (Dirichlet) exterior values. Each first-layer field Y_i is
/// discretized as a forward difference with node coefficients from the
/// exact left-invariant field, and L = sum_i D_i^T D_i, which keeps the
/// matrix symmetric positive semidefinite by construction. (Squaring a
/// centered first difference would instead carry checkerboard null modes
/// into the spectral calculus.)
class SubLaplacianMatrix {
public:
    GridSpec grid;
    Eigen::MatrixXd basis_rotation; // l x l, applied to the weight-1 fields
    Eigen::SparseMatrix<double> matrix;
    double lambda_max = 0.0;
    int dense_threshold = 8192;

    const Eigen::MatrixXd& eigenvectors() const {
        decompose_();
        return eig_->eigenvectors();
    }
    const Eigen::VectorXd& eigenvalues() const {
        decompose_();
        return eig_->eigenvalues();
    }

    std::string cache_tag() const { return tag_; }
    void set_cache_tag(std::string t) { tag_ = std::move(t); }

private:
    mutable std::shared_ptr<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>> eig_;
    std::string tag_;

    void decompose_() const {
        if (eig_) return;
        if (static_cast<int>(grid.N) > dense_threshold)
            throw DenseThresholdExceeded(
                "dense eigendecomposition disabled above threshold; use chebyshev");
        eig_ = std::make_shared<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>>(
            Eigen::MatrixXd(matrix));
        if (eig_->info() != Eigen::Success)
            throw Error("eigendecomposition failed");
    }
};

struct SpectralKernel {
    GridFunction kernel;
    MultiplierProfile profile;
    std::string backend; // "eig" or "chebyshev(<degree>)"
};

inline SubLaplacianMatrix assemble_sublaplacian(
    const GridSpec& grid,
    const std::optional<Eigen::MatrixXd>& rotation = std::nullopt) {
    const GroupSpec& G = grid.group;
    const int l = G.l;
    Eigen::MatrixXd R = rotation ? *rotation : Eigen::MatrixXd::Identity(l, l);
    if (R.rows() != l || R.cols() != l ||
        (R.transpose() * R - Eigen::MatrixXd::Identity(l, l)).cwiseAbs().maxCoeff() >
            1e-10)
        throw NonOrthogonalRotation("basis rotation must be l x l orthogonal");

    const int n = G.n;
    const size_t N = grid.N;
    SubLaplacianMatrix out;
    out.grid = grid;
    out.basis_rotation = R;
    out.matrix.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));

    // strides for neighbor lookup in the flattened row-major index
    std::vector<long> stride(n, 1);
    for (int i = n - 2; i >= 0; --i)
        stride[i] = stride[i + 1] * grid.points_per_axis[i + 1];

    Eigen::SparseMatrix<double> L(static_cast<Eigen::Index>(N),
                                  static_cast<Eigen::Index>(N));
    for (int i = 0; i < l; ++i) {
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(N * static_cast<size_t>(n + 1));
        for (size_t row = 0; row < N; ++row) {
            Point x = grid.node(row);
            // rotated field: sum_m R(i,m) Y_m, coefficients at this node
            Point a(n, 0.0);
            for (int m = 0; m < l; ++m) {
                if (R(i, m) == 0.0) continue;
                Point am = G.left_field_coeffs(m, x);
                for (int k = 0; k < n; ++k) a[k] += R(i, m) * am[k];
            }
            // decode per-axis index of this row
            size_t s = row;
            std::vector<int> idx(n);
            for (int k = n - 1; k >= 0; --k) {
                idx[k] = static_cast<int>(s % grid.points_per_axis[k]);
                s /= grid.points_per_axis[k];
            }
            double diag = 0.0;
            for (int k = 0; k < n; ++k) {
                if (a[k] == 0.0) continue;
                double c = a[k] / grid.spacing[k];
                diag -= c;
                if (idx[k] + 1 < grid.points_per_axis[k])
                    trips.emplace_back(static_cast<int>(row),
                                       static_cast<int>(row + stride[k]), c);
                // neighbor outside the box: Dirichlet zero, term dropped
            }
            if (diag != 0.0)
                trips.emplace_back(static_cast<int>(row), static_cast<int>(row),
                                   diag);
        }
        Eigen::SparseMatrix<double> D(static_cast<Eigen::Index>(N),
                                      static_cast<Eigen::Index>(N));
        D.setFromTriplets(trips.begin(), trips.end());
        Eigen::SparseMatrix<double> Dt = D.transpose();
        L = L + Eigen::SparseMatrix<double>(Dt * D);

        // difference rows based one step outside the low face of each axis:
        // they carry a single in-box entry, so their normal-equation
        // contribution is a diagonal bump at the adjacent boundary node
        std::vector<Eigen::Triplet<double>> wall;
        for (size_t row = 0; row < N; ++row) {
            size_t s = row;
            std::vector<int> idx(n);
            for (int k = n - 1; k >= 0; --k) {
                idx[k] = static_cast<int>(s % grid.points_per_axis[k]);
                s /= grid.points_per_axis[k];
            }
            Point y = grid.node(row);
            for (int k = 0; k < n; ++k) {
                if (idx[k] != 0) continue;
                Point xg = y;
                xg[k] -= grid.spacing[k];
                double ak = 0.0;
                for (int m = 0; m < l; ++m) {
                    if (R(i, m) == 0.0) continue;
                    ak += R(i, m) * G.left_field_coeffs(m, xg)[k];
                }
                if (ak == 0.0) continue;
                double c = ak / grid.spacing[k];
                wall.emplace_back(static_cast<int>(row), static_cast<int>(row),
                                  c * c);
            }
        }
        Eigen::SparseMatrix<double> W(static_cast<Eigen::Index>(N),
                                      static_cast<Eigen::Index>(N));
        W.setFromTriplets(wall.begin(), wall.end());
        L = L + W;
    }
    out.matrix = L;

    // spectral bound: 50 power-iteration steps with a 5% safety factor
    Eigen::VectorXd v = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(N));
    v.normalize();
    double lam = 0.0;
    for (int it = 0; it < 50; ++it) {
        Eigen::VectorXd w = L * v;
        lam = w.norm();
        if (lam == 0.0) break;
        v = w / lam;
    }
    out.lambda_max = lam * 1.05;
    return out;
}

namespace detail {

/// Chebyshev interpolation coefficients of prof on [0, lambda_max],
/// degree grown until the sampled sup error is <= tol.
inline std::vector<double> chebyshev_coeffs(const MultiplierProfile& prof,
                                            double lambda_max, int& degree_out,
                                            double tol = 1e-8) {
    auto fit = [&](int deg) {
        std::vector<double> c(deg + 1, 0.0);
        std::vector<double> fv(deg + 1);
        for (int k = 0; k <= deg; ++k) {
            double theta = M_PI * (k + 0.5) / (deg + 1);
            double lam = 0.5 * lambda_max * (std::cos(theta) + 1.0);
            fv[k] = prof(lam);
        }
        for (int m = 0; m <= deg; ++m) {
            double s = 0.0;
            for (int k = 0; k <= deg; ++k)
                s += fv[k] * std::cos(M_PI * m * (k + 0.5) / (deg + 1));
            c[m] = 2.0 / (deg + 1) * s;
        }
        c[0] *= 0.5;
        return c;
    };
    auto sup_error = [&](const std::vector<double>& c) {
        double worst = 0.0;
        for (int i = 0; i < 4096; ++i) {
            double lam = lambda_max * i / 4095.0;
            double t = 2.0 * lam / lambda_max - 1.0;
            double tkm1 = 1.0, tk = t, acc = c[0] + (c.size() > 1 ? c[1] * t : 0.0);
            for (size_t m = 2; m < c.size(); ++m) {
                double tk1 = 2.0 * t * tk - tkm1;
                acc += c[m] * tk1;
                tkm1 = tk;
                tk = tk1;
            }
            worst = std::max(worst, std::abs(acc - prof(lam)));
        }
        return worst;
    };
    for (int deg = 64; deg <= 4096; deg *= 2) {
        auto c = fit(deg);
        if (sup_error(c) <= tol) {
            degree_out = deg;
            return c;
        }
    }
    throw ChebyshevDegreeTooLow(
        "profile not resolvable to 1e-8 by degree-4096 polynomial on [0,lambda_max]");
}

inline Eigen::VectorXd apply_real(const SubLaplacianMatrix& Lm,
                                  const MultiplierProfile& prof,
                                  const Eigen::VectorXd& f,
                                  const std::string& backend, int& degree_out) {
    if (backend == "eig") {
        if (static_cast<int>(Lm.grid.N) > Lm.dense_threshold)
            throw DenseThresholdExceeded("grid too large for the eig backend");
        const auto& V = Lm.eigenvectors();
        const auto& lam = Lm.eigenvalues();
        Eigen::VectorXd g = V.transpose() * f;
        for (Eigen::Index i = 0; i < g.size(); ++i) g[i] *= prof(std::max(0.0, lam[i]));
        degree_out = 0;
        return V * g;
    }
    if (backend == "chebyshev") {
        auto c = chebyshev_coeffs(prof, Lm.lambda_max, degree_out);
        // three-term recurrence for T_m(A), A = (2/lambda_max) L - I
        double scale = 2.0 / Lm.lambda_max;
        Eigen::VectorXd tkm1 = f;
        Eigen::VectorXd tk = scale * (Lm.matrix * f) - f;
        Eigen::VectorXd acc = c[0] * tkm1;
        if (c.size() > 1) acc += c[1] * tk;
        for (size_t m = 2; m < c.size(); ++m) {
            Eigen::VectorXd tk1 = 2.0 * (scale * (Lm.matrix * tk) - tk) - tkm1;
            acc += c[m] * tk1;
            tkm1.swap(tk);
            tk.swap(tk1);
        }
        return acc;
    }
    throw ConfigError("unknown spectral backend: " + backend);
}

} // namespace detail

inline GridFunction apply_multiplier(const SubLaplacianMatrix& Lm,
                                     const MultiplierProfile& prof,
                                     const GridFunction& f,
                                     const std::string& backend = "eig") {
    if (!(f.grid == Lm.grid)) throw GridMismatch("function grid != operator grid");
    const size_t N = Lm.grid.N;
    Eigen::VectorXd re(N), im(N);
    bool has_im = false;
    for (size_t i = 0; i < N; ++i) {
        re[i] = f.values[i].real();
        im[i] = f.values[i].imag();
        if (im[i] != 0.0) has_im = true;
    }
    int deg = 0;
    Eigen::VectorXd gre = detail::apply_real(Lm, prof, re, backend, deg);
    GridFunction out(Lm.grid);
    if (has_im) {
        Eigen::VectorXd gim = detail::apply_real(Lm, prof, im, backend, deg);
        for (size_t i = 0; i < N; ++i) out.values[i] = cplx(gre[i], gim[i]);
    } else {
        for (size_t i = 0; i < N; ++i) out.values[i] = cplx(gre[i], 0.0);
    }
    return out;
}

/// Convolution kernel of the multiplier: the operator applied to the
/// discrete delta at the identity node (scaled to unit quadrature mass).
inline SpectralKernel kernel_of(const SubLaplacianMatrix& Lm,
                                const MultiplierProfile& prof,
                                const std::string& backend = "eig") {
    std::string key;
    if (!Lm.cache_tag().empty()) {
        key = Lm.cache_tag() + "-" + prof.descriptor + "-" + backend;
        for (auto& ch : key)
            if (!std::isalnum(static_cast<unsigned char>(ch))) ch = '_';
        GridFunction cached;
        if (cache_load(key, cached) && cached.grid == Lm.grid)
            return {cached, prof, backend};
    }
    GridFunction delta(Lm.grid);
    delta.values[Lm.grid.identity_index()] = cplx(1.0 / Lm.grid.volume_element, 0.0);
    GridFunction k = apply_multiplier(Lm, prof, delta, backend);
    if (!key.empty()) cache_store(key, k);
    return {k, prof, backend};
}

/// Rescaled profile lambda -> prof(c * lambda).
inline MultiplierProfile scaled_profile(const MultiplierProfile& prof, double c) {
    MultiplierProfile out = prof;
    auto base = prof.evaluator;
    out.evaluator = [base, c](double lam) { return base(c * lam); };
    if (prof.support_hint)
        out.support_hint = {prof.support_hint->first / c, prof.support_hint->second / c};
    out.descriptor = prof.descriptor + "-x" + fmt_g17(c);
    return out;
}

/// Relative L2 distance between the kernel of the 2^{-2j}-rescaled profile
/// and the 2^j grid dilation of the base kernel (boundary band excluded).
inline double dilation_covariance_check(const SubLaplacianMatrix& Lm,
                                        const MultiplierProfile& prof, int j,
                                        const std::string& backend = "eig",
                                        double exclude_band = 0.1) {
    double a = std::pow(2.0, j);
    GridFunction k_scaled =
        kernel_of(Lm, scaled_profile(prof, std::pow(2.0, -2 * j)), backend).kernel;
    GridFunction k_dilated = dilate_fn(a, kernel_of(Lm, prof, backend).kernel);
    return rel_l2_dist(k_scaled, k_dilated, exclude_band);
}

/// Independent oracle for euclidean(1): inverse Fourier transform of
/// xi -> prof(xi^2) by direct quadrature on a frequency grid, no spectral
/// matrix involved.
inline GridFunction euclidean_oracle_kernel(const MultiplierProfile& prof,
                                            const GridSpec& grid) {
    const GroupSpec& G = grid.group;
    for (int w : G.weights)
        if (w != 1) throw NonEuclideanGroup("oracle requires euclidean(n)");
    for (int i = 0; i < G.n; ++i)
        for (int j = 0; j < G.n; ++j)
            for (int k = 0; k < G.n; ++k)
                if (G.bracket_coeff(i, j, k) != 0.0)
                    throw NonEuclideanGroup("oracle requires euclidean(n)");
    if (G.n != 1)
        throw ConfigError("Fourier oracle implemented for dimension 1");

    // frequency cutoff: where the profile has decayed below 1e-14
    double xi_max = 1.0;
    while (xi_max < 1e4) {
        bool dead = true;
        for (int k = 0; k < 32; ++k)
            if (std::abs(prof(std::pow(xi_max * (1.0 + k / 32.0), 2))) > 1e-14)
                dead = false;
        if (dead) break;
        xi_max *= 1.5;
    }
    xi_max *= 1.2;

    const int M = 16384;
    double dxi = xi_max / M;
    GridFunction out(grid);
    for (size_t i = 0; i < grid.N; ++i) {
        double x = grid.node(i)[0];
        // k(x) = (1/pi) int_0^inf prof(xi^2) cos(x xi) dxi (even integrand)
        double s = 0.5 * prof(0.0);
        for (int m = 1; m < M; ++m) {
            double xi = m * dxi;
            s += prof(xi * xi) * std::cos(x * xi);
        }
        out.values[i] = cplx(s * dxi / M_PI, 0.0);
    }
    return out;
}

} // namespace carnot

#endif
