#ifndef CARNOT_GROUP_HPP
#define CARNOT_GROUP_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "carnot/errors.hpp"

namespace carnot {

using Point = std::vector<double>;

/// Multi-index over the coordinates of a graded group, with its
/// homogeneous degree d(I) = sum_i I_i * d_i.
struct MultiIndex {
    std::vector<int> I;
    int d = 0;

    int order() const { return std::accumulate(I.begin(), I.end(), 0); }
};

/// A stratified (graded, step-nilpotent) Lie group in exponential
/// coordinates of the first kind. The bracket table c^k_{ij} encodes
/// [Y_i, Y_j] = sum_k c^k_{ij} Y_k over the chosen graded basis.
class GroupSpec {
public:
    int n = 0;                   // topological dimension
    std::vector<int> weights;    // d_1 <= ... <= d_n
    int step = 1;                // max d_i
    int l = 0;                   // dim V_1
    int Q = 0;                   // homogeneous dimension, sum d_i
    std::string name;            // preset name or "custom"

    GroupSpec() = default;

    GroupSpec(int n_, std::vector<int> weights_,
              std::vector<std::array<double, 4>> bracket_entries,
              std::string name_ = "custom")
        : n(n_), weights(std::move(weights_)), name(std::move(name_)) {
        if (static_cast<int>(weights.size()) != n)
            throw DimensionMismatch("weights length != n");
        for (int i = 1; i < n; ++i)
            if (weights[i] < weights[i - 1])
                throw GradingViolation("weights must be non-decreasing");
        step = weights.empty() ? 1 : weights.back();
        Q = std::accumulate(weights.begin(), weights.end(), 0);
        l = static_cast<int>(std::count(weights.begin(), weights.end(), 1));
        table_.assign(static_cast<size_t>(n) * n * n, 0.0);
        for (const auto& e : bracket_entries) {
            int i = static_cast<int>(e[0]), j = static_cast<int>(e[1]),
                k = static_cast<int>(e[2]);
            if (i < 0 || i >= n || j < 0 || j >= n || k < 0 || k >= n)
                throw IndexOutOfRange("bracket index out of range");
            at(i, j, k) = e[3];
            at(j, i, k) = -e[3]; // antisymmetric completion
        }
        validate();
    }

    double bracket_coeff(int i, int j, int k) const { return at(i, j, k); }

    /// [x, y] through the bracket table.
    Point bracket(const Point& x, const Point& y) const {
        Point z(n, 0.0);
        for (int i = 0; i < n; ++i) {
            if (x[i] == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                if (y[j] == 0.0) continue;
                for (int k = 0; k < n; ++k) {
                    double c = at(i, j, k);
                    if (c != 0.0) z[k] += c * x[i] * y[j];
                }
            }
        }
        return z;
    }

    /// Group product by the Baker-Campbell-Hausdorff series, exact for
    /// nilpotency step <= 3 (all presets are step <= 2).
    Point product(const Point& x, const Point& y) const {
        if (static_cast<int>(x.size()) != n || static_cast<int>(y.size()) != n)
            throw DimensionMismatch("point length != n");
        if (step > 3)
            throw UnsupportedStep("BCH product implemented for step <= 3");
        Point z(n);
        for (int i = 0; i < n; ++i) z[i] = x[i] + y[i];
        if (step >= 2) {
            Point xy = bracket(x, y);
            for (int i = 0; i < n; ++i) z[i] += 0.5 * xy[i];
            if (step >= 3) {
                Point xxy = bracket(x, xy);
                Point yyx = bracket(y, bracket(y, x));
                for (int i = 0; i < n; ++i)
                    z[i] += (xxy[i] + yyx[i]) / 12.0;
            }
        }
        return z;
    }

    Point inverse(const Point& x) const {
        Point z(n);
        for (int i = 0; i < n; ++i) z[i] = -x[i];
        return z;
    }

    /// Anisotropic dilation delta_a.
    Point dilate(double a, const Point& x) const {
        if (!(a > 0.0)) throw NonPositiveScale("dilation scale must be > 0");
        Point z(n);
        for (int i = 0; i < n; ++i) z[i] = std::pow(a, weights[i]) * x[i];
        return z;
    }

    /// Koranyi-type homogeneous quasi-norm
    /// |x| = (sum_i x_i^{2M/d_i})^{1/(2M)}, M = lcm of the weights.
    double quasi_norm(const Point& x) const {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            s += std::pow(x[i] * x[i], static_cast<double>(M_) / weights[i]);
        return std::pow(s, 1.0 / (2.0 * M_));
    }

    /// Coefficients of the left-invariant field Y_i at x: the t-derivative
    /// of t -> x * (t e_i) at t = 0; exact from the BCH terms linear in t.
    Point left_field_coeffs(int i, const Point& x) const {
        if (i < 0 || i >= n) throw IndexOutOfRange("field index out of range");
        Point ei(n, 0.0);
        ei[i] = 1.0;
        Point z = ei;
        if (step >= 2) {
            Point xe = bracket(x, ei);
            for (int k = 0; k < n; ++k) z[k] += 0.5 * xe[k];
            if (step >= 3) {
                Point xxe = bracket(x, xe);
                for (int k = 0; k < n; ++k) z[k] += xxe[k] / 12.0;
            }
        }
        return z;
    }

    /// All multi-indices with homogeneous degree d(I) <= k, lexicographic.
    std::vector<MultiIndex> poly_basis(int k) const {
        std::vector<MultiIndex> out;
        MultiIndex cur;
        cur.I.assign(n, 0);
        enumerate_(0, k, cur, out);
        std::sort(out.begin(), out.end(),
                  [](const MultiIndex& a, const MultiIndex& b) {
                      return a.I < b.I;
                  });
        return out;
    }

    int degree(const std::vector<int>& I) const {
        int d = 0;
        for (int i = 0; i < n; ++i) d += I[i] * weights[i];
        return d;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["n"] = n;
        j["weights"] = weights;
        auto arr = nlohmann::json::array();
        for (int i = 0; i < n; ++i)
            for (int jj = i + 1; jj < n; ++jj)
                for (int k = 0; k < n; ++k)
                    if (at(i, jj, k) != 0.0)
                        arr.push_back({i, jj, k, at(i, jj, k)});
        j["brackets"] = arr;
        j["name"] = name;
        return j;
    }

    static GroupSpec from_json(const nlohmann::json& j) {
        if (j.is_string()) return make_preset(j.get<std::string>());
        std::vector<std::array<double, 4>> br;
        for (const auto& e : j.at("brackets"))
            br.push_back({e[0].get<double>(), e[1].get<double>(),
                          e[2].get<double>(), e[3].get<double>()});
        return GroupSpec(j.at("n").get<int>(),
                         j.at("weights").get<std::vector<int>>(), br,
                         j.value("name", std::string("custom")));
    }

    /// "euclidean(n)" or "heisenberg(n)".
    static GroupSpec make_preset(const std::string& spec);

private:
    std::vector<double> table_; // c^k_{ij}, row-major (i, j, k)
    int M_ = 1;                 // lcm of the weights

    double& at(int i, int j, int k) {
        return table_[(static_cast<size_t>(i) * n + j) * n + k];
    }
    double at(int i, int j, int k) const {
        return table_[(static_cast<size_t>(i) * n + j) * n + k];
    }

    void validate() {
        M_ = 1;
        for (int w : weights) M_ = std::lcm(M_, w);
        // antisymmetry (including vanishing diagonal)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    if (at(i, j, k) != -at(j, i, k))
                        throw GradingViolation("bracket table not antisymmetric");
        // grading: c^k_{ij} = 0 unless d_k = d_i + d_j
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    if (at(i, j, k) != 0.0 &&
                        weights[k] != weights[i] + weights[j])
                        throw GradingViolation(
                            "bracket violates grading: nonzero c^k_ij with "
                            "d_k != d_i + d_j");
        // Jacobi: [[x,y],z] + [[y,z],x] + [[z,x],y] = 0 on basis triples.
        // Coefficients are small dyadic rationals, so the sums are exact.
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int m = 0; m < n; ++m) {
                        double s = 0.0;
                        for (int r = 0; r < n; ++r)
                            s += at(i, j, r) * at(r, k, m) +
                                 at(j, k, r) * at(r, i, m) +
                                 at(k, i, r) * at(r, j, m);
                        if (s != 0.0)
                            throw JacobiViolation("bracket table violates Jacobi");
                    }
    }

    void enumerate_(int pos, int budget, MultiIndex& cur,
                    std::vector<MultiIndex>& out) const {
        if (pos == n) {
            MultiIndex m = cur;
            m.d = degree(cur.I);
            out.push_back(std::move(m));
            return;
        }
        int w = weights[pos];
        for (int c = 0; c * w <= budget; ++c) {
            cur.I[pos] = c;
            enumerate_(pos + 1, budget - c * w, cur, out);
        }
        cur.I[pos] = 0;
    }
};

inline GroupSpec GroupSpec::make_preset(const std::string& spec) {
    auto open = spec.find('(');
    auto close = spec.find(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw ConfigError("group preset must look like euclidean(n) or heisenberg(n)");
    std::string kind = spec.substr(0, open);
    int m = std::stoi(spec.substr(open + 1, close - open - 1));
    if (m < 1) throw ConfigError("preset parameter must be >= 1");
    if (kind == "euclidean") {
        return GroupSpec(m, std::vector<int>(m, 1), {}, spec);
    }
    if (kind == "heisenberg") {
        // H^m: coordinates (p_1..p_m, q_1..q_m, t), [Y_i, Y_{m+i}] = Y_{2m+1}
        int n = 2 * m + 1;
        std::vector<int> w(n, 1);
        w[n - 1] = 2;
        std::vector<std::array<double, 4>> br;
        for (int i = 0; i < m; ++i)
            br.push_back({double(i), double(m + i), double(n - 1), 1.0});
        return GroupSpec(n, w, br, spec);
    }
    throw ConfigError("unknown group preset: " + kind);
}

} // namespace carnot

#endif
