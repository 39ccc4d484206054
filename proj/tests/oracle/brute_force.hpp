#pragma once

// Naive reference implementations used only by the tests. Nothing here shares code
// with the library: matrices are dense row-major vectors, determinants come from
// cofactor expansion, and every split forms its segments explicitly.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

using Matrix = std::vector<double>;  // n x n, row-major
using Columns = std::vector<std::vector<double>>;  // K columns of length N

inline double det(const Matrix& a, std::size_t n) {
    if (n == 1) return a[0];
    if (n == 2) return a[0] * a[3] - a[1] * a[2];
    double total = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        Matrix minor;
        for (std::size_t i = 1; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (j != c) minor.push_back(a[i * n + j]);
            }
        }
        const double sign = (c % 2 == 0) ? 1.0 : -1.0;
        total += sign * a[c] * det(minor, n - 1);
    }
    return total;
}

inline Matrix inverse(const Matrix& a, std::size_t n) {
    const double d = det(a, n);
    Matrix inv(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            Matrix minor;
            for (std::size_t r = 0; r < n; ++r) {
                for (std::size_t c = 0; c < n; ++c) {
                    if (r != j && c != i) minor.push_back(a[r * n + c]);
                }
            }
            const double cof = (n == 1 ? 1.0 : det(minor, n - 1)) * (((i + j) % 2 == 0) ? 1.0 : -1.0);
            inv[i * n + j] = cof / d;
        }
    }
    return inv;
}

/// Columns [first, last) of the window as an explicit matrix.
inline Columns segment(const Columns& z, std::size_t first, std::size_t last) {
    return Columns(z.begin() + static_cast<std::ptrdiff_t>(first), z.begin() + static_cast<std::ptrdiff_t>(last));
}

inline std::vector<double> mean(const Columns& z) {
    std::vector<double> m(z.front().size(), 0.0);
    for (const auto& col : z) {
        for (std::size_t i = 0; i < m.size(); ++i) m[i] += col[i];
    }
    for (double& v : m) v /= static_cast<double>(z.size());
    return m;
}

/// A = Z Z^T - K m m^T, written literally.
inline Matrix scatter(const Columns& z) {
    const std::size_t n = z.front().size();
    const auto m = mean(z);
    Matrix a(n * n, 0.0);
    for (const auto& col : z) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) a[i * n + j] += col[i] * col[j];
        }
    }
    const double k = static_cast<double>(z.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a[i * n + j] -= k * m[i] * m[j];
    }
    return a;
}

inline Matrix add(Matrix a, const Matrix& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

inline Matrix scale(Matrix a, double s) {
    for (double& v : a) v *= s;
    return a;
}

inline std::optional<double> log_det_if_positive(const Matrix& a, std::size_t n) {
    const double d = det(a, n);
    if (!(d > 0.0)) return std::nullopt;
    return std::log(d);
}

struct Result {
    double statistic = -std::numeric_limits<double>::infinity();
    std::size_t argmax = 0;
};

/// max_K1 of the alternative term plus max (or min) of the null term, over `grid`.
inline Result ncd(const Columns& z, const std::vector<std::size_t>& grid, bool strict) {
    const std::size_t n = z.front().size();
    const std::size_t k = z.size();
    double best_alt = -std::numeric_limits<double>::infinity();
    double best_null = strict ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    Result r;
    for (std::size_t k1 : grid) {
        const std::size_t k2 = k - k1;
        const Matrix a1 = scatter(segment(z, 0, k1));
        const Matrix a2 = scatter(segment(z, k1, k));
        const auto l1 = log_det_if_positive(scale(a1, 1.0 / static_cast<double>(k1)), n);
        const auto l2 = log_det_if_positive(scale(a2, 1.0 / static_cast<double>(k2)), n);
        const auto l0 = log_det_if_positive(scale(add(a1, a2), 1.0 / static_cast<double>(k)), n);
        if (!l1 || !l2 || !l0) continue;
        const double alt = -0.5 * static_cast<double>(k1) * *l1 - 0.5 * static_cast<double>(k2) * *l2;
        const double nul = 0.5 * static_cast<double>(k) * *l0;
        if (alt > best_alt) {
            best_alt = alt;
            r.argmax = k1;
        }
        best_null = strict ? std::min(best_null, nul) : std::max(best_null, nul);
    }
    r.statistic = best_alt + best_null;
    return r;
}

inline Result mncd(const Columns& z, const std::vector<std::size_t>& grid) {
    const std::size_t n = z.front().size();
    const std::size_t k = z.size();
    const double l0 = std::log(det(scale(scatter(z), 1.0 / static_cast<double>(k)), n));
    Result r;
    for (std::size_t k1 : grid) {
        const std::size_t k2 = k - k1;
        const auto l1 = log_det_if_positive(scale(scatter(segment(z, 0, k1)), 1.0 / static_cast<double>(k1)), n);
        const auto l2 = log_det_if_positive(scale(scatter(segment(z, k1, k)), 1.0 / static_cast<double>(k2)), n);
        if (!l1 || !l2) continue;
        const double v = -0.5 * static_cast<double>(k1) * *l1 - 0.5 * static_cast<double>(k2) * *l2 +
                         0.5 * static_cast<double>(k) * l0;
        if (v > r.statistic) {
            r.statistic = v;
            r.argmax = k1;
        }
    }
    return r;
}

inline Result spd(const Columns& z, const std::vector<std::size_t>& grid) {
    const std::size_t n = z.front().size();
    const std::size_t k = z.size();
    const double l0 = std::log(det(scatter(z), n));
    Result r;
    for (std::size_t k1 : grid) {
        const auto l = log_det_if_positive(add(scatter(segment(z, 0, k1)), scatter(segment(z, k1, k))), n);
        if (!l) continue;
        const double v = l0 - *l;
        if (v > r.statistic) {
            r.statistic = v;
            r.argmax = k1;
        }
    }
    return r;
}

/// Sum of log N(z; m, S) via the expanded quadratic form.
inline double gaussian_loglike(const Columns& z, const std::vector<double>& m, const Matrix& s) {
    const std::size_t n = m.size();
    const Matrix inv = inverse(s, n);
    const double d = det(s, n);
    double total = 0.0;
    for (const auto& col : z) {
        double q = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) q += (col[i] - m[i]) * inv[i * n + j] * (col[j] - m[j]);
        }
        total += -0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi) - 0.5 * std::log(d) - 0.5 * q;
    }
    return total;
}

/// Numeric maximization of the Gaussian log-likelihood of `z` over (m, S = L L^T), with L
/// lower triangular and log-parametrized diagonal. BFGS with central-difference gradients
/// and a backtracking line search, from `start_mean` and `start_cov`.
struct AscentResult {
    double loglike = 0.0;
    std::vector<double> mean;
    Matrix cov;
    std::size_t iterations = 0;
};

inline AscentResult maximize_loglike(const Columns& z, std::vector<double> start_mean, const Matrix& start_cov) {
    const std::size_t n = start_mean.size();
    const std::size_t p = n + n * (n + 1) / 2;

    auto unpack = [&](const std::vector<double>& th, std::vector<double>& m, Matrix& s) {
        m.assign(th.begin(), th.begin() + static_cast<std::ptrdiff_t>(n));
        Matrix l(n * n, 0.0);
        std::size_t idx = n;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) l[i * n + j] = (i == j) ? std::exp(th[idx++]) : th[idx++];
        }
        s.assign(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t k = 0; k < n; ++k) s[i * n + j] += l[i * n + k] * l[j * n + k];
            }
        }
    };
    auto objective = [&](const std::vector<double>& th) {
        std::vector<double> m;
        Matrix s;
        unpack(th, m, s);
        return -gaussian_loglike(z, m, s);
    };

    // Cholesky of the start covariance gives the initial parameters.
    std::vector<double> theta(p);
    for (std::size_t i = 0; i < n; ++i) theta[i] = start_mean[i];
    {
        Matrix l(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double v = start_cov[i * n + j];
                for (std::size_t k = 0; k < j; ++k) v -= l[i * n + k] * l[j * n + k];
                l[i * n + j] = (i == j) ? std::sqrt(v) : v / l[j * n + j];
            }
        }
        std::size_t idx = n;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) theta[idx++] = (i == j) ? std::log(l[i * n + j]) : l[i * n + j];
        }
    }

    auto gradient = [&](const std::vector<double>& th) {
        std::vector<double> g(p);
        for (std::size_t i = 0; i < p; ++i) {
            const double h = 1e-6 * std::max(1.0, std::abs(th[i]));
            auto up = th, down = th;
            up[i] += h;
            down[i] -= h;
            g[i] = (objective(up) - objective(down)) / (2.0 * h);
        }
        return g;
    };

    std::vector<double> hinv(p * p, 0.0);
    for (std::size_t i = 0; i < p; ++i) hinv[i * p + i] = 1.0;
    double f = objective(theta);
    std::vector<double> g = gradient(theta);
    AscentResult result;
    for (std::size_t it = 0; it < 500; ++it) {
        double gnorm = 0.0;
        for (double v : g) gnorm += v * v;
        if (std::sqrt(gnorm) < 1e-7) break;
        std::vector<double> dir(p, 0.0);
        for (std::size_t i = 0; i < p; ++i) {
            for (std::size_t j = 0; j < p; ++j) dir[i] -= hinv[i * p + j] * g[j];
        }
        double slope = 0.0;
        for (std::size_t i = 0; i < p; ++i) slope += dir[i] * g[i];
        if (slope >= 0.0) {
            // Not a descent direction: restart from steepest descent.
            for (std::size_t i = 0; i < p; ++i) dir[i] = -g[i];
            std::fill(hinv.begin(), hinv.end(), 0.0);
            for (std::size_t i = 0; i < p; ++i) hinv[i * p + i] = 1.0;
            slope = -gnorm;
        }
        double step = 1.0;
        std::vector<double> next(p);
        double fn = 0.0;
        for (int bt = 0; bt < 60; ++bt) {
            for (std::size_t i = 0; i < p; ++i) next[i] = theta[i] + step * dir[i];
            fn = objective(next);
            if (std::isfinite(fn) && fn <= f + 1e-4 * step * slope) break;
            step *= 0.5;
        }
        if (!(fn < f)) break;
        const std::vector<double> gn = gradient(next);
        std::vector<double> s(p), y(p);
        double sy = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
            s[i] = next[i] - theta[i];
            y[i] = gn[i] - g[i];
            sy += s[i] * y[i];
        }
        if (sy > 1e-12) {
            std::vector<double> hy(p, 0.0);
            for (std::size_t i = 0; i < p; ++i) {
                for (std::size_t j = 0; j < p; ++j) hy[i] += hinv[i * p + j] * y[j];
            }
            double yhy = 0.0;
            for (std::size_t i = 0; i < p; ++i) yhy += y[i] * hy[i];
            for (std::size_t i = 0; i < p; ++i) {
                for (std::size_t j = 0; j < p; ++j) {
                    hinv[i * p + j] += (sy + yhy) * s[i] * s[j] / (sy * sy) - (hy[i] * s[j] + s[i] * hy[j]) / sy;
                }
            }
        }
        theta = next;
        f = fn;
        g = gn;
        result.iterations = it + 1;
    }
    unpack(theta, result.mean, result.cov);
    result.loglike = -f;
    return result;
}

/// Standard-normal random window with K columns of dimension N.
inline Columns random_columns(std::mt19937_64& rng, std::size_t n, std::size_t k) {
    std::normal_distribution<double> normal;
    Columns z(k, std::vector<double>(n));
    for (auto& col : z) {
        for (double& v : col) v = normal(rng);
    }
    return z;
}

/// Column-major flattening matching the library's window layout.
inline std::vector<double> flatten(const Columns& z) {
    std::vector<double> out;
    for (const auto& col : z) out.insert(out.end(), col.begin(), col.end());
    return out;
}

}  // namespace oracle
