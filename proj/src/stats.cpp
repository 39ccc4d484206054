#include "jamdet/stats.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "jamdet/errors.hpp"

namespace jamdet {

namespace {

void check_split(std::size_t split, std::size_t length) {
    if (split < 1 || split + 1 > length) {
        throw InvalidArgumentError("split " + std::to_string(split) + " outside [1, " + std::to_string(length) +
                                   " - 1]");
    }
}

Vec column_mean(WindowView w, std::size_t begin, std::size_t end) {
    Vec m(w.dim());
    for (std::size_t k = begin; k < end; ++k) {
        for (std::size_t i = 0; i < w.dim(); ++i) m[i] += w(i, k);
    }
    return m * (1.0 / static_cast<double>(end - begin));
}

SymmetricMatrix column_scatter(WindowView w, std::size_t begin, std::size_t end, const Vec& mean) {
    SymmetricMatrix a(w.dim());
    for (std::size_t k = begin; k < end; ++k) {
        for (std::size_t i = 0; i < w.dim(); ++i) {
            const double di = w(i, k) - mean[i];
            for (std::size_t j = i; j < w.dim(); ++j) a.add(i, j, di * (w(j, k) - mean[j]));
        }
    }
    return a;
}

}  // namespace

ScatterStats scatter(WindowView window, std::size_t split) {
    const std::size_t k = window.length();
    check_split(split, k);
    ScatterStats s;
    s.split = split;
    s.length = k;
    s.mean_1 = column_mean(window, 0, split);
    s.mean_2 = column_mean(window, split, k);
    s.mean_all = column_mean(window, 0, k);
    s.scatter_1 = column_scatter(window, 0, split, s.mean_1);
    s.scatter_2 = column_scatter(window, split, k, s.mean_2);
    s.scatter_all = column_scatter(window, 0, k, s.mean_all);
    s.valid = split >= window.dim() + 1 && k - split >= window.dim() + 1;
    return s;
}

PrefixMoments::PrefixMoments(WindowView window)
    : dim_(window.dim()),
      length_(window.length()),
      origin_(Vec::from(window.column(0))),
      samples_(window.data().begin(), window.data().end()) {
    const std::size_t n = dim_;
    stride_ = n + SymmetricMatrix::packed_size(n);
    prefix_.assign((length_ + 1) * stride_, 0.0);

    // Neumaier-compensated running sums.
    std::vector<double> sum(stride_, 0.0);
    std::vector<double> comp(stride_, 0.0);
    std::vector<double> term(stride_, 0.0);
    for (std::size_t k = 0; k < length_; ++k) {
        std::array<double, kMaxDim> c{};
        for (std::size_t i = 0; i < n; ++i) c[i] = window(i, k) - origin_[i];
        std::size_t t = 0;
        for (std::size_t i = 0; i < n; ++i) term[t++] = c[i];
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) term[t++] = c[i] * c[j];
        }
        double* out = &prefix_[(k + 1) * stride_];
        for (std::size_t t2 = 0; t2 < stride_; ++t2) {
            const double x = term[t2];
            const double s = sum[t2] + x;
            if (std::abs(sum[t2]) >= std::abs(x)) {
                comp[t2] += (sum[t2] - s) + x;
            } else {
                comp[t2] += (x - s) + sum[t2];
            }
            sum[t2] = s;
            out[t2] = s + comp[t2];
        }
    }

    Vec total(n);
    scatter_all_ = SymmetricMatrix(n);
    segment(0, length_, total, scatter_all_);
    mean_all_ = origin_ + total * (1.0 / static_cast<double>(length_));
}

void PrefixMoments::segment(std::size_t begin, std::size_t end, Vec& centered_sum,
                            SymmetricMatrix& second) const noexcept {
    const std::size_t n = dim_;
    if (end - begin <= kDirectSegment) {
        const double* z = samples_.data();
        for (std::size_t i = 0; i < n; ++i) centered_sum[i] = 0.0;
        for (std::size_t k = begin; k < end; ++k) {
            for (std::size_t i = 0; i < n; ++i) centered_sum[i] += z[k * n + i] - origin_[i];
        }
        std::array<double, kMaxDim> mean{};
        for (std::size_t i = 0; i < n; ++i) mean[i] = origin_[i] + centered_sum[i] / static_cast<double>(end - begin);
        std::array<double, kMaxDim * kMaxDim> acc{};
        for (std::size_t k = begin; k < end; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                const double di = z[k * n + i] - mean[i];
                for (std::size_t j = i; j < n; ++j) acc[i * kMaxDim + j] += di * (z[k * n + j] - mean[j]);
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) second.set(i, j, acc[i * kMaxDim + j]);
        }
        return;
    }
    const double* lo = &prefix_[begin * stride_];
    const double* hi = &prefix_[end * stride_];
    for (std::size_t i = 0; i < n; ++i) centered_sum[i] = hi[i] - lo[i];
    const double inv = 1.0 / static_cast<double>(end - begin);
    std::size_t t = n;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j, ++t) {
            second.set(i, j, (hi[t] - lo[t]) - centered_sum[i] * centered_sum[j] * inv);
        }
    }
}

void PrefixMoments::segment_scatters(std::size_t split, SymmetricMatrix& first,
                                     SymmetricMatrix& second) const noexcept {
    Vec s(dim_);
    segment(0, split, s, first);
    segment(split, length_, s, second);
}

ScatterStats PrefixMoments::at(std::size_t split) const {
    check_split(split, length_);
    ScatterStats s;
    s.split = split;
    s.length = length_;
    s.scatter_1 = SymmetricMatrix(dim_);
    s.scatter_2 = SymmetricMatrix(dim_);
    Vec sum1(dim_), sum2(dim_);
    segment(0, split, sum1, s.scatter_1);
    segment(split, length_, sum2, s.scatter_2);
    s.mean_1 = origin_ + sum1 * (1.0 / static_cast<double>(split));
    s.mean_2 = origin_ + sum2 * (1.0 / static_cast<double>(length_ - split));
    s.mean_all = mean_all_;
    s.scatter_all = scatter_all_;
    s.valid = split >= dim_ + 1 && length_ - split >= dim_ + 1;
    return s;
}

std::vector<ScatterStats> scatter_all_splits(WindowView window, std::span<const std::size_t> grid) {
    if (grid.empty()) throw InvalidArgumentError("split grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        check_split(grid[i], window.length());
        if (i > 0 && grid[i] <= grid[i - 1]) throw InvalidArgumentError("split grid must be strictly increasing");
    }
    const PrefixMoments moments(window);
    std::vector<ScatterStats> out;
    out.reserve(grid.size());
    for (std::size_t split : grid) out.push_back(moments.at(split));
    return out;
}

double gaussian_loglike(WindowView samples, const Vec& mean, const SymmetricMatrix& cov) {
    const std::size_t n = samples.dim();
    if (mean.size() != n || cov.dim() != n) throw InvalidArgumentError("mean/covariance dimension mismatch");
    auto f = ldl_factor(cov);
    if (!f.factor) throw SingularMatrixError(f.failed_pivot, f.failed_value);
    const double per_sample_const =
        -0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi) - 0.5 * f.factor->logdet();
    double total = 0.0;
    for (std::size_t k = 0; k < samples.length(); ++k) {
        const Vec d = Vec::from(samples.column(k)) - mean;
        const Vec x = f.factor->solve(d);
        double q = 0.0;
        for (std::size_t i = 0; i < n; ++i) q += d[i] * x[i];
        total += per_sample_const - 0.5 * q;
    }
    return total;
}

}  // namespace jamdet
