#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "jamdet/matrix.hpp"
#include "jamdet/measurement.hpp"

namespace jamdet {

/// Segment means and scatter matrices for the split Z = [Z_1 | Z_2] at K_1 = split.
///
/// A_i is the unnormalized scatter sum (z - m_i)(z - m_i)^T over segment i and
/// A_0 the same over the whole window, so that
///   A_0 = A_1 + A_2 + (K_1 K_2 / K) (m_1 - m_2)(m_1 - m_2)^T.
struct ScatterStats {
    std::size_t split = 0;     // K_1
    std::size_t length = 0;    // K
    Vec mean_1, mean_2, mean_all;
    SymmetricMatrix scatter_1, scatter_2, scatter_all;
    /// Both segments hold at least N+1 samples, the minimum for nonsingular scatters.
    bool valid = false;

    std::size_t first_length() const noexcept { return split; }
    std::size_t second_length() const noexcept { return length - split; }
};

/// Direct per-split computation (two-pass means then outer products).
ScatterStats scatter(WindowView window, std::size_t split);

/// Prefix sums of z_k and z_k z_k^T over one window, in compensated arithmetic.
///
/// Samples are centered on the first column before accumulation; the shift cancels
/// in every scatter and keeps dBm-scale offsets out of the second moments. Segments of
/// at most kDirectSegment samples are summed directly around their own mean, since a
/// difference of two long prefixes loses the digits a short, nearly singular segment needs.
class PrefixMoments {
public:
    static constexpr std::size_t kDirectSegment = 32;

    explicit PrefixMoments(WindowView window);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t length() const noexcept { return length_; }

    /// O(N^2) evaluation of the scatter statistics at one split; throws on split outside [1, K-1].
    ScatterStats at(std::size_t split) const;
    /// A_0 for the whole window.
    const SymmetricMatrix& scatter_all() const noexcept { return scatter_all_; }
    const Vec& mean_all() const noexcept { return mean_all_; }

    /// Scatter of samples [0, split) and [split, K) only; skips the mean bookkeeping of at().
    void segment_scatters(std::size_t split, SymmetricMatrix& first, SymmetricMatrix& second) const noexcept;

private:
    std::size_t dim_ = 0;
    std::size_t length_ = 0;
    std::size_t stride_ = 0;  // N + N(N+1)/2 values per prefix entry
    Vec origin_;
    std::vector<double> samples_;  // copy of the window, for short segments
    std::vector<double> prefix_;  // (K + 1) * stride_
    SymmetricMatrix scatter_all_;
    Vec mean_all_;

    void segment(std::size_t begin, std::size_t end, Vec& centered_sum, SymmetricMatrix& second) const noexcept;
};

/// Scatter statistics on every split of `grid` in O(K N^2 + |grid| N^2).
std::vector<ScatterStats> scatter_all_splits(WindowView window, std::span<const std::size_t> grid);

/// Sum of Gaussian log-densities of the columns of `samples` under N(mean, cov).
double gaussian_loglike(WindowView samples, const Vec& mean, const SymmetricMatrix& cov);

}  // namespace jamdet
