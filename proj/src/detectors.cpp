#include "jamdet/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "jamdet/errors.hpp"
#include "jamdet/stats.hpp"

namespace jamdet {

std::string_view Detector::name() const noexcept {
    switch (kind) {
        case DetectorKind::ncd: return "ncd";
        case DetectorKind::mncd: return "mncd";
        case DetectorKind::spd: return "spd";
    }
    return "unknown";
}

std::string_view Detector::variant_name() const noexcept {
    return variant == NcdVariant::strict ? "strict" : "as-written";
}

DetectorKind detector_kind_from_string(std::string_view name) {
    if (name == "ncd" || name == "NCD") return DetectorKind::ncd;
    if (name == "mncd" || name == "MNCD") return DetectorKind::mncd;
    if (name == "spd" || name == "SpD" || name == "SPD") return DetectorKind::spd;
    throw InvalidArgumentError("unknown detector '" + std::string(name) + "' (expected ncd, mncd or spd)");
}

NcdVariant ncd_variant_from_string(std::string_view name) {
    if (name == "as-written" || name == "as_written") return NcdVariant::as_written;
    if (name == "strict") return NcdVariant::strict;
    throw InvalidArgumentError("unknown NCD variant '" + std::string(name) + "' (expected as-written or strict)");
}

Detector Detector::parse(std::string_view kind, std::string_view variant) {
    return Detector{detector_kind_from_string(kind), ncd_variant_from_string(variant)};
}

SplitGrid::SplitGrid(std::vector<std::size_t> values, std::size_t dim, std::size_t length, std::size_t stride)
    : values_(std::move(values)), dim_(dim), length_(length), stride_(stride) {
    if (stride_ == 0) throw InvalidArgumentError("grid stride must be positive");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const std::size_t v = values_[i];
        if (v < dim + 1 || v + dim + 1 > length) {
            throw InvalidArgumentError("split " + std::to_string(v) + " outside [" + std::to_string(dim + 1) + ", " +
                                       std::to_string(length) + " - " + std::to_string(dim + 1) + "]");
        }
        if (i > 0 && v <= values_[i - 1]) throw InvalidArgumentError("split grid must be strictly increasing");
    }
}

SplitGrid SplitGrid::full(std::size_t dim, std::size_t length, std::size_t stride) {
    if (stride == 0) throw InvalidArgumentError("grid stride must be positive");
    std::vector<std::size_t> v;
    for (std::size_t k = dim + 1; k + dim + 1 <= length; k += stride) v.push_back(k);
    return SplitGrid(std::move(v), dim, length, stride);
}

std::size_t SplitGrid::default_stride(std::size_t length) noexcept { return std::max<std::size_t>(1, length / 200); }

SplitGrid SplitGrid::default_for(std::size_t dim, std::size_t length) {
    return full(dim, length, default_stride(length));
}

bool SplitGrid::contains(std::size_t split) const noexcept {
    return std::binary_search(values_.begin(), values_.end(), split);
}

namespace {

void check_grid(WindowView window, const SplitGrid& grid) {
    if (grid.dim() != window.dim() || grid.length() != window.length()) {
        throw InvalidArgumentError("split grid built for N=" + std::to_string(grid.dim()) +
                                   ", K=" + std::to_string(grid.length()) + " used on a window with N=" +
                                   std::to_string(window.dim()) + ", K=" + std::to_string(window.length()));
    }
    if (grid.empty()) {
        throw DegenerateWindowError("split grid is empty (K=" + std::to_string(window.length()) + " < 2(N+1))");
    }
}

// logdet(A / count) given logdet(A).
double normalized(double logdet, std::size_t dim, std::size_t count) {
    return logdet - static_cast<double>(dim) * std::log(static_cast<double>(count));
}

// -(K1/2) logdet(A1/K1) - (K2/2) logdet(A2/K2): the alternative's maximized log-likelihood, up to constants.
double alternative_term(double ld1, double ld2, std::size_t dim, std::size_t k1, std::size_t k2) {
    return -0.5 * static_cast<double>(k1) * normalized(ld1, dim, k1) -
           0.5 * static_cast<double>(k2) * normalized(ld2, dim, k2);
}

double whole_window_logdet(const PrefixMoments& moments) {
    auto ld0 = try_logdet_pd(moments.scatter_all());
    if (!ld0) throw DegenerateWindowError("whole-window scatter matrix is singular");
    return *ld0;
}

}  // namespace

DetectionReport ncd_statistic(WindowView window, const SplitGrid& grid, NcdVariant variant) {
    check_grid(window, grid);
    const std::size_t n = window.dim();
    const std::size_t k = window.length();
    const PrefixMoments moments(window);

    DetectionReport report;
    report.detector = Detector{DetectorKind::ncd, variant};
    double best_alt = -std::numeric_limits<double>::infinity();
    double best_null = variant == NcdVariant::as_written ? -std::numeric_limits<double>::infinity()
                                                         : std::numeric_limits<double>::infinity();
    std::size_t arg_alt = 0;
    std::size_t arg_null = 0;

    SymmetricMatrix a1(n), a2(n);
    for (std::size_t k1 : grid.values()) {
        moments.segment_scatters(k1, a1, a2);
        const auto ld1 = try_logdet_pd(a1);
        const auto ld2 = try_logdet_pd(a2);
        if (!ld1 || !ld2) continue;
        const auto ld12 = try_logdet_pd(a1 + a2);
        if (!ld12) continue;
        ++report.valid_split_count;

        const double alt = alternative_term(*ld1, *ld2, n, k1, k - k1);
        const double null_term = 0.5 * static_cast<double>(k) * normalized(*ld12, n, k);
        if (alt > best_alt) {
            best_alt = alt;
            arg_alt = k1;
        }
        const bool better = variant == NcdVariant::as_written ? null_term > best_null : null_term < best_null;
        if (better) {
            best_null = null_term;
            arg_null = k1;
        }
    }
    if (report.valid_split_count == 0) throw DegenerateWindowError("no split on the grid has nonsingular scatters");
    report.statistic = best_alt + best_null;
    report.argmax_split = arg_alt;
    report.argmax_split_null = arg_null;
    return report;
}

DetectionReport mncd_statistic(WindowView window, const SplitGrid& grid) {
    check_grid(window, grid);
    const std::size_t n = window.dim();
    const std::size_t k = window.length();
    const PrefixMoments moments(window);
    const double null_term = 0.5 * static_cast<double>(k) * normalized(whole_window_logdet(moments), n, k);

    DetectionReport report;
    report.detector = Detector{DetectorKind::mncd, NcdVariant::as_written};
    double best = -std::numeric_limits<double>::infinity();
    SymmetricMatrix a1(n), a2(n);
    for (std::size_t k1 : grid.values()) {
        moments.segment_scatters(k1, a1, a2);
        const auto ld1 = try_logdet_pd(a1);
        const auto ld2 = try_logdet_pd(a2);
        if (!ld1 || !ld2) continue;
        ++report.valid_split_count;
        const double value = alternative_term(*ld1, *ld2, n, k1, k - k1) + null_term;
        if (value > best) {
            best = value;
            report.argmax_split = k1;
        }
    }
    if (report.valid_split_count == 0) throw DegenerateWindowError("no split on the grid has nonsingular scatters");
    report.statistic = best;
    return report;
}

DetectionReport spd_statistic(WindowView window, const SplitGrid& grid) {
    check_grid(window, grid);
    const std::size_t n = window.dim();
    const PrefixMoments moments(window);
    const double ld0 = whole_window_logdet(moments);

    // logdet(A0) does not depend on the split: maximize by minimizing logdet(A1 + A2).
    DetectionReport report;
    report.detector = Detector{DetectorKind::spd, NcdVariant::as_written};
    double best = std::numeric_limits<double>::infinity();
    SymmetricMatrix a1(n), a2(n);
    for (std::size_t k1 : grid.values()) {
        moments.segment_scatters(k1, a1, a2);
        a1 += a2;
        const auto ld = try_logdet_pd(a1);
        if (!ld) continue;
        ++report.valid_split_count;
        if (*ld < best) {
            best = *ld;
            report.argmax_split = k1;
        }
    }
    if (report.valid_split_count == 0) throw DegenerateWindowError("no split on the grid has nonsingular scatters");
    report.statistic = ld0 - best;
    return report;
}

DetectionReport evaluate(const Detector& detector, WindowView window, const SplitGrid& grid) {
    switch (detector.kind) {
        case DetectorKind::ncd: return ncd_statistic(window, grid, detector.variant);
        case DetectorKind::mncd: return mncd_statistic(window, grid);
        case DetectorKind::spd: return spd_statistic(window, grid);
    }
    throw InvalidArgumentError("unknown detector kind");
}

DetectionReport apply_threshold(DetectionReport report, double threshold) {
    if (std::isnan(threshold) || threshold == -std::numeric_limits<double>::infinity()) {
        throw InvalidArgumentError("threshold must be finite or +inf");
    }
    report.threshold = threshold;
    report.detected = report.statistic > threshold;
    return report;
}

BinaryDetectionTrace::BinaryDetectionTrace(std::vector<std::int64_t> positions, std::vector<std::uint8_t> detected)
    : positions_(std::move(positions)), detected_(std::move(detected)) {
    if (positions_.size() != detected_.size()) throw InvalidArgumentError("positions and decisions differ in length");
    for (std::size_t i = 1; i < positions_.size(); ++i) {
        if (positions_[i] <= positions_[i - 1]) throw InvalidArgumentError("positions must be strictly increasing");
    }
    for (auto& d : detected_) {
        if (d > 1) throw InvalidArgumentError("decisions must be 0 or 1");
    }
}

BinaryDetectionTrace integrate_m_of_n(const BinaryDetectionTrace& trace, std::size_t m, std::size_t n) {
    if (m < 1 || m > n || n > trace.size()) {
        throw InvalidArgumentError("M-of-N needs 1 <= m <= n <= trace length (m=" + std::to_string(m) +
                                   ", n=" + std::to_string(n) + ", length=" + std::to_string(trace.size()) + ")");
    }
    const auto& raw = trace.detected();
    std::vector<std::uint8_t> out(raw.size(), 0);
    std::size_t ones = 0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        ones += raw[i];
        if (i >= n) ones -= raw[i - n];
        // A prefix of L < n decisions needs ceil(m L / n) of them.
        const std::size_t available = std::min(i + 1, n);
        const std::size_t needed = (m * available + n - 1) / n;
        out[i] = ones >= needed ? 1 : 0;
    }
    return BinaryDetectionTrace(trace.positions(), std::move(out));
}

}  // namespace jamdet
