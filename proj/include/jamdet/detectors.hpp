#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jamdet/measurement.hpp"

namespace jamdet {

enum class DetectorKind {
    ncd,   // covariance change, free per-segment means under both hypotheses
    mncd,  // covariance and mean change against a fully homogeneous null
    spd,   // mean change with a common covariance
};

/// How the NCD null term is reduced over the split grid.
///   as_written: both terms maximized independently.
///   strict:     the null term is minimized, i.e. max L1 - max L0.
enum class NcdVariant { as_written, strict };

struct Detector {
    DetectorKind kind = DetectorKind::mncd;
    NcdVariant variant = NcdVariant::as_written;

    /// "ncd", "mncd" or "spd".
    std::string_view name() const noexcept;
    std::string_view variant_name() const noexcept;

    static Detector parse(std::string_view kind, std::string_view variant = "as-written");

    friend bool operator==(const Detector&, const Detector&) = default;
};

DetectorKind detector_kind_from_string(std::string_view name);
NcdVariant ncd_variant_from_string(std::string_view name);

/// Candidate change indices K_1 for windows of a fixed N and K.
class SplitGrid {
public:
    SplitGrid() = default;
    /// Explicit values; throws InvalidArgumentError unless strictly increasing within [N+1, K-(N+1)].
    SplitGrid(std::vector<std::size_t> values, std::size_t dim, std::size_t length, std::size_t stride = 1);

    /// N+1, N+1+stride, ... up to K-(N+1). Empty when K < 2(N+1).
    static SplitGrid full(std::size_t dim, std::size_t length, std::size_t stride);
    /// full() with stride max(1, floor(K/200)).
    static SplitGrid default_for(std::size_t dim, std::size_t length);
    static std::size_t default_stride(std::size_t length) noexcept;

    const std::vector<std::size_t>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    std::size_t stride() const noexcept { return stride_; }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t length() const noexcept { return length_; }
    bool contains(std::size_t split) const noexcept;

private:
    std::vector<std::size_t> values_;
    std::size_t dim_ = 0;
    std::size_t length_ = 0;
    std::size_t stride_ = 1;
};

struct DetectionReport {
    Detector detector;
    double statistic = 0.0;
    /// K_1 maximizing the statistic (for NCD: the alternative-hypothesis term).
    std::size_t argmax_split = 0;
    /// NCD only: K_1 selected for the null-hypothesis term.
    std::optional<std::size_t> argmax_split_null;
    std::optional<double> threshold;
    bool detected = false;
    std::size_t valid_split_count = 0;
};

DetectionReport ncd_statistic(WindowView window, const SplitGrid& grid,
                              NcdVariant variant = NcdVariant::as_written);
DetectionReport mncd_statistic(WindowView window, const SplitGrid& grid);
DetectionReport spd_statistic(WindowView window, const SplitGrid& grid);

/// Dispatches on detector.kind.
DetectionReport evaluate(const Detector& detector, WindowView window, const SplitGrid& grid);

/// detected = statistic > threshold. +inf is accepted and never fires; NaN throws.
DetectionReport apply_threshold(DetectionReport report, double threshold);

/// Decisions at increasing window positions.
class BinaryDetectionTrace {
public:
    BinaryDetectionTrace() = default;
    /// Throws InvalidArgumentError unless positions are strictly increasing and sizes match.
    BinaryDetectionTrace(std::vector<std::int64_t> positions, std::vector<std::uint8_t> detected);

    std::size_t size() const noexcept { return positions_.size(); }
    const std::vector<std::int64_t>& positions() const noexcept { return positions_; }
    const std::vector<std::uint8_t>& detected() const noexcept { return detected_; }

private:
    std::vector<std::int64_t> positions_;
    std::vector<std::uint8_t> detected_;
};

/// Output i is 1 iff at least m of the raw decisions in (i-n, i] are 1; the first n-1
/// outputs see a shorter prefix of L decisions and need ceil(m L / n) of them.
BinaryDetectionTrace integrate_m_of_n(const BinaryDetectionTrace& trace, std::size_t m, std::size_t n);

}  // namespace jamdet
