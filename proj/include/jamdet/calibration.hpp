#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jamdet/detectors.hpp"
#include "jamdet/trace.hpp"

namespace jamdet {

/// An attack-free prefix of one record available for null-window sampling.
struct NullSource {
    std::size_t record = 0;         // index into the record list
    std::size_t prefix_length = 0;  // samples [0, prefix_length) are attack-free
};

struct CalibrationConfig {
    double target_pfa = 1e-2;
    std::size_t window_length = 0;
    /// 0 selects ceil(records / target_pfa).
    std::size_t num_windows = 0;
    std::uint64_t seed = 0;
    std::vector<NullSource> sources;

    /// Throws ConfigError on an out-of-range probability or empty source list.
    void validate() const;
    std::size_t resolved_num_windows() const;
    /// True when fewer than 10/target_pfa windows are requested.
    bool undersized() const;
};

struct WindowPlacement {
    std::size_t record = 0;
    std::size_t offset = 0;

    friend bool operator==(const WindowPlacement&, const WindowPlacement&) = default;
};

/// Draws contiguous K-sample null windows uniformly over (source, offset), with replacement.
///
/// Draw i uses its own RNG stream seeded from (seed, i), so any subset of draws can be
/// produced in any order or concurrently with identical results.
class NullWindowSampler {
public:
    /// Throws ConfigError naming the record when a prefix is shorter than K or longer than the record.
    NullWindowSampler(CalibrationConfig config, std::span<const TraceRecord> records);

    std::size_t size() const noexcept { return num_windows_; }
    const CalibrationConfig& config() const noexcept { return config_; }
    WindowPlacement placement(std::size_t draw) const;
    WindowView window(std::size_t draw) const;

private:
    CalibrationConfig config_;
    std::span<const TraceRecord> records_;
    std::size_t num_windows_ = 0;
};

/// Materialized stream of sampled null windows.
std::vector<WindowMatrix> draw_null_windows(const CalibrationConfig& config, std::span<const TraceRecord> records);

struct ThresholdEstimate {
    Detector detector;
    double target_pfa = 1e-2;
    /// +inf when fewer than 1/target_pfa usable statistics remain.
    double threshold = 0.0;
    double empirical_pfa = 0.0;
    std::size_t num_windows_used = 0;
    std::size_t skipped_windows = 0;
    /// Ascending statistics, kept for diagnostics.
    std::vector<double> sorted_statistics;

    /// Skipped degenerate windows exceed 1% of the draws.
    bool excessive_skips() const noexcept;
};

/// Order-statistic reduction: eta is the ceil((1 - pfa) W)-th smallest of the W values.
ThresholdEstimate threshold_from_statistics(std::vector<double> statistics, double target_pfa,
                                            std::size_t skipped = 0);

/// Random-access window source for estimate_threshold.
using WindowSource = std::function<WindowView(std::size_t)>;

/// Evaluates `detector` on `count` windows (degenerate ones skipped) and reduces to a threshold.
/// Throws InsufficientDataError when count < ceil(1/target_pfa).
ThresholdEstimate estimate_threshold(const Detector& detector, const SplitGrid& grid, std::size_t count,
                                     const WindowSource& windows, double target_pfa, std::size_t threads = 0);

ThresholdEstimate estimate_threshold(const Detector& detector, const SplitGrid& grid,
                                     std::span<const WindowMatrix> windows, double target_pfa,
                                     std::size_t threads = 0);

/// Persisted calibration result.
struct ThresholdDocument {
    Detector detector;
    std::size_t dim = 0;
    std::size_t window_length = 0;
    std::size_t grid_stride = 1;
    std::size_t grid_size = 0;
    std::size_t decimation = 1;
    double target_pfa = 1e-2;
    double threshold = 0.0;
    double empirical_pfa = 0.0;
    std::size_t num_windows = 0;
    std::size_t skipped_windows = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> layout;
    std::string manifest;

    nlohmann::json to_json() const;
    /// Throws ConfigError on missing or mistyped fields.
    static ThresholdDocument from_json(const nlohmann::json& j);
};

}  // namespace jamdet
