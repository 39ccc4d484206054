#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "jamdet/calibration.hpp"
#include "jamdet/detectors.hpp"
#include "jamdet/ingest.hpp"
#include "jamdet/scenario.hpp"
#include "jamdet/trace.hpp"

namespace jamdet::harness {

inline constexpr const char* kToolVersion = "0.1.0";

using Path = std::filesystem::path;

/// M-of-N post-detection integration parameters.
struct MofN {
    std::size_t m = 0;
    std::size_t n = 0;
};

/// Reproducibility record written next to every command output.
struct RunManifest {
    std::string command;
    nlohmann::json config;  // resolved options; replaying them reproduces the outputs
    std::vector<std::string> inputs;
    std::string calibration_reference;
    std::string tool_version = kToolVersion;

    /// FNV-1a over the key-sorted serialization of {command, config}; independent of field order.
    std::string digest() const;
    nlohmann::json to_json() const;
    static RunManifest from_json(const nlohmann::json& j);
    void write(const Path& path) const;
    static RunManifest read(const Path& path);
};

/// Expands shell-style patterns (*, ?, [..]) and passes plain paths through; result sorted.
std::vector<Path> expand_trace_paths(const std::vector<std::string>& patterns);

struct SimulateOptions {
    Path config;                          // scenario JSON
    Path out_dir;
    std::optional<std::size_t> count;     // default: "count" in the config, else the preset record count
    std::optional<std::uint64_t> seed;    // default: the config seed
    std::size_t threads = 0;

    nlohmann::json to_json() const;
    static SimulateOptions from_json(const nlohmann::json& j);
};

struct SimulateResult {
    std::vector<Path> traces;
    Path manifest;
};

SimulateResult cmd_simulate(const SimulateOptions& options);

struct CalibrateOptions {
    Detector detector;
    std::vector<std::string> traces;      // paths or glob patterns
    std::size_t window_length = 0;        // K, in decimated samples
    std::size_t decimation = 1;
    double pfa = 1e-2;
    std::uint64_t seed = 0;
    std::optional<std::size_t> grid_stride;
    std::optional<std::size_t> num_windows;
    /// Attack-free prefix in raw samples; default: the sidecar ground truth, else the whole record.
    std::optional<std::size_t> prefix;
    Path output;
    std::size_t threads = 0;

    nlohmann::json to_json() const;
    static CalibrateOptions from_json(const nlohmann::json& j);
};

struct CalibrateResult {
    ThresholdDocument document;
    ThresholdEstimate estimate;
    Path manifest;
    std::vector<std::string> warnings;
};

CalibrateResult cmd_calibrate(const CalibrateOptions& options);

struct DetectOptions {
    Path threshold;
    std::optional<Detector> detector;          // must agree with the threshold document
    Path trace;
    std::optional<std::size_t> window_length;  // must agree with the threshold document
    std::optional<std::size_t> stride;         // default max(1, K/50)
    std::optional<MofN> m_of_n;
    Path output_prefix;                        // writes <prefix>.windows.csv and <prefix>.binary.csv

    nlohmann::json to_json() const;
    static DetectOptions from_json(const nlohmann::json& j);
};

struct WindowDecision {
    std::int64_t position = 0;
    std::optional<DetectionReport> report;  // empty for degenerate windows, which never fire
    bool detected = false;
};

struct DetectResult {
    ThresholdDocument threshold;
    std::vector<WindowDecision> windows;
    BinaryDetectionTrace raw;
    std::optional<BinaryDetectionTrace> integrated;
    Path windows_csv;
    Path binary_csv;
    Path manifest;
};

DetectResult cmd_detect(const DetectOptions& options);

/// Evaluates one detector on the given window starts of an already decimated record.
std::vector<WindowDecision> detect_windows(const Detector& detector, double threshold, const TraceRecord& decimated,
                                           std::size_t window_length, std::size_t grid_stride,
                                           const std::vector<std::int64_t>& starts,
                                           std::int64_t reported_offset = 0);

struct EvaluateOptions {
    std::vector<Path> thresholds;          // one per detector
    std::vector<std::string> traces;       // paths or glob patterns
    std::optional<std::size_t> window_length;
    std::optional<std::size_t> stride;
    std::optional<MofN> m_of_n;
    /// Align window positions on the sidecar ground truth when every record carries one.
    bool align_ground_truth = true;
    std::string label;                     // default: scenario kind of the first record
    Path output;
    std::size_t threads = 0;

    nlohmann::json to_json() const;
    static EvaluateOptions from_json(const nlohmann::json& j);
};

struct PdPoint {
    std::int64_t position = 0;
    double pd = 0.0;
    std::size_t num_records = 0;
    std::optional<double> pd_integrated;
};

struct PdCurve {
    Detector detector;
    double threshold = 0.0;
    std::string scenario;
    std::vector<PdPoint> points;
};

struct EvaluateResult {
    std::vector<PdCurve> curves;
    /// traces[d][r]: binary decisions of detector d on record r (records sorted by id).
    std::vector<std::vector<BinaryDetectionTrace>> traces;
    std::vector<std::string> record_ids;
    bool aligned = false;
    std::vector<std::string> warnings;
    Path manifest;
};

EvaluateResult cmd_evaluate(const EvaluateOptions& options);

/// A detector with its calibrated threshold and split-grid stride.
struct DetectorSetup {
    Detector detector;
    double threshold = 0.0;
    std::size_t grid_stride = 1;
};

/// Evaluates in-memory, already decimated records (in the given order); used by
/// cmd_evaluate and the acceptance suite.
EvaluateResult evaluate_records(const std::vector<DetectorSetup>& detectors, const std::vector<TraceRecord>& records,
                                std::size_t window_length, std::size_t stride, std::optional<MofN> m_of_n,
                                bool align_ground_truth, std::string label, std::size_t threads = 0);

void write_pd_curves(const std::vector<PdCurve>& curves, std::ostream& out);

/// Re-runs the command recorded in a manifest.
void replay_manifest(const Path& manifest);

}  // namespace jamdet::harness
