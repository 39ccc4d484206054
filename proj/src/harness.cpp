#include "jamdet/harness.hpp"

#include <glob.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "jamdet/errors.hpp"
#include "jamdet/hashing.hpp"
#include "parallel.hpp"

namespace jamdet::harness {

namespace {

using nlohmann::json;

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

json read_json(const Path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("'" + path.string() + "': " + e.what());
    }
}

void write_json(const Path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

std::ofstream open_output(const Path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    return out;
}

Path with_suffix(const Path& prefix, const std::string& suffix) { return Path(prefix.string() + suffix); }

Path manifest_path_for(const Path& output) {
    Path p = output;
    p.replace_extension(".manifest.json");
    return p;
}

template <typename T>
json optional_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<T>();
}

json detector_json(const Detector& d) { return {{"kind", d.name()}, {"variant", d.variant_name()}}; }

Detector detector_from(const json& j) {
    return Detector::parse(j.at("kind").get<std::string>(), j.value("variant", std::string("as-written")));
}

json mofn_json(const std::optional<MofN>& v) {
    return v ? json{{"m", v->m}, {"n", v->n}} : json(nullptr);
}

std::optional<MofN> mofn_from(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return MofN{j[key].at("m").get<std::size_t>(), j[key].at("n").get<std::size_t>()};
}

template <typename Fn>
auto parse_options(const char* what, Fn&& fn) {
    try {
        return fn();
    } catch (const json::exception& e) {
        throw ConfigError(std::string(what) + " options: " + e.what());
    }
}

std::vector<std::string> layout_names(const ComponentLayout& layout) {
    std::vector<std::string> names;
    for (Component c : layout.roles()) names.emplace_back(to_string(c));
    return names;
}

std::vector<TraceRecord> load_sorted(const std::vector<Path>& paths, std::size_t threads) {
    std::vector<TraceRecord> records(paths.size());
    detail::parallel_for(paths.size(), [&](std::size_t i) { records[i] = load_trace(paths[i]); }, threads);
    std::stable_sort(records.begin(), records.end(),
                     [](const TraceRecord& a, const TraceRecord& b) { return a.record_id < b.record_id; });
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].layout != records[0].layout) {
            throw FormatError("trace '" + records[i].record_id + "' has a different column layout than '" +
                              records[0].record_id + "'");
        }
    }
    return records;
}

std::vector<std::string> path_strings(const std::vector<Path>& paths) {
    std::vector<std::string> out;
    for (const auto& p : paths) out.push_back(p.string());
    return out;
}

void require_window(std::size_t window_length, std::size_t dim) {
    if (window_length < 2 * (dim + 1)) {
        throw InvalidArgumentError("window length " + std::to_string(window_length) + " is below 2(N+1) = " +
                                   std::to_string(2 * (dim + 1)));
    }
}

}  // namespace

// ---------------------------------------------------------------- manifest

std::string RunManifest::digest() const {
    const json body{{"command", command}, {"config", config}};
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(body.dump())));
    return buf;
}

json RunManifest::to_json() const {
    return {{"command", command},
            {"config", config},
            {"config_digest", digest()},
            {"inputs", inputs},
            {"calibration_reference", calibration_reference},
            {"tool_version", tool_version}};
}

RunManifest RunManifest::from_json(const json& j) {
    try {
        RunManifest m;
        m.command = j.at("command").get<std::string>();
        m.config = j.at("config");
        m.inputs = j.value("inputs", std::vector<std::string>{});
        m.calibration_reference = j.value("calibration_reference", std::string());
        m.tool_version = j.value("tool_version", std::string(kToolVersion));
        return m;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("manifest: ") + e.what());
    }
}

void RunManifest::write(const Path& path) const { write_json(path, to_json()); }

RunManifest RunManifest::read(const Path& path) { return from_json(read_json(path)); }

std::vector<Path> expand_trace_paths(const std::vector<std::string>& patterns) {
    std::vector<Path> out;
    for (const auto& pattern : patterns) {
        if (pattern.find_first_of("*?[") == std::string::npos) {
            out.emplace_back(pattern);
            continue;
        }
        glob_t g{};
        const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
        if (rc == 0) {
            for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
        }
        ::globfree(&g);
        if (rc != 0) throw ConfigError("no trace files match '" + pattern + "'");
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// ---------------------------------------------------------------- simulate

json SimulateOptions::to_json() const {
    return {{"config", config.string()},
            {"out_dir", out_dir.string()},
            {"count", optional_json(count)},
            {"seed", optional_json(seed)},
            {"threads", threads}};
}

SimulateOptions SimulateOptions::from_json(const json& j) {
    return parse_options("simulate", [&] {
        SimulateOptions o;
        o.config = j.at("config").get<std::string>();
        o.out_dir = j.at("out_dir").get<std::string>();
        o.count = optional_from<std::size_t>(j, "count");
        o.seed = optional_from<std::uint64_t>(j, "seed");
        o.threads = j.value("threads", std::size_t{0});
        return o;
    });
}

SimulateResult cmd_simulate(const SimulateOptions& options) {
    const json raw = read_json(options.config);
    ScenarioConfig config = ScenarioConfig::from_json(raw);

    std::size_t count = 0;
    if (options.count) {
        count = *options.count;
    } else if (raw.contains("count")) {
        count = raw["count"].get<std::size_t>();
    } else {
        count = preset_record_count(config.kind, config.j_over_s_db);
    }
    const std::uint64_t master = options.seed.value_or(config.seed);
    config.seed = master;

    std::filesystem::create_directories(options.out_dir);
    SimulateResult result;
    result.manifest = options.out_dir / "manifest.json";

    SimulateOptions resolved = options;
    resolved.count = count;
    resolved.seed = master;
    resolved.threads = 0;
    RunManifest manifest;
    manifest.command = "simulate";
    manifest.config = resolved.to_json();
    manifest.config["scenario"] = config.to_json();
    manifest.inputs = {options.config.string()};

    result.traces.resize(count);
    const std::string kind(to_string(config.kind));
    detail::parallel_for(
        count,
        [&](std::size_t i) {
            char id[64];
            std::snprintf(id, sizeof id, "%s_%05zu", kind.c_str(), i);
            const TraceRecord record = generate(config, record_seed(master, id), id);
            const Path path = options.out_dir / (std::string(id) + ".csv");
            save_trace(record, path, json{{"manifest", "manifest.json"}});
            result.traces[i] = path;
        },
        options.threads);
    manifest.write(result.manifest);
    return result;
}

// ---------------------------------------------------------------- calibrate

json CalibrateOptions::to_json() const {
    return {{"detector", detector_json(detector)},
            {"traces", traces},
            {"window_length", window_length},
            {"decimation", decimation},
            {"pfa", pfa},
            {"seed", seed},
            {"grid_stride", optional_json(grid_stride)},
            {"num_windows", optional_json(num_windows)},
            {"prefix", optional_json(prefix)},
            {"output", output.string()},
            {"threads", threads}};
}

CalibrateOptions CalibrateOptions::from_json(const json& j) {
    return parse_options("calibrate", [&] {
        CalibrateOptions o;
        o.detector = detector_from(j.at("detector"));
        o.traces = j.at("traces").get<std::vector<std::string>>();
        o.window_length = j.at("window_length").get<std::size_t>();
        o.decimation = j.value("decimation", std::size_t{1});
        o.pfa = j.value("pfa", 1e-2);
        o.seed = j.value("seed", std::uint64_t{0});
        o.grid_stride = optional_from<std::size_t>(j, "grid_stride");
        o.num_windows = optional_from<std::size_t>(j, "num_windows");
        o.prefix = optional_from<std::size_t>(j, "prefix");
        o.output = j.at("output").get<std::string>();
        o.threads = j.value("threads", std::size_t{0});
        return o;
    });
}

CalibrateResult cmd_calibrate(const CalibrateOptions& options) {
    if (options.decimation < 1) throw InvalidArgumentError("decimation factor must be at least 1");
    const auto paths = expand_trace_paths(options.traces);
    if (paths.empty()) throw ConfigError("no trace files given");
    std::vector<TraceRecord> records = load_sorted(paths, options.threads);
    for (auto& r : records) r = decimate(r, options.decimation);
    const std::size_t dim = records.front().dim();
    require_window(options.window_length, dim);

    CalibrationConfig config;
    config.target_pfa = options.pfa;
    config.window_length = options.window_length;
    config.num_windows = options.num_windows.value_or(0);
    config.seed = options.seed;
    for (std::size_t i = 0; i < records.size(); ++i) {
        std::size_t prefix = records[i].length();
        if (options.prefix) {
            prefix = (*options.prefix + options.decimation - 1) / options.decimation;
        } else if (records[i].ground_truth_change) {
            prefix = *records[i].ground_truth_change;
        }
        config.sources.push_back({i, std::min(prefix, records[i].length())});
    }
    config.validate();

    CalibrateResult result;
    if (config.undersized()) {
        result.warnings.push_back("only " + std::to_string(config.resolved_num_windows()) +
                                  " null windows requested; fewer than 10/pfa gives a noisy threshold");
    }
    const NullWindowSampler sampler(config, records);
    const std::size_t grid_stride = options.grid_stride.value_or(SplitGrid::default_stride(options.window_length));
    const SplitGrid grid = SplitGrid::full(dim, options.window_length, grid_stride);
    result.estimate = estimate_threshold(
        options.detector, grid, sampler.size(), [&](std::size_t i) { return sampler.window(i); }, options.pfa,
        options.threads);
    if (result.estimate.excessive_skips()) {
        result.warnings.push_back(std::to_string(result.estimate.skipped_windows) +
                                  " degenerate null windows were skipped");
    }

    result.manifest = manifest_path_for(options.output);
    ThresholdDocument& doc = result.document;
    doc.detector = options.detector;
    doc.dim = dim;
    doc.window_length = options.window_length;
    doc.grid_stride = grid_stride;
    doc.grid_size = grid.size();
    doc.decimation = options.decimation;
    doc.target_pfa = options.pfa;
    doc.threshold = result.estimate.threshold;
    doc.empirical_pfa = result.estimate.empirical_pfa;
    doc.num_windows = result.estimate.num_windows_used;
    doc.skipped_windows = result.estimate.skipped_windows;
    doc.seed = options.seed;
    doc.layout = layout_names(records.front().layout);
    doc.manifest = result.manifest.filename().string();
    write_json(options.output, doc.to_json());

    CalibrateOptions resolved = options;
    resolved.grid_stride = grid_stride;
    resolved.num_windows = config.resolved_num_windows();
    resolved.threads = 0;
    RunManifest manifest;
    manifest.command = "calibrate";
    manifest.config = resolved.to_json();
    manifest.inputs = path_strings(paths);
    manifest.write(result.manifest);
    return result;
}

// ---------------------------------------------------------------- detect

json DetectOptions::to_json() const {
    return {{"threshold", threshold.string()},
            {"detector", detector ? detector_json(*detector) : json(nullptr)},
            {"trace", trace.string()},
            {"window_length", optional_json(window_length)},
            {"stride", optional_json(stride)},
            {"m_of_n", mofn_json(m_of_n)},
            {"output_prefix", output_prefix.string()}};
}

DetectOptions DetectOptions::from_json(const json& j) {
    return parse_options("detect", [&] {
        DetectOptions o;
        o.threshold = j.at("threshold").get<std::string>();
        if (j.contains("detector") && !j["detector"].is_null()) o.detector = detector_from(j["detector"]);
        o.trace = j.at("trace").get<std::string>();
        o.window_length = optional_from<std::size_t>(j, "window_length");
        o.stride = optional_from<std::size_t>(j, "stride");
        o.m_of_n = mofn_from(j, "m_of_n");
        o.output_prefix = j.at("output_prefix").get<std::string>();
        return o;
    });
}

std::vector<WindowDecision> detect_windows(const Detector& detector, double threshold, const TraceRecord& decimated,
                                           std::size_t window_length, std::size_t grid_stride,
                                           const std::vector<std::int64_t>& starts, std::int64_t reported_offset) {
    const SplitGrid grid = SplitGrid::full(decimated.dim(), window_length, grid_stride);
    const WindowView all = decimated.view();
    std::vector<WindowDecision> out;
    out.reserve(starts.size());
    for (const std::int64_t start : starts) {
        if (start < 0 || static_cast<std::size_t>(start) + window_length > decimated.length()) {
            throw InvalidArgumentError("window at " + std::to_string(start) + " exceeds record '" +
                                       decimated.record_id + "'");
        }
        WindowDecision d;
        d.position = start + reported_offset;
        try {
            d.report = apply_threshold(evaluate(detector, all.slice(static_cast<std::size_t>(start), window_length), grid),
                                       threshold);
            d.detected = d.report->detected;
        } catch (const DegenerateWindowError&) {
            d.detected = false;
        }
        out.push_back(std::move(d));
    }
    return out;
}

namespace {

BinaryDetectionTrace to_trace(const std::vector<WindowDecision>& decisions) {
    std::vector<std::int64_t> positions;
    std::vector<std::uint8_t> detected;
    for (const auto& d : decisions) {
        positions.push_back(d.position);
        detected.push_back(d.detected ? 1 : 0);
    }
    return BinaryDetectionTrace(std::move(positions), std::move(detected));
}

void check_threshold_matches(const ThresholdDocument& doc, const TraceRecord& record, const Path& trace) {
    if (record.dim() != doc.dim) {
        throw ConfigError("threshold was calibrated for N=" + std::to_string(doc.dim) + " but '" + trace.string() +
                          "' has N=" + std::to_string(record.dim()));
    }
    if (!doc.layout.empty() && doc.layout != layout_names(record.layout)) {
        throw ConfigError("threshold layout does not match the columns of '" + trace.string() + "'");
    }
}

}  // namespace

DetectResult cmd_detect(const DetectOptions& options) {
    DetectResult result;
    result.threshold = ThresholdDocument::from_json(read_json(options.threshold));
    const ThresholdDocument& doc = result.threshold;
    if (options.detector && !(*options.detector == doc.detector)) {
        throw ConfigError("threshold was calibrated for " + std::string(doc.detector.name()) + " (" +
                          std::string(doc.detector.variant_name()) + "), not " +
                          std::string(options.detector->name()) + " (" + std::string(options.detector->variant_name()) +
                          ")");
    }
    if (options.window_length && *options.window_length != doc.window_length) {
        throw ConfigError("threshold was calibrated for K=" + std::to_string(doc.window_length) + ", not K=" +
                          std::to_string(*options.window_length));
    }
    const TraceRecord raw = load_trace(options.trace);
    check_threshold_matches(doc, raw, options.trace);
    const TraceRecord record = decimate(raw, doc.decimation);
    const std::size_t K = doc.window_length;
    const std::size_t stride = options.stride.value_or(WindowingPlan::default_stride(K));
    std::vector<std::int64_t> starts;
    for (std::size_t p : window_positions(record.length(), K, stride)) starts.push_back(static_cast<std::int64_t>(p));

    result.windows = detect_windows(doc.detector, doc.threshold, record, K, doc.grid_stride, starts);
    result.raw = to_trace(result.windows);
    if (options.m_of_n) result.integrated = integrate_m_of_n(result.raw, options.m_of_n->m, options.m_of_n->n);

    result.windows_csv = with_suffix(options.output_prefix, ".windows.csv");
    result.binary_csv = with_suffix(options.output_prefix, ".binary.csv");
    result.manifest = with_suffix(options.output_prefix, ".manifest.json");
    {
        auto out = open_output(result.windows_csv);
        out << "position,statistic,argmax_split,argmax_split_null,detected";
        if (result.integrated) out << ",detected_m_of_n";
        out << '\n';
        for (std::size_t i = 0; i < result.windows.size(); ++i) {
            const auto& w = result.windows[i];
            out << w.position << ',';
            if (w.report) {
                out << format_double(w.report->statistic) << ',' << w.report->argmax_split << ',';
                if (w.report->argmax_split_null) out << *w.report->argmax_split_null;
            } else {
                out << "nan,,";
            }
            out << ',' << (w.detected ? 1 : 0);
            if (result.integrated) out << ',' << int(result.integrated->detected()[i]);
            out << '\n';
        }
    }
    {
        auto out = open_output(result.binary_csv);
        out << "position,detected";
        if (result.integrated) out << ",detected_m_of_n";
        out << '\n';
        for (std::size_t i = 0; i < result.raw.size(); ++i) {
            out << result.raw.positions()[i] << ',' << int(result.raw.detected()[i]);
            if (result.integrated) out << ',' << int(result.integrated->detected()[i]);
            out << '\n';
        }
    }

    DetectOptions resolved = options;
    resolved.detector = doc.detector;
    resolved.window_length = K;
    resolved.stride = stride;
    RunManifest manifest;
    manifest.command = "detect";
    manifest.config = resolved.to_json();
    manifest.inputs = {options.trace.string()};
    manifest.calibration_reference = options.threshold.string();
    manifest.write(result.manifest);
    return result;
}

// ---------------------------------------------------------------- evaluate

json EvaluateOptions::to_json() const {
    return {{"thresholds", path_strings(thresholds)},
            {"traces", traces},
            {"window_length", optional_json(window_length)},
            {"stride", optional_json(stride)},
            {"m_of_n", mofn_json(m_of_n)},
            {"align_ground_truth", align_ground_truth},
            {"label", label},
            {"output", output.string()},
            {"threads", threads}};
}

EvaluateOptions EvaluateOptions::from_json(const json& j) {
    return parse_options("evaluate", [&] {
        EvaluateOptions o;
        for (const auto& t : j.at("thresholds").get<std::vector<std::string>>()) o.thresholds.emplace_back(t);
        o.traces = j.at("traces").get<std::vector<std::string>>();
        o.window_length = optional_from<std::size_t>(j, "window_length");
        o.stride = optional_from<std::size_t>(j, "stride");
        o.m_of_n = mofn_from(j, "m_of_n");
        o.align_ground_truth = j.value("align_ground_truth", true);
        o.label = j.value("label", std::string());
        o.output = j.at("output").get<std::string>();
        o.threads = j.value("threads", std::size_t{0});
        return o;
    });
}

EvaluateResult evaluate_records(const std::vector<DetectorSetup>& detectors, const std::vector<TraceRecord>& records,
                                std::size_t window_length, std::size_t stride, std::optional<MofN> m_of_n,
                                bool align_ground_truth, std::string label, std::size_t threads) {
    if (records.size() < 2) throw InsufficientDataError("evaluation needs at least 2 trace records");
    if (detectors.empty()) throw InvalidArgumentError("evaluation needs at least one detector");
    if (stride == 0) throw InvalidArgumentError("window stride must be positive");
    require_window(window_length, records.front().dim());
    const std::size_t K = window_length;
    const auto S = static_cast<std::int64_t>(stride);

    EvaluateResult result;
    result.aligned = align_ground_truth && std::all_of(records.begin(), records.end(), [](const TraceRecord& r) {
                         return r.ground_truth_change.has_value();
                     });

    // Window starts per record and the offset that maps a start to its reported position.
    const std::size_t R = records.size();
    std::vector<std::vector<std::int64_t>> starts(R);
    std::vector<std::int64_t> offsets(R, 0);
    bool truncated = false;
    if (result.aligned) {
        // Starts p = g + j*stride with 0 <= p and p + K <= length; reported position j*stride.
        std::int64_t j_lo = std::numeric_limits<std::int64_t>::min();
        std::int64_t j_hi = std::numeric_limits<std::int64_t>::max();
        std::vector<std::pair<std::int64_t, std::int64_t>> ranges(R);
        for (std::size_t r = 0; r < R; ++r) {
            const auto g = static_cast<std::int64_t>(*records[r].ground_truth_change);
            const auto last = static_cast<std::int64_t>(records[r].length()) - static_cast<std::int64_t>(K);
            if (last < 0) {
                throw InsufficientDataError("record '" + records[r].record_id + "' is shorter than the window");
            }
            // Smallest j with g + j*S >= 0 and largest j with g + j*S <= last.
            const std::int64_t lo = -(g / S);
            const std::int64_t hi = last >= g ? (last - g) / S : -((g - last + S - 1) / S);
            ranges[r] = {lo, hi};
            j_lo = std::max(j_lo, lo);
            j_hi = std::min(j_hi, hi);
        }
        if (j_lo > j_hi) throw InsufficientDataError("records share no common window span around the change");
        for (std::size_t r = 0; r < R; ++r) {
            truncated = truncated || ranges[r] != std::pair{j_lo, j_hi};
            const auto g = static_cast<std::int64_t>(*records[r].ground_truth_change);
            for (std::int64_t j = j_lo; j <= j_hi; ++j) starts[r].push_back(g + j * S);
            offsets[r] = -g;
        }
    } else {
        std::size_t common = std::numeric_limits<std::size_t>::max();
        for (const auto& r : records) {
            if (r.length() < K) throw InsufficientDataError("record '" + r.record_id + "' is shorter than the window");
            const std::size_t n = (r.length() - K) / stride + 1;
            truncated = truncated || (common != std::numeric_limits<std::size_t>::max() && n != common);
            common = std::min(common, n);
        }
        for (std::size_t r = 0; r < R; ++r) {
            for (std::size_t i = 0; i < common; ++i) starts[r].push_back(static_cast<std::int64_t>(i) * S);
        }
    }
    if (truncated) result.warnings.push_back("records have unequal usable length; truncated to the common span");

    for (const auto& r : records) result.record_ids.push_back(r.record_id);
    result.traces.assign(detectors.size(), std::vector<BinaryDetectionTrace>(R));
    detail::parallel_for(
        detectors.size() * R,
        [&](std::size_t task) {
            const std::size_t d = task / R;
            const std::size_t r = task % R;
            const auto& setup = detectors[d];
            result.traces[d][r] = to_trace(detect_windows(setup.detector, setup.threshold, records[r], K,
                                                          setup.grid_stride, starts[r], offsets[r]));
        },
        threads);

    for (std::size_t d = 0; d < detectors.size(); ++d) {
        PdCurve curve;
        curve.detector = detectors[d].detector;
        curve.threshold = detectors[d].threshold;
        curve.scenario = label;
        std::vector<BinaryDetectionTrace> integrated;
        if (m_of_n) {
            for (const auto& t : result.traces[d]) integrated.push_back(integrate_m_of_n(t, m_of_n->m, m_of_n->n));
        }
        const auto& first = result.traces[d].front();
        for (std::size_t i = 0; i < first.size(); ++i) {
            PdPoint point;
            point.position = first.positions()[i];
            point.num_records = R;
            std::size_t hits = 0;
            for (const auto& t : result.traces[d]) hits += t.detected()[i];
            point.pd = static_cast<double>(hits) / static_cast<double>(R);
            if (m_of_n) {
                std::size_t ihits = 0;
                for (const auto& t : integrated) ihits += t.detected()[i];
                point.pd_integrated = static_cast<double>(ihits) / static_cast<double>(R);
            }
            curve.points.push_back(point);
        }
        result.curves.push_back(std::move(curve));
    }
    return result;
}

void write_pd_curves(const std::vector<PdCurve>& curves, std::ostream& out) {
    const bool integrated = !curves.empty() && !curves.front().points.empty() &&
                            curves.front().points.front().pd_integrated.has_value();
    out << "detector,variant,position,pd,num_records,threshold,scenario";
    if (integrated) out << ",pd_m_of_n";
    out << '\n';
    for (const auto& c : curves) {
        const std::string threshold = format_double(c.threshold);
        for (const auto& p : c.points) {
            out << c.detector.name() << ',' << c.detector.variant_name() << ',' << p.position << ','
                << format_double(p.pd) << ',' << p.num_records << ',' << threshold << ',' << c.scenario;
            if (integrated) out << ',' << format_double(p.pd_integrated.value_or(0.0));
            out << '\n';
        }
    }
}

EvaluateResult cmd_evaluate(const EvaluateOptions& options) {
    if (options.thresholds.empty()) throw ConfigError("at least one threshold file is required");
    std::vector<ThresholdDocument> docs;
    for (const auto& t : options.thresholds) docs.push_back(ThresholdDocument::from_json(read_json(t)));
    const ThresholdDocument& first = docs.front();
    for (std::size_t i = 1; i < docs.size(); ++i) {
        if (docs[i].window_length != first.window_length || docs[i].decimation != first.decimation ||
            docs[i].dim != first.dim) {
            throw ConfigError("threshold files disagree on K, N or decimation");
        }
    }
    if (options.window_length && *options.window_length != first.window_length) {
        throw ConfigError("threshold was calibrated for K=" + std::to_string(first.window_length) + ", not K=" +
                          std::to_string(*options.window_length));
    }

    const auto paths = expand_trace_paths(options.traces);
    std::vector<TraceRecord> records = load_sorted(paths, options.threads);
    if (records.size() < 2) throw InsufficientDataError("evaluation needs at least 2 trace records");
    for (std::size_t i = 0; i < records.size(); ++i) check_threshold_matches(first, records[i], paths[i]);
    for (auto& r : records) r = decimate(r, first.decimation);

    std::string label = options.label;
    if (label.empty()) {
        const auto& s = records.front().scenario;
        label = s.is_object() && s.contains("kind") && s["kind"].is_string() ? s["kind"].get<std::string>() : "recorded";
    }
    std::vector<DetectorSetup> setups;
    for (const auto& doc : docs) setups.push_back({doc.detector, doc.threshold, doc.grid_stride});
    const std::size_t stride = options.stride.value_or(WindowingPlan::default_stride(first.window_length));

    EvaluateResult result = evaluate_records(setups, records, first.window_length, stride, options.m_of_n,
                                             options.align_ground_truth, label, options.threads);
    {
        auto out = open_output(options.output);
        write_pd_curves(result.curves, out);
    }
    result.manifest = manifest_path_for(options.output);

    EvaluateOptions resolved = options;
    resolved.window_length = first.window_length;
    resolved.stride = stride;
    resolved.label = label;
    resolved.threads = 0;
    RunManifest manifest;
    manifest.command = "evaluate";
    manifest.config = resolved.to_json();
    manifest.inputs = path_strings(paths);
    std::string refs;
    for (const auto& t : options.thresholds) refs += (refs.empty() ? "" : ";") + t.string();
    manifest.calibration_reference = refs;
    manifest.write(result.manifest);
    return result;
}

void replay_manifest(const Path& path) {
    const RunManifest m = RunManifest::read(path);
    if (m.command == "simulate") {
        cmd_simulate(SimulateOptions::from_json(m.config));
    } else if (m.command == "calibrate") {
        cmd_calibrate(CalibrateOptions::from_json(m.config));
    } else if (m.command == "detect") {
        cmd_detect(DetectOptions::from_json(m.config));
    } else if (m.command == "evaluate") {
        cmd_evaluate(EvaluateOptions::from_json(m.config));
    } else {
        throw ConfigError("manifest: unknown command '" + m.command + "'");
    }
}

}  // namespace jamdet::harness
