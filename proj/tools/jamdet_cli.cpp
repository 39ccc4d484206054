// jamdet: simulate traces, calibrate thresholds, run detection and evaluate Pd curves.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "jamdet/errors.hpp"
#include "jamdet/harness.hpp"

namespace {

namespace h = jamdet::harness;

constexpr int kExitValidation = 1;
constexpr int kExitData = 2;

struct DetectorFlags {
    std::string kind = "mncd";
    std::string variant = "as-written";

    void add(CLI::App* app, bool required) {
        auto* opt = app->add_option("--detector", kind, "Detector: ncd, mncd or spd")
                        ->check(CLI::IsMember({"ncd", "mncd", "spd"}));
        if (required) opt->required();
        app->add_option("--variant", variant, "NCD null-term reduction: as-written or strict")
            ->check(CLI::IsMember({"as-written", "strict"}));
    }
    jamdet::Detector get() const { return jamdet::Detector::parse(kind, variant); }
};

std::optional<h::MofN> parse_m_of_n(const std::string& text) {
    if (text.empty()) return std::nullopt;
    const auto slash = text.find('/');
    if (slash == std::string::npos) throw jamdet::InvalidArgumentError("--m-of-n expects M/N, e.g. 3/5");
    try {
        return h::MofN{std::stoul(text.substr(0, slash)), std::stoul(text.substr(slash + 1))};
    } catch (const std::logic_error&) {
        throw jamdet::InvalidArgumentError("--m-of-n expects M/N, e.g. 3/5");
    }
}

template <typename T>
std::optional<T> if_set(const CLI::Option* opt, const T& value) {
    return opt->count() > 0 ? std::optional<T>(value) : std::nullopt;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GLRT change detection for jamming and rogue base station attacks"};
    app.set_version_flag("--version", std::string(h::kToolVersion));
    app.require_subcommand(1);

    std::size_t threads = 0;
    app.add_option("--threads", threads, "Worker threads (0 = all cores)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Generate synthetic trace records from a scenario config");
    h::SimulateOptions sim_opts;
    std::size_t sim_count = 0;
    std::uint64_t sim_seed = 0;
    std::string sim_config, sim_out;
    sim->add_option("--config", sim_config, "Scenario JSON")->required();
    sim->add_option("--out", sim_out, "Output directory")->required();
    auto* sim_count_opt = sim->add_option("--count", sim_count, "Number of records");
    auto* sim_seed_opt = sim->add_option("--seed", sim_seed, "Master seed (overrides the config)");

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "Estimate a detection threshold from attack-free windows");
    DetectorFlags cal_det;
    cal_det.add(cal, true);
    h::CalibrateOptions cal_opts;
    std::size_t cal_grid = 0, cal_num = 0, cal_prefix = 0;
    std::string cal_out;
    cal->add_option("--traces", cal_opts.traces, "Trace CSV files or glob patterns")->required();
    cal->add_option("--window", cal_opts.window_length, "Window length K (decimated samples)")->required();
    cal->add_option("--decimate", cal_opts.decimation, "Undersampling factor")->check(CLI::PositiveNumber);
    cal->add_option("--pfa", cal_opts.pfa, "Target false-alarm probability");
    cal->add_option("--seed", cal_opts.seed, "Sampling seed");
    auto* cal_grid_opt = cal->add_option("--grid-stride", cal_grid, "Split-grid stride")->check(CLI::PositiveNumber);
    auto* cal_num_opt = cal->add_option("--windows", cal_num, "Null windows to draw (default records/pfa)");
    auto* cal_prefix_opt = cal->add_option("--prefix", cal_prefix, "Attack-free prefix length in raw samples");
    cal->add_option("--out", cal_out, "Threshold JSON output")->required();

    // detect
    auto* det = app.add_subcommand("detect", "Run a calibrated detector over one trace");
    DetectorFlags det_det;
    det_det.add(det, false);
    h::DetectOptions det_opts;
    std::string det_threshold, det_trace, det_out, det_mofn;
    std::size_t det_window = 0, det_stride = 0;
    det->add_option("--threshold", det_threshold, "Threshold JSON from calibrate")->required();
    det->add_option("--trace", det_trace, "Trace CSV")->required();
    auto* det_window_opt = det->add_option("--window", det_window, "Window length K (checked against the threshold)");
    auto* det_stride_opt = det->add_option("--stride", det_stride, "Window stride")->check(CLI::PositiveNumber);
    det->add_option("--m-of-n", det_mofn, "M-of-N post-detection integration, e.g. 3/5");
    det->add_option("--out", det_out, "Output prefix for <prefix>.windows.csv and <prefix>.binary.csv")->required();

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "Pd versus window position over a set of records");
    h::EvaluateOptions ev_opts;
    std::vector<std::string> ev_thresholds;
    std::string ev_out, ev_mofn;
    std::size_t ev_window = 0, ev_stride = 0;
    bool ev_absolute = false;
    ev->add_option("--threshold", ev_thresholds, "Threshold JSON files, one per detector")->required();
    ev->add_option("--traces", ev_opts.traces, "Trace CSV files or glob patterns")->required();
    auto* ev_window_opt = ev->add_option("--window", ev_window, "Window length K (checked against the thresholds)");
    auto* ev_stride_opt = ev->add_option("--stride", ev_stride, "Window stride")->check(CLI::PositiveNumber);
    ev->add_option("--m-of-n", ev_mofn, "Also report Pd after M-of-N integration, e.g. 3/5");
    ev->add_flag("--absolute", ev_absolute, "Report absolute positions instead of aligning on the ground truth");
    ev->add_option("--label", ev_opts.label, "Scenario label for the output");
    ev->add_option("--out", ev_out, "Pd curve CSV output")->required();

    // replay
    auto* rep = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
    std::string rep_manifest;
    rep->add_option("manifest", rep_manifest, "Manifest JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitValidation;
    }

    try {
        if (*sim) {
            sim_opts.config = sim_config;
            sim_opts.out_dir = sim_out;
            sim_opts.count = if_set(sim_count_opt, sim_count);
            sim_opts.seed = if_set(sim_seed_opt, sim_seed);
            sim_opts.threads = threads;
            const auto r = h::cmd_simulate(sim_opts);
            std::cout << "wrote " << r.traces.size() << " traces and " << r.manifest.string() << '\n';
        } else if (*cal) {
            cal_opts.detector = cal_det.get();
            cal_opts.grid_stride = if_set(cal_grid_opt, cal_grid);
            cal_opts.num_windows = if_set(cal_num_opt, cal_num);
            cal_opts.prefix = if_set(cal_prefix_opt, cal_prefix);
            cal_opts.output = cal_out;
            cal_opts.threads = threads;
            const auto r = h::cmd_calibrate(cal_opts);
            print_warnings(r.warnings);
            std::cout << r.document.detector.name() << " threshold " << r.document.threshold << " from "
                      << r.document.num_windows << " windows (empirical pfa " << r.document.empirical_pfa << ")\n";
        } else if (*det) {
            det_opts.threshold = det_threshold;
            det_opts.trace = det_trace;
            if (det->count("--detector") > 0) det_opts.detector = det_det.get();
            det_opts.window_length = if_set(det_window_opt, det_window);
            det_opts.stride = if_set(det_stride_opt, det_stride);
            det_opts.m_of_n = parse_m_of_n(det_mofn);
            det_opts.output_prefix = det_out;
            const auto r = h::cmd_detect(det_opts);
            std::size_t fired = 0;
            for (const auto& w : r.windows) fired += w.detected ? 1 : 0;
            std::cout << fired << " of " << r.windows.size() << " windows detected\n";
        } else if (*ev) {
            for (const auto& t : ev_thresholds) ev_opts.thresholds.emplace_back(t);
            ev_opts.window_length = if_set(ev_window_opt, ev_window);
            ev_opts.stride = if_set(ev_stride_opt, ev_stride);
            ev_opts.m_of_n = parse_m_of_n(ev_mofn);
            ev_opts.align_ground_truth = !ev_absolute;
            ev_opts.output = ev_out;
            ev_opts.threads = threads;
            const auto r = h::cmd_evaluate(ev_opts);
            print_warnings(r.warnings);
            std::cout << "evaluated " << r.record_ids.size() << " records, "
                      << (r.curves.empty() ? 0 : r.curves.front().points.size()) << " positions"
                      << (r.aligned ? " (aligned on ground truth)" : "") << '\n';
        } else if (*rep) {
            h::replay_manifest(rep_manifest);
        }
    } catch (const jamdet::InvalidArgumentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const jamdet::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const jamdet::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return 0;
}
