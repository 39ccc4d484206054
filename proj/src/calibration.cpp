#include "jamdet/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "jamdet/errors.hpp"
#include "jamdet/hashing.hpp"
#include "parallel.hpp"

namespace jamdet {

namespace {

std::size_t min_windows_for(double pfa) {
    return static_cast<std::size_t>(std::ceil(1.0 / pfa - 1e-9));
}

}  // namespace

void CalibrationConfig::validate() const {
    if (!(target_pfa > 0.0 && target_pfa < 1.0)) {
        throw ConfigError("calibration.target_pfa must lie in (0, 1), got " + std::to_string(target_pfa));
    }
    if (window_length == 0) throw ConfigError("calibration.window_length must be positive");
    if (sources.empty()) throw ConfigError("calibration.sources is empty");
}

std::size_t CalibrationConfig::resolved_num_windows() const {
    if (num_windows > 0) return num_windows;
    return static_cast<std::size_t>(std::ceil(static_cast<double>(sources.size()) / target_pfa - 1e-9));
}

bool CalibrationConfig::undersized() const {
    return static_cast<double>(resolved_num_windows()) < 10.0 / target_pfa - 1e-9;
}

NullWindowSampler::NullWindowSampler(CalibrationConfig config, std::span<const TraceRecord> records)
    : config_(std::move(config)), records_(records) {
    config_.validate();
    for (const auto& src : config_.sources) {
        if (src.record >= records_.size()) {
            throw ConfigError("calibration source refers to record #" + std::to_string(src.record) +
                              " but only " + std::to_string(records_.size()) + " records were given");
        }
        const TraceRecord& r = records_[src.record];
        if (src.prefix_length < config_.window_length) {
            throw ConfigError("record '" + r.record_id + "': attack-free prefix of " +
                              std::to_string(src.prefix_length) + " samples is shorter than the window length " +
                              std::to_string(config_.window_length));
        }
        if (src.prefix_length > r.length()) {
            throw ConfigError("record '" + r.record_id + "': attack-free prefix exceeds the record length");
        }
        if (r.dim() != records_[config_.sources.front().record].dim()) {
            throw ConfigError("record '" + r.record_id + "' has a different measurement dimension");
        }
    }
    num_windows_ = config_.resolved_num_windows();
}

WindowPlacement NullWindowSampler::placement(std::size_t draw) const {
    std::mt19937_64 rng(derive_seed(config_.seed, static_cast<std::uint64_t>(draw)));
    std::uniform_int_distribution<std::size_t> pick_source(0, config_.sources.size() - 1);
    const NullSource& src = config_.sources[pick_source(rng)];
    std::uniform_int_distribution<std::size_t> pick_offset(0, src.prefix_length - config_.window_length);
    return WindowPlacement{src.record, pick_offset(rng)};
}

WindowView NullWindowSampler::window(std::size_t draw) const {
    const WindowPlacement p = placement(draw);
    return records_[p.record].view().slice(p.offset, config_.window_length);
}

std::vector<WindowMatrix> draw_null_windows(const CalibrationConfig& config, std::span<const TraceRecord> records) {
    const NullWindowSampler sampler(config, records);
    std::vector<WindowMatrix> out;
    out.reserve(sampler.size());
    for (std::size_t i = 0; i < sampler.size(); ++i) {
        const WindowView w = sampler.window(i);
        const TraceRecord& r = records[sampler.placement(i).record];
        out.emplace_back(std::vector<double>(w.data().begin(), w.data().end()), r.layout);
    }
    return out;
}

bool ThresholdEstimate::excessive_skips() const noexcept {
    const std::size_t draws = num_windows_used + skipped_windows;
    return draws > 0 && static_cast<double>(skipped_windows) > 0.01 * static_cast<double>(draws);
}

ThresholdEstimate threshold_from_statistics(std::vector<double> statistics, double target_pfa, std::size_t skipped) {
    if (!(target_pfa > 0.0 && target_pfa < 1.0)) throw InvalidArgumentError("target_pfa must lie in (0, 1)");
    ThresholdEstimate est;
    est.target_pfa = target_pfa;
    est.skipped_windows = skipped;
    std::sort(statistics.begin(), statistics.end());
    const std::size_t w = statistics.size();
    est.num_windows_used = w;

    const double expected_exceedances = target_pfa * static_cast<double>(w);
    if (w == 0 || expected_exceedances < 1.0 - 1e-9) {
        est.threshold = std::numeric_limits<double>::infinity();
        est.empirical_pfa = 0.0;
    } else {
        const auto allowed = static_cast<std::size_t>(std::floor(expected_exceedances + 1e-9));
        est.threshold = statistics[w - allowed - 1];
        const auto above = static_cast<std::size_t>(
            statistics.end() - std::upper_bound(statistics.begin(), statistics.end(), est.threshold));
        est.empirical_pfa = static_cast<double>(above) / static_cast<double>(w);
    }
    est.sorted_statistics = std::move(statistics);
    return est;
}

ThresholdEstimate estimate_threshold(const Detector& detector, const SplitGrid& grid, std::size_t count,
                                     const WindowSource& windows, double target_pfa, std::size_t threads) {
    if (!(target_pfa > 0.0 && target_pfa < 1.0)) throw InvalidArgumentError("target_pfa must lie in (0, 1)");
    if (count < min_windows_for(target_pfa)) {
        throw InsufficientDataError("threshold estimation at Pfa " + std::to_string(target_pfa) + " needs at least " +
                                    std::to_string(min_windows_for(target_pfa)) + " windows, got " +
                                    std::to_string(count));
    }
    std::vector<double> values(count, std::numeric_limits<double>::quiet_NaN());
    detail::parallel_for(
        count,
        [&](std::size_t i) {
            try {
                const double s = evaluate(detector, windows(i), grid).statistic;
                if (std::isfinite(s)) values[i] = s;
            } catch (const DegenerateWindowError&) {
            }
        },
        threads);

    std::vector<double> usable;
    usable.reserve(count);
    for (double v : values) {
        if (!std::isnan(v)) usable.push_back(v);
    }
    const std::size_t skipped = count - usable.size();
    ThresholdEstimate est = threshold_from_statistics(std::move(usable), target_pfa, skipped);
    est.detector = detector;
    return est;
}

ThresholdEstimate estimate_threshold(const Detector& detector, const SplitGrid& grid,
                                     std::span<const WindowMatrix> windows, double target_pfa, std::size_t threads) {
    return estimate_threshold(
        detector, grid, windows.size(), [&](std::size_t i) { return windows[i].view(); }, target_pfa, threads);
}

nlohmann::json ThresholdDocument::to_json() const {
    nlohmann::json j;
    j["detector"] = std::string(detector.name());
    j["variant"] = std::string(detector.variant_name());
    j["N"] = dim;
    j["K"] = window_length;
    j["grid"] = {{"first", dim + 1}, {"last", window_length >= dim + 1 ? window_length - dim - 1 : 0},
                 {"stride", grid_stride}, {"size", grid_size}};
    j["decimation"] = decimation;
    j["layout"] = layout;
    j["target_pfa"] = target_pfa;
    if (std::isinf(threshold)) {
        j["threshold"] = "inf";
    } else {
        j["threshold"] = threshold;
    }
    j["empirical_pfa"] = empirical_pfa;
    j["num_windows"] = num_windows;
    j["skipped_windows"] = skipped_windows;
    j["seed"] = seed;
    if (!manifest.empty()) j["manifest"] = manifest;
    return j;
}

ThresholdDocument ThresholdDocument::from_json(const nlohmann::json& j) {
    ThresholdDocument d;
    try {
        d.detector = Detector::parse(j.at("detector").get<std::string>(), j.value("variant", std::string("as-written")));
        d.dim = j.at("N").get<std::size_t>();
        d.window_length = j.at("K").get<std::size_t>();
        const auto& grid = j.at("grid");
        d.grid_stride = grid.at("stride").get<std::size_t>();
        d.grid_size = grid.value("size", std::size_t{0});
        d.decimation = j.value("decimation", std::size_t{1});
        d.layout = j.value("layout", std::vector<std::string>{});
        d.target_pfa = j.at("target_pfa").get<double>();
        const auto& t = j.at("threshold");
        if (t.is_string()) {
            if (t.get<std::string>() != "inf") throw ConfigError("threshold: expected a number or \"inf\"");
            d.threshold = std::numeric_limits<double>::infinity();
        } else {
            d.threshold = t.get<double>();
        }
        d.empirical_pfa = j.at("empirical_pfa").get<double>();
        d.num_windows = j.at("num_windows").get<std::size_t>();
        d.skipped_windows = j.value("skipped_windows", std::size_t{0});
        d.seed = j.at("seed").get<std::uint64_t>();
        d.manifest = j.value("manifest", std::string{});
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("threshold document: ") + e.what());
    } catch (const InvalidArgumentError& e) {
        throw ConfigError(std::string("threshold document: ") + e.what());
    }
    return d;
}

}  // namespace jamdet
