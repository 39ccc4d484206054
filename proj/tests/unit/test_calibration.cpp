#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "jamdet/calibration.hpp"
#include "jamdet/errors.hpp"
#include "support.hpp"

using namespace jamdet;

namespace {

TraceRecord gaussian_record(std::string id, std::size_t n, std::size_t length, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    TraceRecord r;
    r.record_id = std::move(id);
    r.layout = testing_support::layout_for(n);
    r.values.resize(n * length);
    for (double& v : r.values) v = normal(rng);
    return r;
}

std::vector<TraceRecord> gaussian_records(std::size_t count, std::size_t n, std::size_t length, std::uint64_t seed) {
    std::vector<TraceRecord> out;
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(gaussian_record("r" + std::to_string(i), n, length, seed * 1000 + i));
    }
    return out;
}

CalibrationConfig config_for(const std::vector<TraceRecord>& records, std::size_t k, std::size_t prefix,
                             std::size_t windows, std::uint64_t seed) {
    CalibrationConfig c;
    c.window_length = k;
    c.num_windows = windows;
    c.seed = seed;
    for (std::size_t i = 0; i < records.size(); ++i) c.sources.push_back({i, prefix});
    return c;
}

}  // namespace

TEST(NullWindows, ExactPrefixForcesTheOffset) {
    const auto records = gaussian_records(1, 2, 100, 1);
    const auto windows = draw_null_windows(config_for(records, 40, 40, 5, 9), records);
    ASSERT_EQ(windows.size(), 5u);
    for (const auto& w : windows) {
        EXPECT_EQ(w.data(), windows.front().data());
        EXPECT_TRUE(std::equal(w.data().begin(), w.data().end(), records[0].values.begin()));
    }
}

TEST(NullWindows, FixedSeedIsDeterministic) {
    const auto records = gaussian_records(3, 2, 500, 2);
    const auto config = config_for(records, 50, 400, 200, 77);
    const auto a = draw_null_windows(config, records);
    const auto b = draw_null_windows(config, records);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].data(), b[i].data());
    const auto c = draw_null_windows(config_for(records, 50, 400, 200, 78), records);
    std::size_t same = 0;
    for (std::size_t i = 0; i < a.size(); ++i) same += a[i].data() == c[i].data() ? 1 : 0;
    EXPECT_LT(same, 20u);
}

TEST(NullWindows, DrawsAreIndependentOfOrder) {
    const auto records = gaussian_records(3, 1, 300, 3);
    const NullWindowSampler sampler(config_for(records, 30, 300, 100, 5), records);
    std::vector<WindowPlacement> forward, backward(100);
    for (std::size_t i = 0; i < 100; ++i) forward.push_back(sampler.placement(i));
    for (std::size_t i = 100; i-- > 0;) backward[i] = sampler.placement(i);
    EXPECT_EQ(forward, backward);
}

TEST(NullWindows, OffsetsAndRecordsAreUniform) {
    const std::size_t k = 20;
    const auto records = gaussian_records(3, 1, 2 * k, 4);
    const NullWindowSampler sampler(config_for(records, k, 2 * k, 10000, 2024), records);
    std::vector<double> offsets(k + 1, 0.0), sources(3, 0.0);
    for (std::size_t i = 0; i < sampler.size(); ++i) {
        const auto p = sampler.placement(i);
        ASSERT_LE(p.offset, k);
        offsets[p.offset] += 1.0;
        sources[p.record] += 1.0;
    }
    auto chi2 = [](const std::vector<double>& counts) {
        const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
        const double expected = total / static_cast<double>(counts.size());
        double s = 0.0;
        for (double c : counts) s += (c - expected) * (c - expected) / expected;
        return s;
    };
    EXPECT_LT(chi2(offsets), 37.566);  // chi-square 99th percentile, 20 degrees of freedom
    EXPECT_LT(chi2(sources), 9.210);   // 2 degrees of freedom
}

TEST(NullWindows, ShortPrefixNamesTheRecord) {
    auto records = gaussian_records(2, 1, 100, 5);
    auto config = config_for(records, 50, 100, 10, 1);
    config.sources[1].prefix_length = 49;
    try {
        NullWindowSampler sampler(config, records);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("r1"), std::string::npos);
    }
}

TEST(CalibrationConfig, DefaultsAndValidation) {
    CalibrationConfig c;
    c.window_length = 10;
    c.sources.assign(193, NullSource{0, 10});
    EXPECT_EQ(c.resolved_num_windows(), 19300u);
    EXPECT_FALSE(c.undersized());
    c.num_windows = 500;
    EXPECT_TRUE(c.undersized());
    c.target_pfa = 0.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c.target_pfa = 1.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c.target_pfa = 0.01;
    c.sources.clear();
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Threshold, OrderStatisticOfOneToHundred) {
    std::vector<double> stats(100);
    std::iota(stats.begin(), stats.end(), 1.0);
    std::shuffle(stats.begin(), stats.end(), std::mt19937_64(1));
    const auto est = threshold_from_statistics(stats, 0.01);
    EXPECT_EQ(est.threshold, 99.0);
    EXPECT_DOUBLE_EQ(est.empirical_pfa, 0.01);
    EXPECT_EQ(est.num_windows_used, 100u);
}

TEST(Threshold, ConstantStatisticsNeverExceed) {
    const auto est = threshold_from_statistics(std::vector<double>(500, 3.25), 0.01);
    EXPECT_EQ(est.threshold, 3.25);
    EXPECT_EQ(est.empirical_pfa, 0.0);
}

TEST(Threshold, TooFewValuesGiveInfinity) {
    const auto est = threshold_from_statistics(std::vector<double>(50, 1.0), 0.01);
    EXPECT_EQ(est.threshold, std::numeric_limits<double>::infinity());
    EXPECT_EQ(est.empirical_pfa, 0.0);
}

TEST(Threshold, EmpiricalPfaNeverExceedsTarget) {
    std::mt19937_64 rng(8);
    std::exponential_distribution<double> expo;
    for (double pfa : {0.5, 0.1, 0.05, 0.013, 0.01, 0.001}) {
        for (std::size_t w : {1000u, 1234u, 20000u}) {
            std::vector<double> stats(w);
            for (double& v : stats) v = expo(rng);
            const auto est = threshold_from_statistics(stats, pfa);
            EXPECT_LE(est.empirical_pfa, pfa + 1e-12);
            EXPECT_TRUE(std::find(stats.begin(), stats.end(), est.threshold) != stats.end());
        }
    }
}

TEST(Threshold, MonotoneInTargetPfa) {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> normal;
    std::vector<double> stats(5000);
    for (double& v : stats) v = normal(rng);
    double previous = -std::numeric_limits<double>::infinity();
    for (double pfa : {0.5, 0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.001, 0.0002}) {
        const double t = threshold_from_statistics(stats, pfa).threshold;
        EXPECT_GE(t, previous);
        previous = t;
    }
}

TEST(Threshold, ExchangeableUnderPermutation) {
    std::mt19937_64 rng(10);
    std::normal_distribution<double> normal;
    std::vector<double> stats(3000);
    for (double& v : stats) v = normal(rng);
    const double t = threshold_from_statistics(stats, 0.01).threshold;
    for (int i = 0; i < 5; ++i) {
        std::shuffle(stats.begin(), stats.end(), rng);
        EXPECT_EQ(threshold_from_statistics(stats, 0.01).threshold, t);
    }
}

TEST(EstimateThreshold, RequiresEnoughWindows) {
    const auto records = gaussian_records(1, 1, 200, 11);
    const auto windows = draw_null_windows(config_for(records, 50, 200, 99, 1), records);
    EXPECT_THROW(estimate_threshold(Detector{}, SplitGrid::full(1, 50, 1), windows, 0.01), InsufficientDataError);
}

TEST(EstimateThreshold, SkipsDegenerateWindows) {
    std::vector<WindowMatrix> windows;
    std::mt19937_64 rng(12);
    std::normal_distribution<double> normal;
    for (int i = 0; i < 200; ++i) {
        std::vector<double> v(30, 1.0);
        if (i % 50 != 0) {
            for (double& x : v) x = normal(rng);
        }
        windows.push_back(WindowMatrix::scalar(v));
    }
    const auto est = estimate_threshold(Detector{}, SplitGrid::full(1, 30, 1), windows, 0.01);
    EXPECT_EQ(est.skipped_windows, 4u);
    EXPECT_EQ(est.num_windows_used, 196u);
    EXPECT_TRUE(est.excessive_skips());
}

TEST(EstimateThreshold, ResultDoesNotDependOnThreadCount) {
    const auto records = gaussian_records(4, 2, 400, 13);
    const auto windows = draw_null_windows(config_for(records, 60, 400, 400, 3), records);
    const auto grid = SplitGrid::full(2, 60, 1);
    const auto a = estimate_threshold(Detector{}, grid, windows, 0.01, 1);
    const auto b = estimate_threshold(Detector{}, grid, windows, 0.01, 4);
    EXPECT_EQ(a.threshold, b.threshold);
    EXPECT_EQ(a.sorted_statistics, b.sorted_statistics);
}

TEST(EstimateThreshold, FreshNullWindowsHitTheTargetPfa) {
    const std::size_t k = 200;
    const auto grid = SplitGrid::full(1, k, 1);
    const auto train = gaussian_records(50, 1, 5000, 21);
    const auto test = gaussian_records(50, 1, 5000, 22);
    const auto windows = draw_null_windows(config_for(train, k, 5000, 10000, 31), train);
    const auto est = estimate_threshold(Detector{}, grid, windows, 0.01);
    const auto fresh = draw_null_windows(config_for(test, k, 5000, 10000, 32), test);
    std::size_t fired = 0;
    for (const auto& w : fresh) fired += apply_threshold(mncd_statistic(w, grid), est.threshold).detected ? 1 : 0;
    const double pfa = static_cast<double>(fired) / 10000.0;
    EXPECT_GE(pfa, 0.007);
    EXPECT_LE(pfa, 0.013);
}

TEST(ThresholdDocument, JsonRoundTrip) {
    ThresholdDocument d;
    d.detector = Detector::parse("ncd", "strict");
    d.dim = 2;
    d.window_length = 501;
    d.grid_stride = 2;
    d.grid_size = 248;
    d.decimation = 10;
    d.target_pfa = 0.01;
    d.threshold = 12.375;
    d.empirical_pfa = 0.0098;
    d.num_windows = 19300;
    d.seed = 42;
    d.layout = {"avg_noise_dbm", "inst_noise_dbm"};
    const auto j = d.to_json();
    EXPECT_EQ(j.at("variant"), "strict");
    EXPECT_EQ(j.at("grid").at("first"), 3);
    EXPECT_EQ(j.at("grid").at("last"), 498);
    const auto back = ThresholdDocument::from_json(j);
    EXPECT_EQ(back.detector, d.detector);
    EXPECT_EQ(back.threshold, d.threshold);
    EXPECT_EQ(back.layout, d.layout);
    EXPECT_EQ(back.to_json(), j);

    d.threshold = std::numeric_limits<double>::infinity();
    EXPECT_EQ(ThresholdDocument::from_json(d.to_json()).threshold, std::numeric_limits<double>::infinity());
    auto broken = j;
    broken.erase("K");
    EXPECT_THROW(ThresholdDocument::from_json(broken), ConfigError);
}
