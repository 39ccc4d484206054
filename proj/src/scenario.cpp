#include "jamdet/scenario.hpp"

#include <array>
#include <cmath>
#include <random>
#include <string>

#include "jamdet/errors.hpp"
#include "jamdet/hashing.hpp"

namespace jamdet {

namespace {

// Canonical-order baseline: snr_db, avg_noise_dbm, inst_noise_dbm.
constexpr std::array<double, 3> kBaselineMean{kPresetSnrDb, -100.0, -100.0};
constexpr std::array<double, 3> kBaselineStd{1.0, 0.5, 1.5};
constexpr std::array<std::array<double, 3>, 3> kBaselineCorr{{
    {1.0, -0.4, -0.2},
    {-0.4, 1.0, 0.5},
    {-0.2, 0.5, 1.0},
}};

std::size_t canonical_index(Component c) { return static_cast<std::size_t>(c); }

bool is_noise(Component c) { return c != Component::snr_db; }

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ConfigError("scenario." + field + ": " + what);
}

struct Sampler {
    Vec mean;
    std::array<double, kMaxDim * kMaxDim> chol{};  // lower, row-major with kMaxDim stride
    std::size_t dim = 0;

    Sampler(const Vec& m, const SymmetricMatrix& cov, const std::string& field) : mean(m), dim(m.size()) {
        auto f = ldl_factor(cov);
        if (!f.factor) fail(field, "covariance is not positive definite");
        for (std::size_t j = 0; j < dim; ++j) {
            const double s = std::sqrt(f.factor->pivot(j));
            for (std::size_t i = j; i < dim; ++i) chol[i * kMaxDim + j] = f.factor->lower(i, j) * s;
        }
    }

    template <typename Rng>
    void draw(Rng& rng, std::normal_distribution<double>& normal, double* out) const {
        std::array<double, kMaxDim> g{};
        for (std::size_t i = 0; i < dim; ++i) g[i] = normal(rng);
        for (std::size_t i = 0; i < dim; ++i) {
            double v = mean[i];
            for (std::size_t j = 0; j <= i; ++j) v += chol[i * kMaxDim + j] * g[j];
            out[i] = v;
        }
    }
};

TraceRecord make_record(const ScenarioConfig& config, std::uint64_t seed) {
    TraceRecord r;
    r.layout = config.layout;
    r.sample_period = config.sample_period;
    r.values.resize(config.total_samples * config.layout.size());
    if (config.change_index < config.total_samples) r.ground_truth_change = config.change_index;
    r.scenario = config.to_json();
    r.scenario["seed"] = seed;
    return r;
}

nlohmann::json vec_json(const Vec& v) { return std::vector<double>(v.values().begin(), v.values().end()); }

nlohmann::json cov_json(const SymmetricMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.dim(); ++i) {
        std::vector<double> row(m.dim());
        for (std::size_t j = 0; j < m.dim(); ++j) row[j] = m(i, j);
        rows.push_back(row);
    }
    return rows;
}

Vec parse_vec(const nlohmann::json& j, const std::string& field) {
    try {
        const auto v = j.get<std::vector<double>>();
        if (v.empty() || v.size() > kMaxDim) fail(field, "expected 1 to 3 numbers");
        return Vec::from(v);
    } catch (const nlohmann::json::exception&) {
        fail(field, "expected an array of numbers");
    }
}

SymmetricMatrix parse_cov(const nlohmann::json& j, const std::string& field) {
    try {
        const auto rows = j.get<std::vector<std::vector<double>>>();
        const std::size_t n = rows.size();
        if (n == 0 || n > kMaxDim) fail(field, "expected a 1x1 to 3x3 matrix");
        std::vector<double> dense;
        for (const auto& row : rows) {
            if (row.size() != n) fail(field, "matrix is not square");
            dense.insert(dense.end(), row.begin(), row.end());
        }
        return SymmetricMatrix::from_dense(dense, n);
    } catch (const nlohmann::json::exception&) {
        fail(field, "expected an array of numeric rows");
    } catch (const InvalidArgumentError& e) {
        fail(field, e.what());
    }
}

ComponentLayout parse_layout(const nlohmann::json& j) {
    try {
        std::vector<Component> roles;
        for (const auto& name : j.get<std::vector<std::string>>()) roles.push_back(component_from_string(name));
        return ComponentLayout(std::move(roles));
    } catch (const nlohmann::json::exception&) {
        fail("layout", "expected an array of component names");
    } catch (const InvalidArgumentError& e) {
        fail("layout", e.what());
    }
}

template <typename T>
T get_field(const nlohmann::json& j, const char* key, const std::string& path) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        fail(path, "missing or has the wrong type");
    }
}

void apply_overrides(ScenarioConfig& c, const nlohmann::json& j) {
    if (j.contains("kind")) c.kind = scenario_kind_from_string(get_field<std::string>(j, "kind", "kind"));
    if (j.contains("total_samples")) c.total_samples = get_field<std::size_t>(j, "total_samples", "total_samples");
    if (j.contains("change_index")) c.change_index = get_field<std::size_t>(j, "change_index", "change_index");
    if (j.contains("pre_mean")) c.pre_mean = parse_vec(j.at("pre_mean"), "pre_mean");
    if (j.contains("post_mean")) c.post_mean = parse_vec(j.at("post_mean"), "post_mean");
    if (j.contains("pre_cov")) c.pre_cov = parse_cov(j.at("pre_cov"), "pre_cov");
    if (j.contains("post_cov")) c.post_cov = parse_cov(j.at("post_cov"), "post_cov");
    if (j.contains("j_over_s_db")) c.j_over_s_db = get_field<double>(j, "j_over_s_db", "j_over_s_db");
    if (j.contains("sample_period")) c.sample_period = get_field<double>(j, "sample_period", "sample_period");
    if (j.contains("seed")) c.seed = get_field<std::uint64_t>(j, "seed", "seed");
    if (j.contains("spikes")) {
        const auto& s = j.at("spikes");
        if (!s.is_object()) fail("spikes", "expected an object");
        if (s.contains("period")) c.spikes.period = get_field<std::size_t>(s, "period", "spikes.period");
        if (s.contains("width")) c.spikes.width = get_field<std::size_t>(s, "width", "spikes.width");
        if (s.contains("mean_offset")) c.spikes.mean_offset = parse_vec(s.at("mean_offset"), "spikes.mean_offset");
        if (s.contains("cov_scale")) c.spikes.cov_scale = get_field<double>(s, "cov_scale", "spikes.cov_scale");
    }
}

}  // namespace

std::string_view to_string(ScenarioKind kind) noexcept {
    switch (kind) {
        case ScenarioKind::clean: return "clean";
        case ScenarioKind::bnlj: return "bnlj";
        case ScenarioKind::snlj: return "snlj";
        case ScenarioKind::rbs: return "rbs";
    }
    return "unknown";
}

ScenarioKind scenario_kind_from_string(std::string_view name) {
    if (name == "clean") return ScenarioKind::clean;
    if (name == "bnlj") return ScenarioKind::bnlj;
    if (name == "snlj") return ScenarioKind::snlj;
    if (name == "rbs") return ScenarioKind::rbs;
    fail("kind", "unknown scenario '" + std::string(name) + "' (expected clean, bnlj, snlj or rbs)");
}

void ScenarioConfig::validate() const {
    const std::size_t n = layout.size();
    if (n == 0) fail("layout", "missing");
    if (total_samples == 0) fail("total_samples", "must be positive");
    if (change_index == 0 || change_index > total_samples) {
        fail("change_index", "must lie in [1, total_samples]");
    }
    if (!(sample_period > 0.0)) fail("sample_period", "must be positive");
    if (pre_mean.size() != n) fail("pre_mean", "dimension does not match the layout");
    if (pre_cov.dim() != n) fail("pre_cov", "dimension does not match the layout");
    if (!ldl_factor(pre_cov).factor) fail("pre_cov", "covariance is not positive definite");
    if (kind != ScenarioKind::snlj) {
        if (post_mean.size() != n) fail("post_mean", "dimension does not match the layout");
    }
    if (kind == ScenarioKind::bnlj || kind == ScenarioKind::rbs) {
        if (post_cov.dim() != n) fail("post_cov", "dimension does not match the layout");
        if (!ldl_factor(post_cov).factor) fail("post_cov", "covariance is not positive definite");
    }
    if (kind == ScenarioKind::snlj) {
        if (spikes.width == 0) fail("spikes.width", "must be positive");
        if (spikes.width >= spikes.period) fail("spikes.width", "must be smaller than spikes.period");
        if (spikes.mean_offset.size() != n) fail("spikes.mean_offset", "dimension does not match the layout");
        if (!(spikes.cov_scale > 0.0)) fail("spikes.cov_scale", "must be positive");
    }
}

nlohmann::json ScenarioConfig::to_json() const {
    nlohmann::json j;
    j["kind"] = std::string(to_string(kind));
    std::vector<std::string> roles;
    for (Component c : layout.roles()) roles.emplace_back(to_string(c));
    j["layout"] = roles;
    j["total_samples"] = total_samples;
    j["change_index"] = change_index;
    j["pre_mean"] = vec_json(pre_mean);
    j["pre_cov"] = cov_json(pre_cov);
    if (post_mean.size() > 0) j["post_mean"] = vec_json(post_mean);
    if (post_cov.dim() > 0) j["post_cov"] = cov_json(post_cov);
    if (kind == ScenarioKind::snlj) {
        j["spikes"] = {{"period", spikes.period},
                       {"width", spikes.width},
                       {"mean_offset", vec_json(spikes.mean_offset)},
                       {"cov_scale", spikes.cov_scale}};
    }
    j["j_over_s_db"] = j_over_s_db;
    j["sample_period"] = sample_period;
    j["seed"] = seed;
    return j;
}

ScenarioConfig ScenarioConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("scenario: expected a JSON object");
    ScenarioConfig c;
    if (j.contains("preset")) {
        const ScenarioKind kind = scenario_kind_from_string(get_field<std::string>(j, "preset", "preset"));
        const double js = j.contains("j_over_s_db") ? get_field<double>(j, "j_over_s_db", "j_over_s_db") : 5.0;
        const double scale = j.contains("cov_scale") ? get_field<double>(j, "cov_scale", "cov_scale") : 10.0;
        const bool has_layout = j.contains("layout");
        switch (kind) {
            case ScenarioKind::clean:
                c = has_layout ? clean_preset(parse_layout(j.at("layout"))) : clean_preset();
                break;
            case ScenarioKind::bnlj:
                c = has_layout ? bnlj_preset(js, parse_layout(j.at("layout")), scale) : bnlj_preset(js, {}, scale);
                break;
            case ScenarioKind::rbs:
                c = has_layout ? rbs_preset(parse_layout(j.at("layout")), scale) : rbs_preset({}, scale);
                break;
            case ScenarioKind::snlj:
                c = has_layout ? snlj_preset(js, parse_layout(j.at("layout"))) : snlj_preset(js);
                break;
        }
        if (!j.contains("change_index")) {
            // The change point keeps its relative place when only the length is overridden.
            double f = static_cast<double>(c.change_index) / static_cast<double>(c.total_samples);
            if (j.contains("change_fraction")) {
                f = get_field<double>(j, "change_fraction", "change_fraction");
                if (!(f > 0.0 && f <= 1.0)) fail("change_fraction", "must lie in (0, 1]");
            }
            const std::size_t total =
                j.contains("total_samples") ? get_field<std::size_t>(j, "total_samples", "total_samples")
                                            : c.total_samples;
            c.change_index = f >= 1.0 ? total
                                      : std::max<std::size_t>(1, static_cast<std::size_t>(f * static_cast<double>(total)));
        }
    } else {
        if (!j.contains("layout")) fail("layout", "missing");
        c.layout = parse_layout(j.at("layout"));
        if (!j.contains("kind")) fail("kind", "missing");
    }
    apply_overrides(c, j);
    c.validate();
    return c;
}

std::uint64_t record_seed(std::uint64_t master_seed, std::string_view record_id) {
    return derive_seed(master_seed, record_id);
}

TraceRecord generate_clean(const ScenarioConfig& config, std::uint64_t seed) {
    if (config.kind != ScenarioKind::clean) throw ConfigError("scenario.kind: generate_clean needs kind 'clean'");
    config.validate();
    const Vec& post_mean = config.post_mean.size() > 0 ? config.post_mean : config.pre_mean;
    if (post_mean.size() != config.layout.size()) fail("post_mean", "dimension does not match the layout");
    const Sampler before(config.pre_mean, config.pre_cov, "pre_cov");
    const Sampler after(post_mean, config.pre_cov, "pre_cov");

    TraceRecord r = make_record(config, seed);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    const std::size_t n = config.layout.size();
    for (std::size_t k = 0; k < config.total_samples; ++k) {
        (k < config.change_index ? before : after).draw(rng, normal, &r.values[k * n]);
    }
    return r;
}

TraceRecord generate_step_attack(const ScenarioConfig& config, std::uint64_t seed) {
    if (config.kind != ScenarioKind::bnlj && config.kind != ScenarioKind::rbs) {
        throw ConfigError("scenario.kind: generate_step_attack needs kind 'bnlj' or 'rbs'");
    }
    config.validate();
    const Sampler before(config.pre_mean, config.pre_cov, "pre_cov");
    const Sampler after(config.post_mean, config.post_cov, "post_cov");

    TraceRecord r = make_record(config, seed);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    const std::size_t n = config.layout.size();
    for (std::size_t k = 0; k < config.total_samples; ++k) {
        (k < config.change_index ? before : after).draw(rng, normal, &r.values[k * n]);
    }
    return r;
}

std::vector<std::size_t> spike_onsets(const ScenarioConfig& config) {
    std::vector<std::size_t> onsets;
    if (config.kind != ScenarioKind::snlj || config.spikes.period == 0) return onsets;
    for (std::size_t k = config.change_index; k < config.total_samples; k += config.spikes.period) {
        onsets.push_back(k);
    }
    return onsets;
}

bool on_spike(const ScenarioConfig& config, std::size_t k) noexcept {
    if (config.kind != ScenarioKind::snlj || config.spikes.period == 0 || k < config.change_index) return false;
    return (k - config.change_index) % config.spikes.period < config.spikes.width;
}

TraceRecord generate_snlj(const ScenarioConfig& config, std::uint64_t seed) {
    if (config.kind != ScenarioKind::snlj) throw ConfigError("scenario.kind: generate_snlj needs kind 'snlj'");
    config.validate();
    const Sampler baseline(config.pre_mean, config.pre_cov, "pre_cov");
    const Sampler spike(config.pre_mean + config.spikes.mean_offset,
                        scale_noise_variance(config.pre_cov, config.layout, config.spikes.cov_scale), "spikes");

    TraceRecord r = make_record(config, seed);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    const std::size_t n = config.layout.size();
    for (std::size_t k = 0; k < config.total_samples; ++k) {
        (on_spike(config, k) ? spike : baseline).draw(rng, normal, &r.values[k * n]);
    }
    return r;
}

TraceRecord generate(const ScenarioConfig& config, std::uint64_t seed, std::string record_id) {
    TraceRecord r;
    switch (config.kind) {
        case ScenarioKind::clean: r = generate_clean(config, seed); break;
        case ScenarioKind::bnlj:
        case ScenarioKind::rbs: r = generate_step_attack(config, seed); break;
        case ScenarioKind::snlj: r = generate_snlj(config, seed); break;
    }
    r.record_id = std::move(record_id);
    return r;
}

Vec baseline_mean(const ComponentLayout& layout) {
    Vec m(layout.size());
    for (std::size_t i = 0; i < layout.size(); ++i) m[i] = kBaselineMean[canonical_index(layout[i])];
    return m;
}

SymmetricMatrix baseline_cov(const ComponentLayout& layout) {
    SymmetricMatrix c(layout.size());
    for (std::size_t i = 0; i < layout.size(); ++i) {
        for (std::size_t j = i; j < layout.size(); ++j) {
            const std::size_t a = canonical_index(layout[i]);
            const std::size_t b = canonical_index(layout[j]);
            c.set(i, j, kBaselineCorr[a][b] * kBaselineStd[a] * kBaselineStd[b]);
        }
    }
    return c;
}

SymmetricMatrix scale_noise_variance(const SymmetricMatrix& cov, const ComponentLayout& layout, double scale) {
    SymmetricMatrix out = cov;
    const double s = std::sqrt(scale);
    for (std::size_t i = 0; i < layout.size(); ++i) {
        for (std::size_t j = i; j < layout.size(); ++j) {
            double f = 1.0;
            if (is_noise(layout[i])) f *= s;
            if (is_noise(layout[j])) f *= s;
            out.set(i, j, cov(i, j) * f);
        }
    }
    return out;
}

ScenarioConfig bnlj_preset(double j_over_s_db, ComponentLayout layout, double cov_scale) {
    if (layout.size() == 0) layout = ComponentLayout({Component::snr_db, Component::avg_noise_dbm});
    ScenarioConfig c;
    c.kind = ScenarioKind::bnlj;
    c.layout = layout;
    c.j_over_s_db = j_over_s_db;
    c.total_samples = j_over_s_db == 0.0 ? 26809 : 25535;
    c.change_index = c.total_samples * 2 / 5;
    c.pre_mean = baseline_mean(layout);
    c.pre_cov = baseline_cov(layout);
    const double jnr = kPresetSnrDb + j_over_s_db;
    c.post_mean = c.pre_mean;
    for (std::size_t i = 0; i < layout.size(); ++i) c.post_mean[i] += is_noise(layout[i]) ? jnr : -jnr;
    c.post_cov = scale_noise_variance(c.pre_cov, layout, cov_scale);
    return c;
}

ScenarioConfig rbs_preset(ComponentLayout layout, double cov_scale) {
    if (layout.size() == 0) layout = ComponentLayout({Component::avg_noise_dbm, Component::inst_noise_dbm});
    ScenarioConfig c;
    c.kind = ScenarioKind::rbs;
    c.layout = layout;
    c.total_samples = 51844;
    c.change_index = c.total_samples * 2 / 5;
    c.pre_mean = baseline_mean(layout);
    c.pre_cov = baseline_cov(layout);
    constexpr double kInterferenceRiseDb = 10.0;
    c.post_mean = c.pre_mean;
    for (std::size_t i = 0; i < layout.size(); ++i) {
        c.post_mean[i] += is_noise(layout[i]) ? kInterferenceRiseDb : -kInterferenceRiseDb;
    }
    c.post_cov = scale_noise_variance(c.pre_cov, layout, cov_scale);
    return c;
}

ScenarioConfig snlj_preset(double j_over_s_db, ComponentLayout layout) {
    if (layout.size() == 0) layout = ComponentLayout({Component::avg_noise_dbm, Component::inst_noise_dbm});
    ScenarioConfig c;
    c.kind = ScenarioKind::snlj;
    c.layout = layout;
    c.j_over_s_db = j_over_s_db;
    c.total_samples = j_over_s_db == 0.0 ? 69641 : 45442;
    c.change_index = c.total_samples * 2 / 5;
    c.pre_mean = baseline_mean(layout);
    c.pre_cov = baseline_cov(layout);
    // Raw-rate geometry; one hop every 600 raw samples, spike lasting 150.
    c.spikes.period = 600;
    c.spikes.width = 150;
    c.spikes.cov_scale = 25.0;
    c.spikes.mean_offset = Vec(layout.size());
    constexpr double kSpikeOffsetDb = 0.5;
    for (std::size_t i = 0; i < layout.size(); ++i) {
        c.spikes.mean_offset[i] = is_noise(layout[i]) ? kSpikeOffsetDb : -kSpikeOffsetDb;
    }
    return c;
}

ScenarioConfig clean_preset(ComponentLayout layout) {
    ScenarioConfig c;
    c.kind = ScenarioKind::clean;
    c.layout = layout;
    c.total_samples = 25535;
    c.change_index = c.total_samples;
    c.pre_mean = baseline_mean(layout);
    c.post_mean = c.pre_mean;
    c.pre_cov = baseline_cov(layout);
    return c;
}

ScenarioConfig preset(ScenarioKind kind, double j_over_s_db) {
    switch (kind) {
        case ScenarioKind::clean: return clean_preset();
        case ScenarioKind::bnlj: return bnlj_preset(j_over_s_db);
        case ScenarioKind::snlj: return snlj_preset(j_over_s_db);
        case ScenarioKind::rbs: return rbs_preset();
    }
    throw ConfigError("scenario.kind: unknown");
}

std::size_t preset_record_count(ScenarioKind kind, double j_over_s_db) {
    switch (kind) {
        case ScenarioKind::bnlj: return j_over_s_db == 0.0 ? 173 : 193;
        case ScenarioKind::snlj: return j_over_s_db == 0.0 ? 213 : 178;
        case ScenarioKind::rbs: return 185;
        case ScenarioKind::clean: return 193;
    }
    return 0;
}

}  // namespace jamdet
