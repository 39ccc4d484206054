#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "jamdet/matrix.hpp"
#include "jamdet/measurement.hpp"
#include "jamdet/trace.hpp"

namespace jamdet {

enum class ScenarioKind {
    clean,  // Gaussian with a common covariance, optional mean change
    bnlj,   // barrage noise-like jammer: abrupt step in mean and covariance
    snlj,   // smart (hopping) noise-like jammer: periodic rectangular spikes
    rbs,    // rogue base station: step change, BNLJ-like signature
};

std::string_view to_string(ScenarioKind kind) noexcept;
ScenarioKind scenario_kind_from_string(std::string_view name);

/// Periodic spike geometry and amplitude for SNLJ traces.
struct SpikeConfig {
    std::size_t period = 0;  // samples between onsets
    std::size_t width = 0;   // samples per spike
    Vec mean_offset;         // added to the mean on spike samples
    double cov_scale = 1.0;  // variance factor applied to noise components on spike samples
};

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::clean;
    ComponentLayout layout;
    std::size_t total_samples = 0;
    /// First sample drawn from the post-change parameters; total_samples means no change.
    std::size_t change_index = 0;
    Vec pre_mean;
    Vec post_mean;
    SymmetricMatrix pre_cov;
    SymmetricMatrix post_cov;
    SpikeConfig spikes;
    double j_over_s_db = 0.0;  // documentary
    double sample_period = 1.0;
    std::uint64_t seed = 0;

    /// Throws ConfigError whose message starts with the offending field path.
    void validate() const;
    nlohmann::json to_json() const;
    /// Accepts either a full description or {"preset": kind, ...overrides}. Validates the result.
    static ScenarioConfig from_json(const nlohmann::json& j);
};

/// Per-record seed derived from the master seed and the record id.
std::uint64_t record_seed(std::uint64_t master_seed, std::string_view record_id);

TraceRecord generate_clean(const ScenarioConfig& config, std::uint64_t seed);
/// BNLJ and RBS kinds.
TraceRecord generate_step_attack(const ScenarioConfig& config, std::uint64_t seed);
TraceRecord generate_snlj(const ScenarioConfig& config, std::uint64_t seed);
/// Dispatches on config.kind.
TraceRecord generate(const ScenarioConfig& config, std::uint64_t seed, std::string record_id = "record");

/// Onset sample indices of every SNLJ spike.
std::vector<std::size_t> spike_onsets(const ScenarioConfig& config);
/// True when sample k lies on a spike.
bool on_spike(const ScenarioConfig& config, std::size_t k) noexcept;

// Presets. Baseline statistics and attack amplitudes are synthetic constructions; record
// counts, sample counts, the 20 dB pre-attack SNR and the J/S levels follow the
// experimental protocol of the reference measurement campaign.

inline constexpr double kPresetSnrDb = 20.0;

/// Baseline (attack-free) mean and covariance for the given layout.
Vec baseline_mean(const ComponentLayout& layout);
SymmetricMatrix baseline_cov(const ComponentLayout& layout);

/// Scales the variances of the noise components by `scale`, keeping correlations.
SymmetricMatrix scale_noise_variance(const SymmetricMatrix& cov, const ComponentLayout& layout, double scale);

/// BNLJ at the given J/S: SNR drops by JNR = SNR + J/S, noise means rise by JNR.
ScenarioConfig bnlj_preset(double j_over_s_db, ComponentLayout layout = ComponentLayout({Component::snr_db,
                                                                                         Component::avg_noise_dbm}),
                           double cov_scale = 10.0);
ScenarioConfig rbs_preset(ComponentLayout layout = ComponentLayout({Component::avg_noise_dbm,
                                                                    Component::inst_noise_dbm}),
                          double cov_scale = 10.0);
ScenarioConfig snlj_preset(double j_over_s_db, ComponentLayout layout = ComponentLayout({Component::avg_noise_dbm,
                                                                                         Component::inst_noise_dbm}));
ScenarioConfig clean_preset(ComponentLayout layout = ComponentLayout({Component::snr_db, Component::avg_noise_dbm}));

ScenarioConfig preset(ScenarioKind kind, double j_over_s_db = 5.0);
/// Number of records in the reference campaign for this scenario and J/S.
std::size_t preset_record_count(ScenarioKind kind, double j_over_s_db);

}  // namespace jamdet
