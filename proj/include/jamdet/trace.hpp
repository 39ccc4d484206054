#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jamdet/measurement.hpp"

namespace jamdet {

/// A full measurement time series for one experiment run.
struct TraceRecord {
    std::string record_id;
    ComponentLayout layout;
    /// Column-major samples: sample k occupies values[k*N, (k+1)*N).
    std::vector<double> values;
    double sample_period = 1.0;  // seconds
    /// Index of the first sample drawn after the change, when known.
    std::optional<std::size_t> ground_truth_change;
    /// Generating scenario echo; null for recorded data.
    nlohmann::json scenario;

    std::size_t dim() const noexcept { return layout.size(); }
    std::size_t length() const noexcept { return layout.size() == 0 ? 0 : values.size() / layout.size(); }
    WindowView view() const { return WindowView(values, dim()); }
    MeasurementSample sample(std::size_t k) const;

    /// Throws FormatError when the record breaks its invariants.
    void validate() const;
};

}  // namespace jamdet
