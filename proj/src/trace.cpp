#include "jamdet/trace.hpp"

#include <algorithm>
#include <cmath>

#include "jamdet/errors.hpp"

namespace jamdet {

MeasurementSample TraceRecord::sample(std::size_t k) const {
    if (k >= length()) throw InvalidArgumentError("sample index out of range");
    return MeasurementSample{Vec::from(view().column(k)), layout};
}

void TraceRecord::validate() const {
    if (layout.size() == 0) throw FormatError("record '" + record_id + "' has no component layout");
    if (values.empty() || values.size() % layout.size() != 0) {
        throw FormatError("record '" + record_id + "' must hold a positive whole number of samples");
    }
    if (!std::all_of(values.begin(), values.end(), [](double x) { return std::isfinite(x); })) {
        throw FormatError("record '" + record_id + "' contains non-finite values");
    }
    if (ground_truth_change && *ground_truth_change > length()) {
        throw FormatError("record '" + record_id + "' ground truth lies beyond its last sample");
    }
    if (!(sample_period > 0.0)) throw FormatError("record '" + record_id + "' sample period must be positive");
}

}  // namespace jamdet
