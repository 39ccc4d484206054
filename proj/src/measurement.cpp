#include "jamdet/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jamdet/errors.hpp"

namespace jamdet {

std::string_view to_string(Component c) noexcept {
    switch (c) {
        case Component::snr_db: return "snr_db";
        case Component::avg_noise_dbm: return "avg_noise_dbm";
        case Component::inst_noise_dbm: return "inst_noise_dbm";
    }
    return "unknown";
}

Component component_from_string(std::string_view name) {
    if (name == "snr_db") return Component::snr_db;
    if (name == "avg_noise_dbm") return Component::avg_noise_dbm;
    if (name == "inst_noise_dbm") return Component::inst_noise_dbm;
    throw InvalidArgumentError("unknown measurement component '" + std::string(name) + "'");
}

ComponentLayout::ComponentLayout(std::vector<Component> roles) : roles_(std::move(roles)) {
    if (roles_.empty() || roles_.size() > kMaxDim) {
        throw InvalidArgumentError("a measurement layout needs 1 to 3 components");
    }
    for (std::size_t i = 0; i < roles_.size(); ++i) {
        for (std::size_t j = i + 1; j < roles_.size(); ++j) {
            if (roles_[i] == roles_[j]) {
                throw InvalidArgumentError("component '" + std::string(to_string(roles_[i])) + "' repeated");
            }
        }
    }
}

std::size_t ComponentLayout::find(Component c) const noexcept {
    return static_cast<std::size_t>(std::find(roles_.begin(), roles_.end(), c) - roles_.begin());
}

bool ComponentLayout::is_canonical() const noexcept { return std::is_sorted(roles_.begin(), roles_.end()); }

WindowView::WindowView(std::span<const double> data, std::size_t dim) : data_(data), dim_(dim) {
    if (dim == 0 || data.size() % dim != 0) throw InvalidArgumentError("window data is not a whole number of columns");
    length_ = data.size() / dim;
}

WindowView WindowView::slice(std::size_t first, std::size_t count) const {
    if (first + count > length_) throw InvalidArgumentError("window slice out of range");
    return WindowView(data_.subspan(first * dim_, count * dim_), dim_);
}

WindowMatrix::WindowMatrix(std::vector<double> column_major, ComponentLayout layout)
    : data_(std::move(column_major)), layout_(std::move(layout)) {
    if (layout_.size() == 0) throw InvalidArgumentError("window needs a component layout");
    if (data_.empty() || data_.size() % layout_.size() != 0) {
        throw InvalidArgumentError("window data must hold a positive whole number of columns");
    }
    if (!std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); })) {
        throw InvalidArgumentError("window contains non-finite values");
    }
}

WindowMatrix WindowMatrix::from_samples(std::span<const MeasurementSample> samples) {
    if (samples.empty()) throw InvalidArgumentError("window needs at least one sample");
    const ComponentLayout& layout = samples.front().layout;
    std::vector<double> data;
    data.reserve(samples.size() * layout.size());
    for (const auto& s : samples) {
        if (!(s.layout == layout) || s.values.size() != layout.size()) {
            throw InvalidArgumentError("window samples must share one component layout");
        }
        data.insert(data.end(), s.values.values().begin(), s.values.values().end());
    }
    return WindowMatrix(std::move(data), layout);
}

WindowMatrix WindowMatrix::scalar(std::vector<double> values, Component role) {
    return WindowMatrix(std::move(values), ComponentLayout({role}));
}

}  // namespace jamdet
