#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jamdet/matrix.hpp"

namespace jamdet {

/// Role of one measurement component. Declaration order is the canonical column order.
enum class Component { snr_db, avg_noise_dbm, inst_noise_dbm };

std::string_view to_string(Component c) noexcept;
/// Throws InvalidArgumentError on an unknown name.
Component component_from_string(std::string_view name);

/// Ordered, distinct component roles shared by every sample of a record or window.
class ComponentLayout {
public:
    ComponentLayout() = default;
    /// Throws InvalidArgumentError for empty, oversized or repeated roles.
    explicit ComponentLayout(std::vector<Component> roles);

    static ComponentLayout all() {
        return ComponentLayout({Component::snr_db, Component::avg_noise_dbm, Component::inst_noise_dbm});
    }

    std::size_t size() const noexcept { return roles_.size(); }
    Component operator[](std::size_t i) const noexcept { return roles_[i]; }
    const std::vector<Component>& roles() const noexcept { return roles_; }
    /// Index of `c` within the layout, or size() if absent.
    std::size_t find(Component c) const noexcept;
    bool is_canonical() const noexcept;

    friend bool operator==(const ComponentLayout&, const ComponentLayout&) = default;

private:
    std::vector<Component> roles_;
};

/// One time instant's N-dimensional measurement vector.
struct MeasurementSample {
    Vec values;
    ComponentLayout layout;
};

/// Non-owning N x K column-major view; column k occupies data[k*N, (k+1)*N).
class WindowView {
public:
    WindowView() = default;
    WindowView(std::span<const double> data, std::size_t dim);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t length() const noexcept { return length_; }
    std::span<const double> data() const noexcept { return data_; }
    std::span<const double> column(std::size_t k) const noexcept { return data_.subspan(k * dim_, dim_); }
    double operator()(std::size_t component, std::size_t k) const noexcept { return data_[k * dim_ + component]; }
    WindowView slice(std::size_t first, std::size_t count) const;

private:
    std::span<const double> data_;
    std::size_t dim_ = 0;
    std::size_t length_ = 0;
};

/// Owning data matrix Z = [z_1, ..., z_K] for one window position.
class WindowMatrix {
public:
    WindowMatrix() = default;
    /// `column_major` holds K*N values; throws InvalidArgumentError on shape or non-finite values.
    WindowMatrix(std::vector<double> column_major, ComponentLayout layout);
    static WindowMatrix from_samples(std::span<const MeasurementSample> samples);
    /// Convenience for N = 1 windows with a single role.
    static WindowMatrix scalar(std::vector<double> values, Component role = Component::avg_noise_dbm);

    std::size_t dim() const noexcept { return layout_.size(); }
    std::size_t length() const noexcept { return layout_.size() == 0 ? 0 : data_.size() / layout_.size(); }
    const ComponentLayout& layout() const noexcept { return layout_; }
    const std::vector<double>& data() const noexcept { return data_; }
    WindowView view() const { return WindowView(data_, dim()); }
    operator WindowView() const { return view(); }  // NOLINT(google-explicit-constructor)

private:
    std::vector<double> data_;
    ComponentLayout layout_;
};

}  // namespace jamdet
