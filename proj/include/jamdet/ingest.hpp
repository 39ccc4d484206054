#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <utility>
#include <vector>

#include "jamdet/measurement.hpp"
#include "jamdet/trace.hpp"

namespace jamdet {

/// `<dir>/<stem>.meta.json` for `<dir>/<stem>.csv`.
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

/// Reads a trace CSV (plus its sidecar when present). Columns are reordered to the
/// canonical snr_db, avg_noise_dbm, inst_noise_dbm order.
TraceRecord load_trace(const std::filesystem::path& csv);
TraceRecord parse_trace(std::istream& csv, std::string record_id);

/// Writes the CSV and its JSON sidecar. Values use the shortest decimal form that
/// re-parses to the identical double. `extra_meta` keys are merged into the sidecar.
void save_trace(const TraceRecord& record, const std::filesystem::path& csv,
                const nlohmann::json& extra_meta = nlohmann::json::object());
void write_trace_csv(const TraceRecord& record, std::ostream& out);

/// Keeps samples 0, factor, 2 factor, ...; ground truth becomes ceil(gt / factor).
TraceRecord decimate(const TraceRecord& record, std::size_t factor);

struct WindowingPlan {
    std::size_t window_length = 0;
    std::size_t stride = 1;
    std::size_t decimation = 1;

    /// max(1, floor(K / 50)).
    static std::size_t default_stride(std::size_t window_length) noexcept;
};

/// Window start positions p = 0, stride, 2 stride, ... with p + K <= length, plus length - K
/// when the stride skips past it.
std::vector<std::size_t> window_positions(std::size_t length, std::size_t window_length, std::size_t stride);

/// Sliding windows over a decimated record. Restartable: windows are computed on access.
class WindowSequence {
public:
    /// Throws InsufficientDataError when the decimated record is shorter than K.
    WindowSequence(const TraceRecord& record, WindowingPlan plan);

    const TraceRecord& record() const noexcept { return record_; }
    const WindowingPlan& plan() const noexcept { return plan_; }
    std::size_t size() const noexcept { return positions_.size(); }
    const std::vector<std::size_t>& positions() const noexcept { return positions_; }
    std::size_t position(std::size_t i) const noexcept { return positions_[i]; }
    WindowView window(std::size_t i) const;

    class iterator {
    public:
        using value_type = std::pair<std::size_t, WindowView>;
        using difference_type = std::ptrdiff_t;

        iterator(const WindowSequence* seq, std::size_t i) : seq_(seq), i_(i) {}
        value_type operator*() const { return {seq_->position(i_), seq_->window(i_)}; }
        iterator& operator++() {
            ++i_;
            return *this;
        }
        friend bool operator==(const iterator&, const iterator&) = default;

    private:
        const WindowSequence* seq_;
        std::size_t i_;
    };

    iterator begin() const { return {this, 0}; }
    iterator end() const { return {this, positions_.size()}; }

private:
    TraceRecord record_;  // decimated copy
    WindowingPlan plan_;
    std::vector<std::size_t> positions_;
};

}  // namespace jamdet
