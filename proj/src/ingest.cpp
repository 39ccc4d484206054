#include "jamdet/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "jamdet/errors.hpp"

namespace jamdet {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_value(std::string_view field, std::size_t line, std::string_view column) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
        throw ParseError(line, "column '" + std::string(column) + "': '" + std::string(field) + "' is not a number");
    }
    if (!std::isfinite(v)) {
        throw ParseError(line, "column '" + std::string(column) + "': non-finite value '" + std::string(field) + "'");
    }
    return v;
}

void append_number(std::string& out, double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

std::vector<std::string> role_names(const ComponentLayout& layout) {
    std::vector<std::string> names;
    for (Component c : layout.roles()) names.emplace_back(to_string(c));
    return names;
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
    std::filesystem::path p = csv;
    p.replace_extension(".meta.json");
    return p;
}

TraceRecord parse_trace(std::istream& in, std::string record_id) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw FormatError("trace '" + record_id + "' is empty");
    ++line_no;

    const auto header = split_fields(line);
    if (header.empty() || header[0] != "sample_index") {
        throw ParseError(line_no, "header must start with 'sample_index'");
    }
    std::vector<Component> file_roles;
    for (std::size_t i = 1; i < header.size(); ++i) {
        try {
            file_roles.push_back(component_from_string(header[i]));
        } catch (const InvalidArgumentError& e) {
            throw ParseError(line_no, e.what());
        }
    }
    ComponentLayout file_layout;
    try {
        file_layout = ComponentLayout(file_roles);
    } catch (const InvalidArgumentError& e) {
        throw ParseError(line_no, e.what());
    }

    // Canonical order restricted to the present columns.
    std::vector<Component> canonical = file_roles;
    std::sort(canonical.begin(), canonical.end());
    const ComponentLayout layout(canonical);
    std::vector<std::size_t> source_column(canonical.size());
    for (std::size_t i = 0; i < canonical.size(); ++i) source_column[i] = file_layout.find(canonical[i]);

    TraceRecord r;
    r.record_id = std::move(record_id);
    r.layout = layout;
    const std::size_t n = layout.size();
    std::int64_t previous_index = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != header.size()) {
            throw ParseError(line_no, "expected " + std::to_string(header.size()) + " fields, found " +
                                          std::to_string(fields.size()));
        }
        std::int64_t index = 0;
        const auto [ptr, ec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), index);
        if (ec != std::errc() || ptr != fields[0].data() + fields[0].size() || fields[0].empty()) {
            throw ParseError(line_no, "sample_index '" + std::string(fields[0]) + "' is not an integer");
        }
        if (previous_index < 0 && index != 0) throw FormatError("trace '" + r.record_id + "': sample_index must start at 0");
        if (index <= previous_index) {
            throw FormatError("trace '" + r.record_id + "', line " + std::to_string(line_no) +
                              ": sample_index is not strictly increasing");
        }
        previous_index = index;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t col = source_column[i] + 1;
            r.values.push_back(parse_value(fields[col], line_no, header[col]));
        }
    }
    if (r.values.empty()) throw FormatError("trace '" + r.record_id + "' has no samples");
    return r;
}

TraceRecord load_trace(const std::filesystem::path& csv) {
    std::ifstream in(csv);
    if (!in) throw FormatError("cannot open trace file '" + csv.string() + "'");
    TraceRecord r = parse_trace(in, csv.stem().string());

    const auto meta_path = sidecar_path(csv);
    if (std::filesystem::exists(meta_path)) {
        std::ifstream meta_in(meta_path);
        nlohmann::json meta;
        try {
            meta = nlohmann::json::parse(meta_in);
            r.record_id = meta.value("record_id", r.record_id);
            r.sample_period = meta.value("sample_period", 1.0);
            if (meta.contains("ground_truth_change") && !meta["ground_truth_change"].is_null()) {
                r.ground_truth_change = meta["ground_truth_change"].get<std::size_t>();
            }
            if (meta.contains("scenario")) r.scenario = meta["scenario"];
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("sidecar '" + meta_path.string() + "': " + e.what());
        }
        if (meta.contains("columns")) {
            std::vector<std::string> declared;
            try {
                declared = meta["columns"].get<std::vector<std::string>>();
            } catch (const nlohmann::json::exception& e) {
                throw FormatError("sidecar '" + meta_path.string() + "': " + e.what());
            }
            std::ifstream again(csv);
            std::string header;
            std::getline(again, header);
            std::vector<std::string> actual;
            const auto fields = split_fields(header);
            for (std::size_t i = 1; i < fields.size(); ++i) actual.emplace_back(fields[i]);
            if (declared != actual) {
                throw FormatError("sidecar '" + meta_path.string() + "' declares columns that differ from the CSV header");
            }
        }
    }
    r.validate();
    return r;
}

void write_trace_csv(const TraceRecord& record, std::ostream& out) {
    std::string buf = "sample_index";
    for (Component c : record.layout.roles()) {
        buf += ',';
        buf += to_string(c);
    }
    buf += '\n';
    const std::size_t n = record.dim();
    for (std::size_t k = 0; k < record.length(); ++k) {
        buf += std::to_string(k);
        for (std::size_t i = 0; i < n; ++i) {
            buf += ',';
            append_number(buf, record.values[k * n + i]);
        }
        buf += '\n';
        if (buf.size() > (1u << 16)) {
            out << buf;
            buf.clear();
        }
    }
    out << buf;
}

void save_trace(const TraceRecord& record, const std::filesystem::path& csv, const nlohmann::json& extra_meta) {
    record.validate();
    {
        std::ofstream out(csv, std::ios::binary);
        if (!out) throw FormatError("cannot write trace file '" + csv.string() + "'");
        write_trace_csv(record, out);
    }
    nlohmann::json meta;
    meta["record_id"] = record.record_id;
    meta["sample_period"] = record.sample_period;
    meta["ground_truth_change"] = record.ground_truth_change ? nlohmann::json(*record.ground_truth_change)
                                                             : nlohmann::json(nullptr);
    meta["columns"] = role_names(record.layout);
    if (!record.scenario.is_null()) meta["scenario"] = record.scenario;
    for (const auto& [key, value] : extra_meta.items()) meta[key] = value;
    std::ofstream out(sidecar_path(csv), std::ios::binary);
    if (!out) throw FormatError("cannot write sidecar for '" + csv.string() + "'");
    out << meta.dump(2) << '\n';
}

TraceRecord decimate(const TraceRecord& record, std::size_t factor) {
    if (factor < 1) throw InvalidArgumentError("decimation factor must be at least 1");
    if (factor == 1) return record;
    TraceRecord out = record;
    const std::size_t n = record.dim();
    out.values.clear();
    out.values.reserve((record.length() + factor - 1) / factor * n);
    for (std::size_t k = 0; k < record.length(); k += factor) {
        out.values.insert(out.values.end(), record.values.begin() + static_cast<std::ptrdiff_t>(k * n),
                          record.values.begin() + static_cast<std::ptrdiff_t>((k + 1) * n));
    }
    if (record.ground_truth_change) out.ground_truth_change = (*record.ground_truth_change + factor - 1) / factor;
    out.sample_period = record.sample_period * static_cast<double>(factor);
    return out;
}

std::size_t WindowingPlan::default_stride(std::size_t window_length) noexcept {
    return std::max<std::size_t>(1, window_length / 50);
}

std::vector<std::size_t> window_positions(std::size_t length, std::size_t window_length, std::size_t stride) {
    if (stride == 0) throw InvalidArgumentError("window stride must be positive");
    if (window_length == 0) throw InvalidArgumentError("window length must be positive");
    if (length < window_length) {
        throw InsufficientDataError("record of " + std::to_string(length) + " samples is shorter than the window (" +
                                    std::to_string(window_length) + ")");
    }
    std::vector<std::size_t> out;
    for (std::size_t p = 0; p + window_length <= length; p += stride) out.push_back(p);
    // The last window ends flush with the record even when the stride overshoots it.
    if (out.back() != length - window_length) out.push_back(length - window_length);
    return out;
}

WindowSequence::WindowSequence(const TraceRecord& record, WindowingPlan plan)
    : record_(decimate(record, plan.decimation)), plan_(plan) {
    if (plan_.window_length < 2 * (record_.dim() + 1)) {
        throw InvalidArgumentError("window length " + std::to_string(plan_.window_length) + " is below 2(N+1) = " +
                                   std::to_string(2 * (record_.dim() + 1)));
    }
    positions_ = window_positions(record_.length(), plan_.window_length, plan_.stride);
}

WindowView WindowSequence::window(std::size_t i) const {
    return record_.view().slice(positions_[i], plan_.window_length);
}

}  // namespace jamdet
