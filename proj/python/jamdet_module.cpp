#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>
#include <vector>

#include "jamdet/calibration.hpp"
#include "jamdet/detectors.hpp"
#include "jamdet/errors.hpp"
#include "jamdet/ingest.hpp"
#include "jamdet/matrix.hpp"
#include "jamdet/scenario.hpp"
#include "jamdet/stats.hpp"
#include "jamdet/trace.hpp"

namespace py = pybind11;
using namespace jamdet;

namespace {

using FArray = py::array_t<double, py::array::f_style | py::array::forcecast>;

// An (N, K) array, one column per sample; Fortran order matches the library layout.
WindowMatrix to_window(const FArray& a) {
    if (a.ndim() != 2) throw InvalidArgumentError("window must be a 2-D array of shape (N, K)");
    const auto n = static_cast<std::size_t>(a.shape(0));
    const auto k = static_cast<std::size_t>(a.shape(1));
    if (n < 1 || n > kMaxDim) throw InvalidArgumentError("window must have 1 to 3 rows");
    std::vector<double> data(a.data(), a.data() + n * k);
    std::vector<Component> roles = ComponentLayout::all().roles();
    roles.resize(n);
    return WindowMatrix(std::move(data), ComponentLayout(roles));
}

py::array_t<double> to_array(const Vec& v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out.mutable_at(i) = v[i];
    return out;
}

py::array_t<double> to_array(const SymmetricMatrix& m) {
    const auto n = static_cast<py::ssize_t>(m.dim());
    py::array_t<double> out({n, n});
    for (std::size_t i = 0; i < m.dim(); ++i) {
        for (std::size_t j = 0; j < m.dim(); ++j) out.mutable_at(i, j) = m(i, j);
    }
    return out;
}

SymmetricMatrix to_matrix(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw InvalidArgumentError("matrix must be square");
    return SymmetricMatrix::from_dense({a.data(), static_cast<std::size_t>(a.size())},
                                       static_cast<std::size_t>(a.shape(0)));
}

Vec to_vec(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    return Vec::from({a.data(), static_cast<std::size_t>(a.size())});
}

SplitGrid grid_for(const WindowMatrix& w, std::optional<std::size_t> stride) {
    return SplitGrid::full(w.dim(), w.length(), stride.value_or(SplitGrid::default_stride(w.length())));
}

py::array_t<double> record_values(const TraceRecord& r) {
    // (N, K) view of the column-major samples.
    const auto n = static_cast<py::ssize_t>(r.dim());
    const auto k = static_cast<py::ssize_t>(r.length());
    py::array_t<double, py::array::f_style> out({n, k});
    std::copy(r.values.begin(), r.values.end(), out.mutable_data());
    return out;
}

std::vector<std::string> layout_names(const ComponentLayout& layout) {
    std::vector<std::string> names;
    for (Component c : layout.roles()) names.emplace_back(to_string(c));
    return names;
}

}  // namespace

PYBIND11_MODULE(_jamdet, m) {
    m.doc() = "GLRT change detectors for jamming and rogue base station attacks";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<InvalidArgumentError>(m, "InvalidArgumentError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<SingularMatrixError>(m, "SingularMatrixError", base.ptr());
    py::register_exception<DegenerateWindowError>(m, "DegenerateWindowError", base.ptr());
    py::register_exception<InsufficientDataError>(m, "InsufficientDataError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<FormatError>(m, "FormatError", base.ptr());

    py::class_<Detector>(m, "Detector")
        .def(py::init([](const std::string& kind, const std::string& variant) { return Detector::parse(kind, variant); }),
             py::arg("kind") = "mncd", py::arg("variant") = "as-written")
        .def_property_readonly("name", [](const Detector& d) { return std::string(d.name()); })
        .def_property_readonly("variant", [](const Detector& d) { return std::string(d.variant_name()); })
        .def("__eq__", [](const Detector& a, const Detector& b) { return a == b; })
        .def("__repr__", [](const Detector& d) {
            return "Detector('" + std::string(d.name()) + "', '" + std::string(d.variant_name()) + "')";
        });

    py::class_<DetectionReport>(m, "DetectionReport")
        .def_property_readonly("detector", [](const DetectionReport& r) { return r.detector; })
        .def_readonly("statistic", &DetectionReport::statistic)
        .def_readonly("argmax_split", &DetectionReport::argmax_split)
        .def_readonly("argmax_split_null", &DetectionReport::argmax_split_null)
        .def_readonly("threshold", &DetectionReport::threshold)
        .def_readonly("detected", &DetectionReport::detected)
        .def_readonly("valid_split_count", &DetectionReport::valid_split_count);

    m.def(
        "scatter",
        [](const FArray& window, std::size_t split) {
            const WindowMatrix w = to_window(window);
            const ScatterStats s = scatter(w, split);
            py::dict d;
            d["split"] = s.split;
            d["mean_1"] = to_array(s.mean_1);
            d["mean_2"] = to_array(s.mean_2);
            d["mean_all"] = to_array(s.mean_all);
            d["scatter_1"] = to_array(s.scatter_1);
            d["scatter_2"] = to_array(s.scatter_2);
            d["scatter_all"] = to_array(s.scatter_all);
            d["valid"] = s.valid;
            return d;
        },
        py::arg("window"), py::arg("split"), "Segment means and scatter matrices of an (N, K) window at split K1.");

    m.def(
        "logdet_pd", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
            return logdet_pd(to_matrix(a));
        },
        py::arg("matrix"), "log det of a symmetric positive-definite matrix.");

    m.def(
        "gaussian_loglike",
        [](const FArray& samples, const py::array_t<double, py::array::c_style | py::array::forcecast>& mean,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& cov) {
            return gaussian_loglike(to_window(samples), to_vec(mean), to_matrix(cov));
        },
        py::arg("samples"), py::arg("mean"), py::arg("cov"));

    m.def(
        "ncd_statistic",
        [](const FArray& window, std::optional<std::size_t> grid_stride, const std::string& variant) {
            const WindowMatrix w = to_window(window);
            return ncd_statistic(w, grid_for(w, grid_stride), ncd_variant_from_string(variant));
        },
        py::arg("window"), py::arg("grid_stride") = py::none(), py::arg("variant") = "as-written");
    m.def(
        "mncd_statistic",
        [](const FArray& window, std::optional<std::size_t> grid_stride) {
            const WindowMatrix w = to_window(window);
            return mncd_statistic(w, grid_for(w, grid_stride));
        },
        py::arg("window"), py::arg("grid_stride") = py::none());
    m.def(
        "spd_statistic",
        [](const FArray& window, std::optional<std::size_t> grid_stride) {
            const WindowMatrix w = to_window(window);
            return spd_statistic(w, grid_for(w, grid_stride));
        },
        py::arg("window"), py::arg("grid_stride") = py::none());
    m.def(
        "evaluate",
        [](const Detector& detector, const FArray& window, std::optional<std::size_t> grid_stride) {
            const WindowMatrix w = to_window(window);
            return evaluate(detector, w, grid_for(w, grid_stride));
        },
        py::arg("detector"), py::arg("window"), py::arg("grid_stride") = py::none());

    m.def("apply_threshold", &apply_threshold, py::arg("report"), py::arg("threshold"));

    m.def(
        "integrate_m_of_n",
        [](const std::vector<std::uint8_t>& detected, std::size_t m_, std::size_t n_) {
            std::vector<std::int64_t> positions(detected.size());
            for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = static_cast<std::int64_t>(i);
            const auto out = integrate_m_of_n(BinaryDetectionTrace(positions, detected), m_, n_);
            return py::array_t<std::uint8_t>(static_cast<py::ssize_t>(out.size()), out.detected().data());
        },
        py::arg("detected"), py::arg("m"), py::arg("n"), "M-of-N integration of a 0/1 decision sequence.");

    py::class_<ThresholdEstimate>(m, "ThresholdEstimate")
        .def_readonly("threshold", &ThresholdEstimate::threshold)
        .def_readonly("target_pfa", &ThresholdEstimate::target_pfa)
        .def_readonly("empirical_pfa", &ThresholdEstimate::empirical_pfa)
        .def_readonly("num_windows_used", &ThresholdEstimate::num_windows_used)
        .def_readonly("skipped_windows", &ThresholdEstimate::skipped_windows);

    m.def(
        "threshold_from_statistics",
        [](std::vector<double> statistics, double pfa) { return threshold_from_statistics(std::move(statistics), pfa); },
        py::arg("statistics"), py::arg("target_pfa") = 1e-2);

    m.def(
        "estimate_threshold",
        [](const Detector& detector, const std::vector<FArray>& windows, double pfa,
           std::optional<std::size_t> grid_stride) {
            std::vector<WindowMatrix> ws;
            for (const auto& w : windows) ws.push_back(to_window(w));
            if (ws.empty()) throw InsufficientDataError("no windows given");
            const SplitGrid grid = grid_for(ws.front(), grid_stride);
            py::gil_scoped_release release;
            return estimate_threshold(detector, grid, ws, pfa);
        },
        py::arg("detector"), py::arg("windows"), py::arg("target_pfa") = 1e-2, py::arg("grid_stride") = py::none());

    py::class_<TraceRecord>(m, "TraceRecord")
        .def_readonly("record_id", &TraceRecord::record_id)
        .def_readonly("sample_period", &TraceRecord::sample_period)
        .def_readonly("ground_truth_change", &TraceRecord::ground_truth_change)
        .def_property_readonly("values", &record_values)
        .def_property_readonly("layout", [](const TraceRecord& r) { return layout_names(r.layout); })
        .def_property_readonly("scenario_json", [](const TraceRecord& r) { return r.scenario.dump(); })
        .def("__len__", &TraceRecord::length);

    m.def(
        "generate",
        [](const std::string& config_json, std::uint64_t seed, const std::string& record_id) {
            const ScenarioConfig config = ScenarioConfig::from_json(nlohmann::json::parse(config_json));
            return generate(config, seed, record_id);
        },
        py::arg("config_json"), py::arg("seed"), py::arg("record_id") = "record");
    m.def(
        "record_seed", [](std::uint64_t master, const std::string& id) { return record_seed(master, id); },
        py::arg("master_seed"), py::arg("record_id"));

    m.def("load_trace", &load_trace, py::arg("path"));
    m.def(
        "save_trace", [](const TraceRecord& r, const std::filesystem::path& p) { save_trace(r, p); },
        py::arg("record"), py::arg("path"));
    m.def("decimate", &decimate, py::arg("record"), py::arg("factor"));
}
