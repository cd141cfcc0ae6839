#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "lambmp/atom.hpp"
#include "lambmp/dispersion.hpp"
#include "lambmp/error.hpp"
#include "lambmp/io.hpp"
#include "lambmp/pipeline.hpp"
#include "lambmp/sacmpm.hpp"
#include "lambmp/sampm.hpp"

namespace py = pybind11;
using namespace lambmp;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Signal to_signal(const Array& a, double fs) {
    if (a.ndim() != 1) throw PreconditionError("signals must be one-dimensional arrays");
    return Signal(std::vector<double>(a.data(), a.data() + a.size()), fs);
}

Array to_array(const Signal& s) { return Array(static_cast<py::ssize_t>(s.size()), s.samples().data()); }

py::dict sampm(const Array& signal, const Array& atom, double fs, double tol_pct, int max_terms) {
    const auto d = sampm_decompose(to_signal(signal, fs), to_signal(atom, fs), SampmOptions{max_terms, tol_pct, {}});
    std::vector<double> taus, alphas;
    for (const auto& t : d.terms) {
        taus.push_back(t.tau_s);
        alphas.push_back(t.alpha);
    }
    py::dict out;
    out["tau_s"] = taus;
    out["alpha"] = alphas;
    out["error_history_pct"] = d.error_history_pct;
    out["residual"] = to_array(d.residual);
    out["reconstruction"] = to_array(d.reconstruction());
    out["stop"] = std::string(to_string(d.stop));
    return out;
}

py::dict sacmpm(const Array& signal, const Array& atom, double fs, int n_funcs, double tol_pct, int max_terms,
                double ridge_lambda) {
    const auto d = sacmpm_decompose(to_signal(signal, fs), to_signal(atom, fs),
                                    SacmpmOptions{n_funcs, max_terms, tol_pct, ridge_lambda, {}});
    std::vector<double> taus;
    Eigen::MatrixXd betas(static_cast<Eigen::Index>(d.terms.size()), n_funcs);
    py::list impulse;
    for (std::size_t i = 0; i < d.terms.size(); ++i) {
        taus.push_back(d.terms[i].tau_s);
        betas.row(static_cast<Eigen::Index>(i)) = d.terms[i].beta.transpose();
        impulse.append(to_array(d.impulse_response(i)));
    }
    py::dict out;
    out["tau_s"] = taus;
    out["beta"] = betas;
    out["impulse_responses"] = impulse;
    out["error_history_pct"] = d.error_history_pct;
    out["residual"] = to_array(d.residual);
    out["reconstruction"] = to_array(d.reconstruction());
    out["stop"] = std::string(to_string(d.stop));
    return out;
}

py::list pipeline(std::uint64_t seed, int max_epochs, std::uint64_t train_seed, const std::vector<std::string>& methods) {
    PipelineConfig config;
    config.db.seed = seed;
    config.train.max_epochs = max_epochs;
    config.train.seed = train_seed;
    config.methods.clear();
    for (const auto& m : methods) config.methods.push_back(parse_method(m));
    const PipelineResult res = run_pipeline(config);
    py::list rows;
    for (const auto& mr : res.methods) {
        py::dict r;
        r["method"] = std::string(to_string(mr.method));
        r["test_x_error_pct"] = mr.test_report.x_error_pct;
        r["test_y_error_pct"] = mr.test_report.y_error_pct;
        r["train_x_error_pct"] = mr.train_report.x_error_pct;
        r["train_y_error_pct"] = mr.train_report.y_error_pct;
        r["loss_history"] = mr.trained.loss_history;
        rows.append(r);
    }
    return rows;
}

}  // namespace

PYBIND11_MODULE(_lambmp, m) {
    m.doc() = "Single-atom matching pursuits for dispersive Lamb-wave signals";

    py::register_exception<Error>(m, "LambmpError", PyExc_ValueError);

    py::class_<PlateModel>(m, "PlateModel")
        .def(py::init([](double E, double nu, double rho, double h) { return PlateModel{E, nu, rho, h}; }),
             py::arg("E") = 70e9, py::arg("nu") = 0.3, py::arg("rho") = 1500.0, py::arg("h") = 2e-3)
        .def_readwrite("E", &PlateModel::E)
        .def_readwrite("nu", &PlateModel::nu)
        .def_readwrite("rho", &PlateModel::rho)
        .def_readwrite("h", &PlateModel::h)
        .def("s0_speed", &PlateModel::s0_speed)
        .def("__repr__", [](const PlateModel& p) {
            return "PlateModel(E=" + std::to_string(p.E) + ", nu=" + std::to_string(p.nu) +
                   ", rho=" + std::to_string(p.rho) + ", h=" + std::to_string(p.h) + ")";
        });

    m.def(
        "tone_burst",
        [](double f0, int cycles, double fs, double amp) { return to_array(make_tone_burst({f0, cycles, fs, amp})); },
        py::arg("f0") = 100e3, py::arg("cycles") = 5, py::arg("fs") = 2e6, py::arg("amplitude") = 1.0,
        "Half-sine windowed tone burst.");

    m.def(
        "wavenumbers",
        [](double f, const PlateModel& plate, const std::string& a0_form) {
            return std::pair{k_s0(f, plate), k_a0(f, plate, parse_a0_form(a0_form))};
        },
        py::arg("f_hz"), py::arg("plate") = PlateModel{}, py::arg("a0_form") = "mindlin",
        "(k_S0, k_A0) in rad/m.");

    m.def(
        "propagate",
        [](const Array& x, double fs, double d, const PlateModel& plate, const std::string& modes, std::size_t out_len,
           const std::string& a0_form) {
            return to_array(propagate(to_signal(x, fs), d, plate, ModeSet::parse(modes),
                                      PropagateOptions{out_len, parse_a0_form(a0_form)}));
        },
        py::arg("x"), py::arg("fs"), py::arg("d"), py::arg("plate") = PlateModel{}, py::arg("modes") = "s0,a0",
        py::arg("out_len") = 0, py::arg("a0_form") = "mindlin", "Propagate a signal d meters through the plate.");

    m.def("sampm", &sampm, py::arg("signal"), py::arg("atom"), py::arg("fs"), py::arg("tol_pct") = 10.0,
          py::arg("max_terms") = 50, "Single-atom matching pursuit.");
    m.def("sacmpm", &sacmpm, py::arg("signal"), py::arg("atom"), py::arg("fs"), py::arg("n_funcs") = 40,
          py::arg("tol_pct") = 10.0, py::arg("max_terms") = 50, py::arg("ridge_lambda") = 1e-10,
          "Single-atom convolutional matching pursuit.");

    m.def(
        "train",
        [](const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets, int max_epochs, double lr,
           std::uint64_t seed) {
            const TrainResult r = nn_train(features, targets, TrainConfig{max_epochs, lr, seed, 1e-10});
            return py::make_tuple(to_json(r.model).dump(), r.loss_history);
        },
        py::arg("features"), py::arg("targets"), py::arg("max_epochs") = 20000, py::arg("learning_rate") = 1e-3,
        py::arg("seed") = 1, "Train the localizer; returns (model_json, loss_history).");
    m.def(
        "predict",
        [](const std::string& model_json, const Eigen::MatrixXd& features) {
            return nn_forward(model_from_json(nlohmann::json::parse(model_json)), features);
        },
        py::arg("model_json"), py::arg("features"), "Predicted (x, y) in meters, one row per sample.");

    m.def("run_pipeline", &pipeline, py::arg("seed") = 42, py::arg("max_epochs") = 20000, py::arg("train_seed") = 1,
          py::arg("methods") = std::vector<std::string>{"sampm", "sacmpm"},
          "End-to-end localization run; one summary dict per method.");
}
