// pybind11 surface over the core library: data sampling, the CNN forward
// pass, losses/gradients, optimizer steps, metrics and the experiment
// harness. Tensors cross the boundary as (2, m, d) numpy arrays.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "afl/harness.hpp"

namespace py = pybind11;
using namespace afl;

namespace {

py::array_t<double> weights_to_array(const Weights& W) {
    py::array_t<double> arr({2, W.m, W.d});
    std::memcpy(arr.mutable_data(), W.w.data(), W.size() * sizeof(double));
    return arr;
}

Weights array_to_weights(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr,
                         int q) {
    if (arr.ndim() != 3 || arr.shape(0) != 2) {
        throw ShapeError("expected a (2, m, d) array");
    }
    Weights W(static_cast<int>(arr.shape(1)), static_cast<int>(arr.shape(2)), q);
    std::memcpy(W.w.data(), arr.data(), W.size() * sizeof(double));
    return W;
}

py::dict record_to_dict(const MetricsRecord& r) {
    py::dict d;
    d["epoch"] = r.epoch;
    d["train_err"] = r.train_err;
    d["test_err"] = r.test_err;
    d["test_err_halfwidth"] = r.test_err_halfwidth;
    d["mean_loss"] = r.mean_loss;
    d["feat_pos"] = r.feat_pos;
    d["feat_neg"] = r.feat_neg;
    d["noise_min_pos"] = r.noise_min_pos;
    d["noise_min_neg"] = r.noise_min_neg;
    d["noise_max_pos"] = r.noise_max_pos;
    d["noise_max_neg"] = r.noise_max_neg;
    d["moment_ratio"] = r.moment_ratio;
    d["sign_agree"] = r.sign_agree;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "two-layer CNN feature-learning experiments (C++ core)";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<ShapeError>(m, "ShapeError");
    py::register_exception<IoError>(m, "IoError");

    py::class_<DataConfig>(m, "DataConfig")
        .def(py::init<>())
        .def_readwrite("d", &DataConfig::d)
        .def_readwrite("n", &DataConfig::n)
        .def_readwrite("s", &DataConfig::s)
        .def_readwrite("sigma_p", &DataConfig::sigma_p)
        .def_readwrite("alpha", &DataConfig::alpha)
        .def_readwrite("seed", &DataConfig::seed)
        .def_readwrite("balanced", &DataConfig::balanced);

    py::class_<ModelConfig>(m, "ModelConfig")
        .def(py::init<>())
        .def_readwrite("m", &ModelConfig::m)
        .def_readwrite("q", &ModelConfig::q)
        .def_readwrite("sigma_0", &ModelConfig::sigma_0)
        .def_readwrite("d", &ModelConfig::d)
        .def_readwrite("seed", &ModelConfig::seed);

    py::enum_<OptKind>(m, "OptKind")
        .value("adam", OptKind::adam)
        .value("adamw", OptKind::adamw)
        .value("signsgd", OptKind::signsgd)
        .value("signsgdw", OptKind::signsgdw);

    py::class_<OptimizerConfig>(m, "OptimizerConfig")
        .def(py::init<>())
        .def_readwrite("kind", &OptimizerConfig::kind)
        .def_readwrite("eta", &OptimizerConfig::eta)
        .def_readwrite("lambda_", &OptimizerConfig::lambda)
        .def_readwrite("beta1", &OptimizerConfig::beta1)
        .def_readwrite("beta2", &OptimizerConfig::beta2)
        .def_readwrite("epsilon", &OptimizerConfig::epsilon)
        .def_readwrite("bias_correction", &OptimizerConfig::bias_correction)
        .def_readwrite("delayed_update", &OptimizerConfig::delayed_update);

    py::class_<DataPoint>(m, "DataPoint")
        .def_readonly("label", &DataPoint::label)
        .def_readonly("signal_index", &DataPoint::signal_index)
        .def_readonly("feature_noise", &DataPoint::feature_noise)
        .def_readonly("support", &DataPoint::support)
        .def_readonly("noise", &DataPoint::noise)
        .def("dense_patch", &DataPoint::dense_patch);

    py::class_<Dataset>(m, "Dataset")
        .def_readonly("points", &Dataset::points)
        .def_readonly("config", &Dataset::config)
        .def("__len__", &Dataset::size)
        .def("labels", [](const Dataset& ds) {
            std::vector<int> out;
            for (const auto& p : ds.points) out.push_back(p.label);
            return out;
        });

    py::class_<OverlapReport>(m, "OverlapReport")
        .def_readonly("all_disjoint", &OverlapReport::all_disjoint)
        .def_readonly("collisions", &OverlapReport::collisions);

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("data", &ExperimentConfig::data)
        .def_readwrite("model", &ExperimentConfig::model)
        .def_readwrite("optimizer", &ExperimentConfig::optimizer)
        .def_readwrite("batch_size", &ExperimentConfig::batch_size)
        .def_readwrite("epochs", &ExperimentConfig::epochs)
        .def_readwrite("test_size", &ExperimentConfig::test_size)
        .def_readwrite("metric_period", &ExperimentConfig::metric_period)
        .def_readwrite("shuffle_seed", &ExperimentConfig::shuffle_seed)
        .def_readwrite("output_path", &ExperimentConfig::output_path);

    py::class_<RunResult>(m, "RunResult")
        .def_readonly("final_train_err", &RunResult::final_train_err)
        .def_readonly("final_test_err", &RunResult::final_test_err)
        .def_readonly("init_feat_pos", &RunResult::init_feat_pos)
        .def_readonly("init_feat_neg", &RunResult::init_feat_neg)
        .def_readonly("first_zero_train_epoch", &RunResult::first_zero_train_epoch)
        .def_readonly("max_moment_ratio", &RunResult::max_moment_ratio)
        .def_readonly("wall_time_sec", &RunResult::wall_time_sec)
        .def("records", [](const RunResult& r) {
            py::list out;
            for (const auto& rec : r.records) out.append(record_to_dict(rec));
            return out;
        });

    py::class_<PresetReport>(m, "PresetReport")
        .def_readonly("name", &PresetReport::name)
        .def_readonly("run", &PresetReport::run)
        .def_readonly("pass_", &PresetReport::pass)
        .def_readonly("all_pass", &PresetReport::all_pass);

    m.def("sample_dataset", [](const DataConfig& cfg) { return sample_dataset(cfg); },
          "sample a dataset from cfg.seed");
    m.def("check_non_overlap", &check_non_overlap);
    m.def("write_dataset",
          [](const std::string& path, const Dataset& ds) { write_dataset(path, ds); });
    m.def("read_dataset", &read_dataset);

    m.def("init_weights", [](const ModelConfig& cfg) { return weights_to_array(init_weights(cfg)); });
    m.def("activation", &activation, py::arg("x"), py::arg("q"));
    m.def("activation_prime", &activation_prime, py::arg("x"), py::arg("q"));
    m.def("forward_logit",
          [](const py::array_t<double>& W, int q, const DataPoint& x, int j) {
              return forward_logit(array_to_weights(W, q), x, j);
          },
          py::arg("weights"), py::arg("q"), py::arg("point"), py::arg("j"));
    m.def("per_sample_loss",
          [](const py::array_t<double>& W, int q, const DataPoint& x, int y) {
              return per_sample_loss(array_to_weights(W, q), x, y);
          });
    m.def("logit_weight",
          [](const py::array_t<double>& W, int q, const DataPoint& x, int y, int j) {
              return logit_weight(array_to_weights(W, q), x, y, j);
          });
    m.def("grad_per_sample",
          [](const py::array_t<double>& W, int q, const DataPoint& x, int y) {
              return weights_to_array(grad_per_sample(array_to_weights(W, q), x, y));
          });

    m.def("training_error", [](const py::array_t<double>& W, int q, const Dataset& ds) {
        return training_error(array_to_weights(W, q), ds);
    });
    m.def("feature_learning", [](const py::array_t<double>& W, int q, int j) {
        return feature_learning(array_to_weights(W, q), j);
    });
    m.def("noise_memorization",
          [](const py::array_t<double>& W, int q, const Dataset& ds, int j, const std::string& agg) {
              return noise_memorization(array_to_weights(W, q), ds, j,
                                        agg == "min" ? Agg::min : Agg::max);
          });

    m.def("train", &train, py::call_guard<py::gil_scoped_release>());
    m.def("preset_names", &preset_names);
    m.def("preset_config", &preset_config);
    m.def("reproduce", &reproduce, py::arg("preset_name"), py::arg("out_dir") = "",
          py::arg("seed_base") = 0, py::arg("test_size_override") = 0,
          py::arg("metric_period_override") = 0, py::call_guard<py::gil_scoped_release>());
    m.def("parse_config_file", &parse_config_file);
    m.def("verify", []() {
        std::ostringstream log;
        const bool ok = verify(log);
        return py::make_tuple(ok, log.str());
    });
}
