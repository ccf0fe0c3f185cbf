#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "foca/commands.hpp"
#include "foca/diagnostics.hpp"
#include "foca/predictors.hpp"

namespace py = pybind11;
using namespace foca;

namespace {

std::vector<double> to_plain(const FeatureVector& f) { return f.values(); }

std::vector<std::vector<double>> to_plain_list(const std::vector<FeatureVector>& fs) {
    std::vector<std::vector<double>> out;
    out.reserve(fs.size());
    for (const auto& f : fs)
        out.push_back(f.values());
    return out;
}

std::vector<FeatureVector> from_plain_list(const std::vector<std::vector<double>>& vs) {
    std::vector<FeatureVector> out;
    out.reserve(vs.size());
    for (const auto& v : vs)
        out.emplace_back(v);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Feature-ODE caching schemes (reuse, Taylor, BDF2, forecast-then-calibrate) with diagnostics";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<RangeError>(m, "RangeError", PyExc_IndexError);
    py::register_exception<HistoryError>(m, "HistoryError", PyExc_RuntimeError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<BoundaryError>(m, "BoundaryError", PyExc_IndexError);

    py::enum_<PredictorKind>(m, "PredictorKind")
        .value("REUSE", PredictorKind::Reuse)
        .value("TAYLOR", PredictorKind::Taylor)
        .value("BDF2", PredictorKind::Bdf2Only)
        .value("FOCA", PredictorKind::FoCa);

    py::class_<CacheSchedule>(m, "CacheSchedule")
        .def(py::init([](int interval, int total_steps, int warmup_steps) {
                 CacheSchedule s{interval, total_steps, warmup_steps};
                 s.validate();
                 return s;
             }),
             py::arg("interval"), py::arg("total_steps"), py::arg("warmup_steps") = 2)
        .def_readonly("interval", &CacheSchedule::interval)
        .def_readonly("total_steps", &CacheSchedule::total_steps)
        .def_readonly("warmup_steps", &CacheSchedule::warmup_steps)
        .def("is_full_step", [](const CacheSchedule& s, int step) { return schedule_is_full_step(s, step); })
        .def("evaluation_count", [](const CacheSchedule& s) { return evaluation_count(s); })
        .def("acceleration_ratio", [](const CacheSchedule& s) { return acceleration_ratio(s); });

    py::class_<CacheState>(m, "CacheState")
        .def(py::init<double, int>(), py::arg("h") = 1.0, py::arg("taylor_capacity") = 3)
        .def("observe_full",
             [](CacheState& c, int step, const std::vector<double>& v) { c.observe_full(step, FeatureVector(v)); })
        .def("observe_predicted", [](CacheState& c, int step, const std::vector<double>& v) {
            c.observe_predicted(step, FeatureVector(v));
        });

    m.def("predict_reuse", [](const CacheState& c) { return to_plain(predict_reuse(c)); });
    m.def(
        "predict_taylor",
        [](CacheState& c, int k, int interval, int m_) { return to_plain(predict_taylor(c, k, interval, m_)); },
        py::arg("cache"), py::arg("k"), py::arg("interval"), py::arg("m") = 2);
    m.def("estimate_derivative",
          [](const CacheState& c, double h) { return to_plain(estimate_derivative(c, h)); });
    m.def("predict_bdf2", [](CacheState& c, double h) { return to_plain(predict_bdf2(c, h)); });
    m.def(
        "foca_step", [](CacheState& c, double h, int interval) { return to_plain(foca_step(c, h, interval)); },
        py::arg("cache"), py::arg("h"), py::arg("interval"));
    m.def("finite_differences", [](const std::vector<std::vector<double>>& history, int m_) {
        return to_plain_list(finite_differences(from_plain_list(history), m_));
    });

    m.def("relative_error", [](const std::vector<double>& p, const std::vector<double>& t) {
        return relative_error(FeatureVector(p), FeatureVector(t));
    });
    m.def(
        "local_truncation_error",
        [](const std::vector<std::vector<double>>& traj, double h, int at) {
            return local_truncation_error(from_plain_list(traj), h, at);
        },
        py::arg("trajectory"), py::arg("h"), py::arg("at"));
    m.def(
        "stiffness_index",
        [](const std::vector<std::vector<double>>& traj, double h, int at, int window) {
            return stiffness_index(from_plain_list(traj), h, at, window);
        },
        py::arg("trajectory"), py::arg("h"), py::arg("at"), py::arg("window") = 5);
    m.def(
        "mmd_sample_quality",
        [](const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b, double bandwidth) {
            return mmd_sample_quality(from_plain_list(a), from_plain_list(b), bandwidth);
        },
        py::arg("samples_a"), py::arg("samples_b"), py::arg("bandwidth") = 0.0);

    py::class_<Prop1Report>(m, "Prop1Report")
        .def_readonly("rho", &Prop1Report::rho)
        .def_readonly("tau_max", &Prop1Report::tau_max)
        .def_readonly("errors", &Prop1Report::errors)
        .def_readonly("bounds", &Prop1Report::bounds)
        .def_readonly("all_bounds_ok", &Prop1Report::all_bounds_ok)
        .def_readonly("sup_bound", &Prop1Report::sup_bound)
        .def_readonly("sup_ok", &Prop1Report::sup_ok)
        .def_readonly("error_increasing_in_k", &Prop1Report::error_increasing_in_k)
        .def_readonly("passed", &Prop1Report::pass);

    m.def(
        "verify_proposition1",
        [](double rho, int dim, double h, int warmup, int max_k, PredictorKind kind) {
            return verify_proposition1(linear_system_for_rho(rho, dim, h), h, warmup, max_k, kind);
        },
        py::arg("rho"), py::arg("dim") = 1, py::arg("h") = 1.0, py::arg("warmup") = 2, py::arg("max_k") = 20,
        py::arg("kind") = PredictorKind::FoCa);

    py::class_<StepRecord>(m, "StepRecord")
        .def_readonly("step_index", &StepRecord::step_index)
        .def_readonly("is_full", &StepRecord::is_full)
        .def_readonly("rel_error", &StepRecord::rel_error)
        .def_readonly("lte", &StepRecord::lte)
        .def_readonly("stiffness_index", &StepRecord::stiffness_index)
        .def_readonly("state_deviation", &StepRecord::state_deviation)
        .def_readonly("fallback_used", &StepRecord::fallback_used);

    py::class_<RunReport>(m, "RunReport")
        .def_readonly("records", &RunReport::records)
        .def_readonly("evaluation_count", &RunReport::evaluation_count)
        .def_readonly("acceleration_ratio", &RunReport::acceleration_ratio)
        .def_readonly("terminal_sample_deviation", &RunReport::terminal_sample_deviation)
        .def_readonly("fallback_steps", &RunReport::fallback_steps)
        .def_readonly("aborted", &RunReport::aborted)
        .def("max_rel_error", &RunReport::max_rel_error)
        .def("used_features", [](const RunReport& r) { return to_plain_list(r.used_features); });

    py::class_<TrajectorySource>(m, "TrajectorySource")
        .def("name", &TrajectorySource::name)
        .def("feature_dim", &TrajectorySource::feature_dim)
        .def("reset", &TrajectorySource::reset)
        .def("current_state", [](const TrajectorySource& s) { return to_plain(s.current_state()); })
        .def("true_feature_trajectory", [](const TrajectorySource& s, int start_timestep, int num_steps, double h) {
            return to_plain_list(s.true_feature_trajectory(TimeGrid{start_timestep, num_steps, h}));
        });

    m.def(
        "linear_source",
        [](double rho, int dim, double h) -> std::unique_ptr<TrajectorySource> {
            return std::make_unique<LinearSource>(linear_system_for_rho(rho, dim, h), h);
        },
        py::arg("rho"), py::arg("dim") = 1, py::arg("h") = 1.0);
    m.def(
        "denoiser_source",
        [](const std::string& weights_path) -> std::unique_ptr<TrajectorySource> {
            return std::make_unique<DenoiserSource>(ToyDenoiser::load(weights_path));
        },
        py::arg("weights_path"));

    m.def(
        "run_cached_sampler",
        [](TrajectorySource& source, const CacheSchedule& schedule, PredictorKind kind, int taylor_order,
           uint64_t seed) {
            RunOptions opts;
            opts.taylor_order = taylor_order;
            opts.seed = seed;
            return run_cached_sampler(source, schedule, kind, opts);
        },
        py::arg("source"), py::arg("schedule"), py::arg("kind"), py::arg("taylor_order") = 2, py::arg("seed") = 1);

    m.def(
        "train_denoiser",
        [](int T, double beta_start, double beta_end, int dataset_size, int max_epochs, double learning_rate,
           double mse_threshold, uint64_t seed, const std::string& save_path) {
            TrainConfig cfg;
            cfg.dataset_size = dataset_size;
            cfg.max_epochs = max_epochs;
            cfg.learning_rate = learning_rate;
            cfg.mse_threshold = mse_threshold;
            cfg.seed = seed;
            const TrainResult result = train_denoiser(DiffusionSchedule::linear_beta(T, beta_start, beta_end), cfg);
            if (!save_path.empty())
                result.model.save(save_path);
            return py::make_tuple(result.final_mse, result.converged);
        },
        py::arg("T") = 50, py::arg("beta_start") = 0.002, py::arg("beta_end") = 0.28, py::arg("dataset_size") = 10000,
        py::arg("max_epochs") = 400, py::arg("learning_rate") = 0.05, py::arg("mse_threshold") = 0.25,
        py::arg("seed") = 1, py::arg("save_path") = "");
}
