#include "debm/asymptotics.hpp"
#include "debm/efficiency.hpp"
#include "debm/errors.hpp"
#include "debm/estimators.hpp"
#include "debm/fitting.hpp"
#include "debm/models.hpp"
#include "debm/study.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace debm;

namespace {

Configuration config(const EnergyModel& model, std::uint32_t index) {
    return Configuration(model.dimension(), index);
}

py::dict report_dict(const CovarianceReport& r) {
    py::dict d;
    d["estimator"] = r.estimator;
    d["theta_star"] = r.theta_star;
    d["H"] = r.H;
    d["J"] = r.J;
    d["Sigma"] = r.sigma;
    d["logdet_Sigma"] = r.logdet_sigma;
    d["rank_deficiency"] = r.rank_deficiency;
    d["H_condition"] = r.h_condition;
    return d;
}

py::dict bound_dict(const BoundReport& b) {
    py::dict d;
    d["q_min"] = b.q_min;
    d["q_max"] = b.q_max;
    d["q_mid"] = b.q_mid;
    d["V_min"] = b.v_min;
    d["V_max"] = b.v_max;
    d["l"] = b.l;
    d["h"] = b.h;
    d["D_theta"] = b.d_theta;
    d["logdet_gap_lower"] = b.logdet_gap_lower;
    d["logdet_gap_upper"] = b.logdet_gap_upper;
    d["observed_gap"] = b.observed_gap ? py::object(py::float_(*b.observed_gap)) : py::object(py::none());
    return d;
}

Dataset dataset_from_indices(const EnergyModel& model, const std::vector<std::uint32_t>& indices) {
    std::vector<Configuration> cases;
    cases.reserve(indices.size());
    for (auto i : indices) cases.push_back(config(model, i));
    return Dataset(model.dimension(), std::move(cases));
}

FitOptions make_options(int max_iterations, double grad_tol, std::optional<int> restarts,
                        std::optional<Vector> theta0, std::uint64_t seed) {
    FitOptions o;
    o.max_iterations = max_iterations;
    o.grad_tol = grad_tol;
    o.restarts = restarts;
    o.seed = seed;
    if (theta0) {
        o.init = InitKind::given;
        o.theta0 = *theta0;
    }
    return o;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Asymptotic covariance and efficiency of estimators for discrete energy-based models";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
    py::register_exception<IndexError>(m, "IndexError", base.ptr());
    py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<SingularMatrixError>(m, "SingularMatrixError", base.ptr());
    py::register_exception<InputError>(m, "InputError", base.ptr());
    py::register_exception<FitError>(m, "FitError", base.ptr());

    py::class_<EnergyModel>(m, "EnergyModel")
        .def_static("third_order_bm", &EnergyModel::third_order_bm)
        .def_static("binary_mrf", &EnergyModel::binary_mrf, py::arg("dimension"))
        .def_static("binary_rbm", &EnergyModel::binary_rbm, py::arg("dimension"), py::arg("filters"))
        .def_property_readonly("kind", [](const EnergyModel& e) { return std::string(to_string(e.kind())); })
        .def_property_readonly("dimension", &EnergyModel::dimension)
        .def_property_readonly("param_count", &EnergyModel::param_count)
        .def("energy", [](const EnergyModel& e, const Vector& t, std::uint32_t x) { return e.energy(t, config(e, x)); })
        .def("energy_grad",
             [](const EnergyModel& e, const Vector& t, std::uint32_t x) { return e.energy_grad(t, config(e, x)); })
        .def("probabilities", [](const EnergyModel& e, const Vector& t) { return exact_distribution(e, t).probabilities; })
        .def("log_partition", [](const EnergyModel& e, const Vector& t) { return exact_distribution(e, t).log_partition; })
        .def("__repr__", [](const EnergyModel& e) {
            return "<EnergyModel " + std::string(to_string(e.kind())) + " D=" + std::to_string(e.dimension()) +
                   " params=" + std::to_string(e.param_count()) + ">";
        });

    m.def(
        "m_value",
        [](const std::string& est, const EnergyModel& model, const Vector& t, std::uint32_t x) {
            return m_value(EstimatorSpec::from_selector(est, model.dimension()), model, t, config(model, x));
        },
        py::arg("estimator"), py::arg("model"), py::arg("theta"), py::arg("x"));
    m.def(
        "m_grad",
        [](const std::string& est, const EnergyModel& model, const Vector& t, std::uint32_t x) {
            return m_grad(EstimatorSpec::from_selector(est, model.dimension()), model, t, config(model, x));
        },
        py::arg("estimator"), py::arg("model"), py::arg("theta"), py::arg("x"));
    m.def(
        "m_hess",
        [](const std::string& est, const EnergyModel& model, const Vector& t, std::uint32_t x) {
            return m_hess(EstimatorSpec::from_selector(est, model.dimension()), model, t, config(model, x));
        },
        py::arg("estimator"), py::arg("model"), py::arg("theta"), py::arg("x"));

    m.def(
        "covariance",
        [](const std::string& est, const EnergyModel& model, const Vector& t) {
            return report_dict(well_specified_report(EstimatorSpec::from_selector(est, model.dimension()), model, t));
        },
        py::arg("estimator"), py::arg("model"), py::arg("theta"),
        "Well-specified sandwich covariance report as a dict.");
    m.def(
        "bound_quantities", [](const EnergyModel& model, const Vector& t) { return bound_dict(bound_quantities(model, t)); },
        py::arg("model"), py::arg("theta"));
    m.def(
        "compare",
        [](const EnergyModel& model, const Vector& t) {
            const Comparison c = compare_estimators(model, t);
            py::dict d;
            d["ml"] = report_dict(c.ml);
            d["pl"] = report_dict(c.pl);
            d["rm"] = report_dict(c.rm);
            d["bound"] = bound_dict(c.bound);
            d["rm_minus_pl_relation"] = std::string(to_string(c.rm_vs_pl.relation));
            d["rm_minus_pl_spectrum"] = c.rm_vs_pl.spectrum;
            d["theorem_pass"] = c.theorem.pass;
            return d;
        },
        py::arg("model"), py::arg("theta"));
    m.def(
        "psd_order",
        [](const Matrix& a, const Matrix& b, double tol) {
            const PsdOrdering o = psd_order(a, b, tol);
            return py::make_tuple(std::string(to_string(o.relation)), o.spectrum);
        },
        py::arg("a"), py::arg("b"), py::arg("tol") = kDefaultPsdTol);
    m.def(
        "figure2",
        [](int trials, std::uint64_t seed, double sigma) {
            Figure2Run run;
            {
                py::gil_scoped_release release;
                run = run_figure2(trials, seed, sigma);
            }
            py::list rows;
            for (const auto& dr : run.draws) {
                const Figure2Row& r = dr.row;
                py::dict d;
                d["trial"] = r.trial;
                d["theta"] = r.theta;
                d["logdet_ml"] = r.logdet_ml;
                d["logdet_pl"] = r.logdet_pl;
                d["logdet_rm"] = r.logdet_rm;
                d["delta_pl_ml"] = r.delta_pl_ml;
                d["delta_rm_ml"] = r.delta_rm_ml;
                d["delta_rm_pl"] = r.delta_rm_pl;
                d["log_l"] = r.log_l;
                d["log_h"] = r.log_h;
                d["bound_width"] = r.bound_width;
                d["theorem_pass"] = dr.theorem.pass;
                rows.append(d);
            }
            return rows;
        },
        py::arg("trials"), py::arg("seed"), py::arg("sigma") = 1.0);

    m.def(
        "sample",
        [](const EnergyModel& model, const Vector& t, std::size_t n, std::uint64_t seed) {
            const Dataset data = sample_dataset(model, t, n, seed);
            std::vector<std::uint32_t> out;
            out.reserve(data.size());
            for (const auto& x : data.cases()) out.push_back(x.index());
            return out;
        },
        py::arg("model"), py::arg("theta"), py::arg("n"), py::arg("seed"),
        "Exact draws returned as state indices (bit d of the index is x_d).");
    m.def(
        "fit",
        [](const std::string& est, const EnergyModel& model, const std::vector<std::uint32_t>& data, int max_iterations,
           double grad_tol, std::optional<int> restarts, std::optional<Vector> theta0, std::uint64_t seed) {
            const auto spec = EstimatorSpec::from_selector(est, model.dimension());
            const Dataset ds = dataset_from_indices(model, data);
            FitResult r;
            {
                py::gil_scoped_release release;
                r = fit(spec, model, ds, make_options(max_iterations, grad_tol, restarts, theta0, seed));
            }
            py::dict d;
            d["theta_hat"] = r.theta_hat;
            d["criterion_value"] = r.criterion_value;
            d["grad_inf_norm"] = r.grad_inf_norm;
            d["iterations"] = r.iterations;
            d["converged"] = r.converged;
            d["restart_index"] = r.restart_index;
            d["history"] = r.history;
            d["warnings"] = r.warnings;
            return d;
        },
        py::arg("estimator"), py::arg("model"), py::arg("data"), py::arg("max_iterations") = 500,
        py::arg("grad_tol") = 1e-8, py::arg("restarts") = py::none(), py::arg("theta0") = py::none(),
        py::arg("seed") = 0);
    m.def(
        "monte_carlo",
        [](const std::string& est, const EnergyModel& model, const Vector& t, std::size_t n, int trials,
           std::uint64_t seed) {
            const auto spec = EstimatorSpec::from_selector(est, model.dimension());
            MonteCarloResult r;
            {
                py::gil_scoped_release release;
                r = monte_carlo_covariance(spec, model, t, n, trials, seed);
            }
            py::dict d;
            d["covariance"] = r.covariance;
            d["mean_deviation"] = r.mean_deviation;
            d["trials"] = r.trials;
            d["converged"] = r.converged;
            d["non_converged"] = r.non_converged;
            d["failed"] = r.failed;
            return d;
        },
        py::arg("estimator"), py::arg("model"), py::arg("theta"), py::arg("n"), py::arg("trials"), py::arg("seed"));
}
