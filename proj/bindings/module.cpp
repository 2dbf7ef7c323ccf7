#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "copasbias/comparators.hpp"
#include "copasbias/data.hpp"
#include "copasbias/estimation.hpp"
#include "copasbias/model.hpp"
#include "copasbias/normal.hpp"
#include "copasbias/scoretest.hpp"
#include "copasbias/sim.hpp"

namespace py = pybind11;
namespace cb = copasbias;

namespace {

cb::model::CopasParams make_params(double mu, double tau2, double rho, double gamma0,
                                   double gamma1) {
    cb::model::CopasParams p{mu, tau2, rho, gamma0, gamma1};
    p.validate();
    return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Publication-bias diagnostics under a correlated selection model";

    // Translators run newest-first, so the base class must be registered
    // before the subclass or it would shadow it.
    py::register_exception<cb::error>(m, "ModelError", PyExc_RuntimeError);
    py::register_exception<cb::data_error>(m, "DataError", PyExc_ValueError);

    py::class_<cb::Study>(m, "Study")
        .def(py::init<double, double>(), py::arg("y"), py::arg("s"))
        .def_readonly("y", &cb::Study::y)
        .def_readonly("s", &cb::Study::s)
        .def("__repr__", [](const cb::Study& st) {
            return "Study(y=" + std::to_string(st.y) + ", s=" + std::to_string(st.s) + ")";
        });

    py::class_<cb::Dataset>(m, "Dataset")
        .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("y"), py::arg("s"))
        .def("__len__", &cb::Dataset::n)
        .def("__getitem__",
             [](const cb::Dataset& d, std::size_t i) {
                 if (i >= d.n()) throw py::index_error();
                 return d[i];
             })
        .def_property_readonly("y", &cb::Dataset::y_values)
        .def_property_readonly("s", &cb::Dataset::s_values);

    py::class_<cb::estimation::NullFit>(m, "NullFit")
        .def_readonly("mu_hat", &cb::estimation::NullFit::mu_hat)
        .def_readonly("tau2_hat", &cb::estimation::NullFit::tau2_hat)
        .def_readonly("loglik", &cb::estimation::NullFit::loglik)
        .def_readonly("converged", &cb::estimation::NullFit::converged)
        .def_readonly("iterations", &cb::estimation::NullFit::iterations);

    py::class_<cb::estimation::SensitivityFit>(m, "SensitivityFit")
        .def_readonly("gamma0", &cb::estimation::SensitivityFit::gamma0)
        .def_readonly("gamma1", &cb::estimation::SensitivityFit::gamma1)
        .def_readonly("mu_adj", &cb::estimation::SensitivityFit::mu_adj)
        .def_readonly("tau2_adj", &cb::estimation::SensitivityFit::tau2_adj)
        .def_readonly("rho_hat", &cb::estimation::SensitivityFit::rho_hat)
        .def_readonly("loglik", &cb::estimation::SensitivityFit::loglik)
        .def_readonly("mu_se", &cb::estimation::SensitivityFit::mu_se)
        .def_property_readonly("mu_ci",
                               [](const cb::estimation::SensitivityFit& f) {
                                   return std::make_pair(f.mu_ci[0], f.mu_ci[1]);
                               })
        .def_readonly("converged", &cb::estimation::SensitivityFit::converged)
        .def_readonly("rho_at_boundary", &cb::estimation::SensitivityFit::rho_at_boundary);

    py::class_<cb::scoretest::GridPoint>(m, "GridPoint")
        .def_readonly("gamma0", &cb::scoretest::GridPoint::gamma0)
        .def_readonly("gamma1", &cb::scoretest::GridPoint::gamma1);

    py::class_<cb::scoretest::GridSpec>(m, "GridSpec")
        .def(py::init<>())
        .def_readwrite("gamma0_lo", &cb::scoretest::GridSpec::gamma0_lo)
        .def_readwrite("gamma0_hi", &cb::scoretest::GridSpec::gamma0_hi)
        .def_readwrite("gamma1_lo", &cb::scoretest::GridSpec::gamma1_lo)
        .def_readwrite("gamma1_hi", &cb::scoretest::GridSpec::gamma1_hi)
        .def_readwrite("n_gamma0", &cb::scoretest::GridSpec::n_gamma0)
        .def_readwrite("n_gamma1", &cb::scoretest::GridSpec::n_gamma1)
        .def_readwrite("n_points_used", &cb::scoretest::GridSpec::n_points_used)
        .def_readwrite("seed", &cb::scoretest::GridSpec::seed)
        .def_readwrite("gamma1_fallback", &cb::scoretest::GridSpec::gamma1_fallback);

    py::class_<cb::scoretest::ScoreTestResult>(m, "ScoreTestResult")
        .def_readonly("t_stat", &cb::scoretest::ScoreTestResult::t_stat)
        .def_readonly("z_values", &cb::scoretest::ScoreTestResult::z_values)
        .def_readonly("argmax_point", &cb::scoretest::ScoreTestResult::argmax_point)
        .def_readonly("p_value", &cb::scoretest::ScoreTestResult::p_value)
        .def_readonly("b_boot", &cb::scoretest::ScoreTestResult::b_boot)
        .def_readonly("boot_t", &cb::scoretest::ScoreTestResult::boot_t)
        .def_readonly("null_fit", &cb::scoretest::ScoreTestResult::null_fit)
        .def_readonly("points", &cb::scoretest::ScoreTestResult::points)
        .def_readonly("n_dropped", &cb::scoretest::ScoreTestResult::n_dropped)
        .def_readonly("n_grid_failed", &cb::scoretest::ScoreTestResult::n_grid_failed)
        .def_readonly("warnings", &cb::scoretest::ScoreTestResult::warnings);

    py::class_<cb::comparators::ComparatorResult>(m, "ComparatorResult")
        .def_property_readonly("method",
                               [](const cb::comparators::ComparatorResult& r) {
                                   return cb::comparators::method_name(r.method);
                               })
        .def_readonly("statistic", &cb::comparators::ComparatorResult::statistic)
        .def_readonly("p_value", &cb::comparators::ComparatorResult::p_value)
        .def_readonly("extras", &cb::comparators::ComparatorResult::extras);

    m.def("selection_prob", [](double gamma0, double gamma1, double s) {
        return cb::model::selection_prob(gamma0, gamma1, s);
    }, py::arg("gamma0"), py::arg("gamma1"), py::arg("s"));

    m.def("copas_loglik",
          [](const cb::Dataset& d, double mu, double tau2, double rho, double gamma0,
             double gamma1) {
              return cb::model::copas_loglik(make_params(mu, tau2, rho, gamma0, gamma1), d);
          },
          py::arg("data"), py::arg("mu"), py::arg("tau2"), py::arg("rho"), py::arg("gamma0"),
          py::arg("gamma1"));

    m.def("score_rho_at_null",
          [](const cb::Dataset& d, double gamma0, double gamma1, double mu, double tau2) {
              return cb::model::score_rho_at_null(gamma0, gamma1, mu, tau2, d);
          },
          py::arg("data"), py::arg("gamma0"), py::arg("gamma1"), py::arg("mu"), py::arg("tau2"));

    m.def("efficient_information",
          [](const cb::Dataset& d, double gamma0, double gamma1, double mu, double tau2) {
              return cb::model::efficient_information(gamma0, gamma1, mu, tau2, d);
          },
          py::arg("data"), py::arg("gamma0"), py::arg("gamma1"), py::arg("mu"), py::arg("tau2"));

    m.def("fit_null", &cb::estimation::fit_null, py::arg("data"));

    m.def("fit_sensitivity", &cb::estimation::fit_sensitivity, py::arg("data"), py::arg("gamma0"),
          py::arg("gamma1"));

    m.def("default_grid", &cb::scoretest::default_grid, py::arg("data"), py::arg("p_min") = 0.1,
          py::arg("p_max") = 0.9);

    m.def("sup_score_test",
          [](const cb::Dataset& d, const cb::scoretest::GridSpec& grid, int b_boot,
             std::uint64_t seed, unsigned threads) {
              return cb::scoretest::bootstrap_pvalue(d, grid, b_boot, seed, threads);
          },
          py::arg("data"), py::arg("grid"), py::arg("b_boot") = 200, py::arg("seed") = 0,
          py::arg("threads") = 0, py::call_guard<py::gil_scoped_release>());

    m.def("egger_test", &cb::comparators::egger_test, py::arg("data"));
    m.def("copas_naive_test", &cb::comparators::copas_naive_test, py::arg("data"));
    m.def("trim_and_fill",
          [](const cb::Dataset& d, const std::string& estimator, const std::string& side) {
              cb::comparators::TrimFillEstimator est;
              if (estimator == "L0")
                  est = cb::comparators::TrimFillEstimator::L0;
              else if (estimator == "R0")
                  est = cb::comparators::TrimFillEstimator::R0;
              else
                  throw cb::data_error("estimator must be L0 or R0");
              cb::comparators::TrimFillSide sd;
              if (side == "auto")
                  sd = cb::comparators::TrimFillSide::auto_side;
              else if (side == "left")
                  sd = cb::comparators::TrimFillSide::left;
              else if (side == "right")
                  sd = cb::comparators::TrimFillSide::right;
              else
                  throw cb::data_error("side must be auto, left, or right");
              return cb::comparators::trim_and_fill(d, est, sd);
          },
          py::arg("data"), py::arg("estimator") = "L0", py::arg("side") = "auto");

    m.def("generate",
          [](int n, double mu, double tau2, double rho, double gamma0, double gamma1,
             const std::string& model, double c, double s_loc, double s_scale, bool zscore_noise,
             std::uint64_t seed) {
              cb::sim::SimConfig cfg;
              cfg.n = n;
              cfg.mu = mu;
              cfg.tau2 = tau2;
              cfg.rho = rho;
              cfg.gamma0 = gamma0;
              cfg.gamma1 = gamma1;
              cfg.model = cb::sim::model_from_name(model);
              cfg.c = c;
              cfg.s_loc = s_loc;
              cfg.s_scale = s_scale;
              cfg.zscore_noise = zscore_noise;
              cfg.seed = seed;
              cfg.validate();
              cb::Rng rng(seed);
              const cb::sim::GenResult g = cb::sim::generate(cfg, rng);
              return py::make_tuple(g.data, g.acceptance_rate);
          },
          py::arg("n"), py::arg("mu") = 0.4, py::arg("tau2") = 0.01, py::arg("rho") = 0.0,
          py::arg("gamma0") = -1.0, py::arg("gamma1") = 0.65, py::arg("model") = "copas",
          py::arg("c") = 0.5, py::arg("s_loc") = 0.25, py::arg("s_scale") = 2.0,
          py::arg("zscore_noise") = false, py::arg("seed") = 0);
}
