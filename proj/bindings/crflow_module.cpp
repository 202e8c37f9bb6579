#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "crflow/artifacts.hpp"
#include "crflow/checkpoint.hpp"
#include "crflow/kernel.hpp"
#include "crflow/singularity.hpp"
#include "crflow/verify.hpp"

namespace py = pybind11;
using namespace crflow;

namespace {

ComplexPoint to_point(const std::vector<cplx>& z) { return ComplexPoint(z); }

py::array_t<cplx> tensor3_array(const Tensor3& t) {
  py::array_t<cplx> a({t.n, t.n, t.n});
  std::copy(t.v.begin(), t.v.end(), a.mutable_data());
  return a;
}

py::array_t<cplx> tensor4_array(const Tensor4& t) {
  py::array_t<cplx> a({t.n, t.n, t.n, t.n});
  std::copy(t.v.begin(), t.v.end(), a.mutable_data());
  return a;
}

py::array_t<double> rows_array(const std::vector<DiagnosticsRow>& rows) {
  py::array_t<double> a({static_cast<py::ssize_t>(rows.size()), py::ssize_t(12)});
  auto* p = a.mutable_data();
  for (const auto& r : rows) {
    *p++ = r.t;
    *p++ = r.sup_R;
    *p++ = r.inf_R;
    *p++ = r.sup_ric_norm_sq;
    *p++ = r.min_eig;
    *p++ = r.sup_abs_phi;
    *p++ = r.sup_abs_phidot;
    *p++ = r.q1_min;
    *p++ = r.q1_max;
    *p++ = r.volume;
    *p++ = r.dbar_residual;
    *p++ = r.gauduchon_residual;
  }
  return a;
}

std::vector<HermitianMatrix> to_hermitian_stack(const py::array_t<cplx>& arr) {
  if (arr.ndim() != 3 || arr.shape(1) != arr.shape(2))
    throw ContractViolation("expected an array of shape (points, n, n)");
  const auto pts = arr.shape(0);
  const auto n = arr.shape(1);
  std::vector<HermitianMatrix> out;
  out.reserve(static_cast<std::size_t>(pts));
  auto u = arr.unchecked<3>();
  for (py::ssize_t p = 0; p < pts; ++p) {
    Eigen::MatrixXcd m(n, n);
    for (py::ssize_t i = 0; i < n; ++i)
      for (py::ssize_t j = 0; j < n; ++j) m(i, j) = u(p, i, j);
    out.push_back(HermitianMatrix::from(m));
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_crflow, m) {
  m.doc() = "Chern-Ricci flow engine: curvature kernels, model manifolds, "
            "flow integration and blow-up analysis";

  // Base first: translators run newest-first, so derived classes must be
  // registered after their base to win the match.
  py::register_exception<Error>(m, "CrflowError");
  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<ContractViolation>(m, "ContractViolation");
  py::register_exception<SingularMetricError>(m, "SingularMetricError");
  py::register_exception<DomainError>(m, "FieldDomainError");

  py::enum_<DerivativeMode>(m, "DerivativeMode")
      .value("closed_form", DerivativeMode::closed_form)
      .value("stencil", DerivativeMode::stencil);

  py::enum_<RicciMethod>(m, "RicciMethod")
      .value("trace", RicciMethod::trace)
      .value("logdet", RicciMethod::logdet);

  py::class_<MetricField>(m, "MetricField")
      .def_property_readonly("dim", &MetricField::dim)
      .def("value",
           [](const MetricField& g, const std::vector<cplx>& z) {
             return Eigen::MatrixXcd(g.value(to_point(z)));
           })
      .def("d1",
           [](const MetricField& g, const std::vector<cplx>& z, int i) {
             return Eigen::MatrixXcd(g.d1(to_point(z), i));
           })
      .def("d11", [](const MetricField& g, const std::vector<cplx>& z, int i, int j) {
        return Eigen::MatrixXcd(g.d11(to_point(z), i, j));
      });

  py::class_<HopfModel>(m, "HopfModel")
      .def(py::init<int, double>(), py::arg("n"), py::arg("alpha_modulus"))
      .def_readonly("n", &HopfModel::n)
      .def_readonly("alpha_modulus", &HopfModel::alpha_modulus);

  py::class_<TrigFactor>(m, "TrigFactor")
      .def(py::init([](int axis, double freq, double phase) {
             return TrigFactor{axis, freq, phase};
           }),
           py::arg("axis"), py::arg("freq"), py::arg("phase") = 0.0);

  py::class_<CosineEntry>(m, "CosineEntry")
      .def(py::init([](int row, int col, cplx coeff, std::vector<TrigFactor> factors) {
             return CosineEntry{row, col, coeff, std::move(factors)};
           }),
           py::arg("row"), py::arg("col"), py::arg("coeff"), py::arg("factors"));

  py::class_<TrigTerm>(m, "TrigTerm")
      .def(py::init([](cplx coeff, std::vector<TrigFactor> factors) {
             return TrigTerm{coeff, std::move(factors)};
           }),
           py::arg("coeff"), py::arg("factors"));

  py::class_<TorusModel>(m, "TorusModel")
      .def(py::init<int, std::vector<double>, std::vector<CosineEntry>,
                    std::vector<TrigTerm>>(),
           py::arg("n"), py::arg("periods"),
           py::arg("entries") = std::vector<CosineEntry>{},
           py::arg("potential") = std::vector<TrigTerm>{})
      .def_property_readonly("n", &TorusModel::n)
      .def_property_readonly("periods", &TorusModel::periods);

  m.def("hopf_metric", &hopf_metric, py::arg("model"),
        py::arg("mode") = DerivativeMode::closed_form, py::arg("h") = 1e-3,
        py::arg("richardson") = false);
  m.def("hopf_exact_flow", &hopf_exact_flow, py::arg("model"), py::arg("t"),
        py::arg("mode") = DerivativeMode::closed_form, py::arg("h") = 1e-3,
        py::arg("richardson") = false);
  m.def("hopf_exact_scalar", &hopf_exact_scalar, py::arg("model"), py::arg("t"));
  m.def("hopf_singular_time", &hopf_singular_time, py::arg("model"));
  m.def("torus_metric", &torus_metric, py::arg("model"),
        py::arg("mode") = DerivativeMode::closed_form, py::arg("h") = 1e-3,
        py::arg("richardson") = false);

  m.def("chern_connection",
        [](const MetricField& g, const std::vector<cplx>& z) {
          return tensor3_array(chern_connection(g, to_point(z)));
        });
  m.def("chern_curvature", [](const MetricField& g, const std::vector<cplx>& z) {
    return tensor4_array(chern_curvature(g, to_point(z)));
  });
  m.def(
      "chern_ricci",
      [](const MetricField& g, const std::vector<cplx>& z, RicciMethod method) {
        return Eigen::MatrixXcd(chern_ricci(g, to_point(z), method).mat());
      },
      py::arg("field"), py::arg("z"), py::arg("method") = RicciMethod::logdet);
  m.def(
      "chern_scalar",
      [](const MetricField& g, const std::vector<cplx>& z, RicciMethod method) {
        return chern_scalar(g, to_point(z), method);
      },
      py::arg("field"), py::arg("z"), py::arg("method") = RicciMethod::logdet);
  m.def("torsion", [](const MetricField& g, const std::vector<cplx>& z) {
    const TorsionResult t = torsion(g, to_point(z));
    return py::make_tuple(tensor3_array(t.tensor), t.trace);
  });
  m.def("kahler_gauduchon_residuals",
        [](const MetricField& g, const std::vector<std::vector<cplx>>& pts) {
          std::vector<ComplexPoint> points;
          points.reserve(pts.size());
          for (const auto& z : pts) points.push_back(to_point(z));
          const FormResiduals r = kahler_gauduchon_residuals(g, points);
          return py::make_tuple(r.dbar, r.gauduchon);
        });
  m.def("positivity", [](const Eigen::MatrixXcd& g) {
    const PositivityResult r = positivity(HermitianMatrix::from(g));
    return py::make_tuple(r.is_positive, r.min_eigenvalue);
  });
  m.def("trace_and_norms", [](const Eigen::MatrixXcd& g, const Eigen::MatrixXcd& h) {
    const TraceAndNorm r =
        trace_and_norms(HermitianMatrix::from(g), HermitianMatrix::from(h));
    return py::make_tuple(r.trace, r.norm_sq);
  });

  py::class_<Trajectory>(m, "Trajectory")
      .def_property_readonly("termination",
                             [](const Trajectory& t) { return std::string(to_string(t.termination)); })
      .def_readonly("label", &Trajectory::label)
      .def_readonly("t_final", &Trajectory::t_final)
      .def_readonly("sup_R_overall", &Trajectory::sup_R_overall)
      .def_readonly("determinant_bound_ok", &Trajectory::determinant_bound_ok)
      .def_property_readonly("rows", [](const Trajectory& t) { return rows_array(t.rows); })
      .def_property_readonly("columns", [](const Trajectory&) {
        return std::string(kDiagnosticsColumns);
      })
      .def_property_readonly("num_checkpoints",
                             [](const Trajectory& t) { return t.checkpoints.size(); })
      .def("csv", [](const Trajectory& t) { return diagnostics_csv(t.rows); });

  py::class_<RunConfig>(m, "RunConfig")
      .def_readwrite("dt0", &RunConfig::dt0)
      .def_readwrite("dt_min", &RunConfig::dt_min)
      .def_readwrite("t_end", &RunConfig::t_end)
      .def_readwrite("checkpoint_every", &RunConfig::checkpoint_every)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("output_dir", &RunConfig::output_dir)
      .def_readwrite("N", &RunConfig::N)
      .def_readwrite("hopf_samples", &RunConfig::hopf_samples)
      .def_readwrite("locus_threshold", &RunConfig::locus_threshold)
      .def_readwrite("quiet", &RunConfig::quiet);

  m.def("parse_config", &parse_config_text, py::arg("text"));
  m.def("builtin_scenario", &builtin_scenario, py::arg("name"));
  m.def("builtin_scenario_names", [] {
    std::vector<std::string> names;
    for (const auto& [k, v] : builtin_scenarios()) names.push_back(k);
    return names;
  });
  m.def("run_flow", &run_flow, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("run_command", [](const RunConfig& cfg) {
    std::ostringstream log;
    const int code = run_command(cfg, log);
    return py::make_tuple(code, log.str());
  });
  m.def("cross_validate", [](const Trajectory& a, const Trajectory& b) {
    const DeviationReport r = cross_validate(a, b);
    return py::make_tuple(r.t, r.deviation, r.max_deviation);
  });
  m.def("phi_dot_identity_residual", &phi_dot_identity_residual);
  m.def("scalar_evolution_residual", &scalar_evolution_residual);
  m.def(
      "q_diagnostics",
      [](const Trajectory& tr, double C_tilde, double B) {
        const QDiagnostics q = q_diagnostics(tr, C_tilde, B);
        py::dict d;
        d["t"] = q.t;
        d["q1_min"] = q.q1_min;
        d["q1_max"] = q.q1_max;
        d["q2_min"] = q.q2_min;
        d["q2_max"] = q.q2_max;
        return d;
      },
      py::arg("trajectory"), py::arg("C_tilde"), py::arg("B") = 1.0);
  m.def("default_C_tilde", &default_C_tilde);

  py::class_<BlowupFit>(m, "BlowupFit")
      .def_readonly("T_fit", &BlowupFit::T_fit)
      .def_readonly("exponent", &BlowupFit::exponent)
      .def_readonly("constant", &BlowupFit::constant)
      .def_readonly("rms_residual", &BlowupFit::rms_residual)
      .def_readonly("low_confidence", &BlowupFit::low_confidence)
      .def("__repr__", [](const BlowupFit& f) {
        return "BlowupFit(T_fit=" + std::to_string(f.T_fit) +
               ", exponent=" + std::to_string(f.exponent) +
               ", constant=" + std::to_string(f.constant) + ")";
      });

  m.def(
      "fit_blowup",
      [](const std::vector<double>& t, const std::vector<double>& sup_R,
         double t_lo, double t_hi) {
        return fit_blowup(t, sup_R, FitWindow{t_lo, t_hi});
      },
      py::arg("t"), py::arg("sup_R"), py::arg("t_lo"), py::arg("t_hi"));
  m.def("blowup_type_label",
        [](const BlowupFit& f) { return std::string(blowup_type_label(f)); });
  m.def(
      "maximal_time_proxy",
      [](const py::array_t<cplx>& omega0, const py::array_t<cplx>& ric0) {
        const auto a = to_hermitian_stack(omega0);
        const auto b = to_hermitian_stack(ric0);
        return maximal_time_proxy(a, b);
      },
      py::arg("omega0"), py::arg("ric0"));
  m.def(
      "singular_locus",
      [](const Trajectory& tr, double threshold) {
        const LocusMask mask = singular_locus(tr, threshold);
        py::array_t<std::uint8_t> arr(static_cast<py::ssize_t>(mask.mask.size()));
        std::copy(mask.mask.begin(), mask.mask.end(), arr.mutable_data());
        py::array_t<double> first(static_cast<py::ssize_t>(mask.first_exceedance.size()));
        std::copy(mask.first_exceedance.begin(), mask.first_exceedance.end(),
                  first.mutable_data());
        return py::make_tuple(arr, first);
      },
      py::arg("trajectory"), py::arg("threshold"));

  m.def("verify_suite", [](const std::string& suite) {
    const auto checks = run_verify_suite(suite);
    py::list out;
    for (const auto& c : checks) {
      py::dict d;
      d["name"] = c.name;
      d["passed"] = c.passed;
      d["observed"] = c.observed;
      d["bound"] = c.bound;
      out.append(d);
    }
    return out;
  });
}
