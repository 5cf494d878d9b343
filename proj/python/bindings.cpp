#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mipt/analytics.hpp"
#include "mipt/circuit.hpp"
#include "mipt/curve_io.hpp"
#include "mipt/errors.hpp"
#include "mipt/experiment.hpp"
#include "mipt/gates.hpp"
#include "mipt/scaling.hpp"

namespace py = pybind11;
using namespace mipt;

namespace {

// Created once and intentionally never released: the module cannot be
// unloaded while the interpreter runs.
PyObject* g_error_type = nullptr;

}  // namespace

PYBIND11_MODULE(_mipt, m) {
  m.doc() = "Native core of the mipt package";

  g_error_type = PyErr_NewException("mipt.MiptError", PyExc_RuntimeError, nullptr);
  m.attr("MiptError") = py::reinterpret_borrow<py::object>(g_error_type);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(g_error_type)(e.what());
      inst.attr("code") = e.code();
      PyErr_SetObject(g_error_type, inst.ptr());
    }
  });

  // Gates

  py::class_<CartanCoeffs>(m, "CartanCoeffs")
      .def(py::init<>())
      .def(py::init([](double c1, double c2, double c3) { return CartanCoeffs{c1, c2, c3}; }),
           py::arg("c1"), py::arg("c2"), py::arg("c3"))
      .def_readwrite("c1", &CartanCoeffs::c1)
      .def_readwrite("c2", &CartanCoeffs::c2)
      .def_readwrite("c3", &CartanCoeffs::c3)
      .def("as_tuple", [](const CartanCoeffs& c) { return py::make_tuple(c.c1, c.c2, c.c3); })
      .def(py::self == py::self)
      .def("__repr__", [](const CartanCoeffs& c) {
        return "CartanCoeffs(" + format_double(c.c1) + ", " + format_double(c.c2) + ", " +
               format_double(c.c3) + ")";
      });

  py::class_<GateInvariants>(m, "GateInvariants")
      .def_readonly("e_p", &GateInvariants::e_p)
      .def_readonly("g_t", &GateInvariants::g_t)
      .def_readonly("E_U", &GateInvariants::E_U)
      .def_readonly("E_US", &GateInvariants::E_US)
      .def("__repr__", [](const GateInvariants& g) {
        return "GateInvariants(e_p=" + format_double(g.e_p) + ", g_t=" + format_double(g.g_t) +
               ")";
      });

  auto cart = m.def_submodule("cartan", "Named points and boundary families of the Weyl chamber");
  cart.attr("IDENTITY") = cartan::kIdentity;
  cart.attr("CNOT") = cartan::kCnot;
  cart.attr("ISWAP") = cartan::kIswap;
  cart.attr("SWAP") = cartan::kSwap;
  cart.def("swap_power", &cartan::swap_power, py::arg("alpha"));
  cart.def("cnot_power", &cartan::cnot_power, py::arg("alpha"));
  cart.def("cnot_to_iswap", &cartan::cnot_to_iswap, py::arg("alpha"));
  cart.def("iswap_to_swap", &cartan::iswap_to_swap, py::arg("alpha"));

  m.def("cartan_gate", [](const CartanCoeffs& c) { return cartan_gate(c).matrix; },
        py::arg("cartan"), "4x4 Cartan core, basis index 2*bit_i + bit_j.");
  m.def("operator_schmidt", [](const Matrix4& u) { return operator_schmidt(u).lambdas; },
        py::arg("matrix"), "Operator Schmidt weights, descending; they sum to 4 for a unitary.");
  m.def(
      "invariants_from_gate",
      [](const Matrix4& u) {
        TwoQubitGate g;
        g.matrix = u;
        return invariants_from_gate(g);
      },
      py::arg("matrix"));
  m.def("invariants_from_cartan", &invariants_from_cartan, py::arg("cartan"));
  m.def("cartan_from_invariants", &cartan_from_invariants, py::arg("e_p"), py::arg("g_t"));
  m.def(
      "gate_info_json",
      [](std::optional<CartanCoeffs> c, std::optional<double> e_p, std::optional<double> g_t) {
        GateSpec spec;
        if (c) spec.cartan = *c;
        spec.e_p = e_p;
        spec.g_t = g_t;
        return gate_report_json(gate_info(spec));
      },
      py::arg("cartan") = py::none(), py::arg("e_p") = py::none(), py::arg("g_t") = py::none());

  // Analytics

  m.def("page_entropy", &page_entropy, py::arg("n_a"), py::arg("n_b"));
  m.def(
      "measurement_only_entropy",
      [](int N, double p, int t) { return measurement_only_entropy({N, p, t}); }, py::arg("N"),
      py::arg("p"), py::arg("t"));
  m.def("unmeasured_probability", &unmeasured_probability, py::arg("N"), py::arg("n_kept"),
        py::arg("p"), py::arg("t"));
  m.def("unmeasured_mean_asymptote", &unmeasured_mean_asymptote, py::arg("N"), py::arg("p"));
  m.def("analytic_csv", &analytic_csv, py::arg("N"), py::arg("t_values"), py::arg("p_grid"));

  // Curves and simulation

  py::class_<EntropyCurve>(m, "EntropyCurve")
      .def(py::init<>())
      .def_readwrite("L", &EntropyCurve::L)
      .def_readwrite("p_values", &EntropyCurve::p_values)
      .def_readwrite("mean_entropy", &EntropyCurve::mean_entropy)
      .def_readwrite("std_dev", &EntropyCurve::std_dev)
      .def_readwrite("std_err", &EntropyCurve::std_err)
      .def_readwrite("n_traj", &EntropyCurve::n_traj)
      .def_readwrite("master_seed", &EntropyCurve::master_seed)
      .def("validate", &EntropyCurve::validate)
      .def("to_csv", &curve_to_csv)
      .def_static("from_csv", &curve_from_csv, py::arg("text"))
      .def(py::self == py::self)
      .def("__len__", &EntropyCurve::size)
      .def("__repr__", [](const EntropyCurve& c) {
        return "EntropyCurve(L=" + std::to_string(c.L) + ", points=" + std::to_string(c.size()) +
               ", n_traj=" + std::to_string(c.n_traj) + ")";
      });
  m.def("read_curve_csv", &read_curve_csv, py::arg("path"));
  m.def("write_curve_csv", &write_curve_csv, py::arg("path"), py::arg("curve"));

  m.def(
      "run_trajectory",
      [](int L, const CartanCoeffs& c, double p, int t_steps, std::uint64_t seed,
         bool record_timeseries) {
        CircuitConfig cfg;
        cfg.L = L;
        cfg.cartan = c;
        cfg.p = p;
        cfg.t_steps = t_steps;
        cfg.seed = seed;
        cfg.record_timeseries = record_timeseries;
        const auto rec = run_trajectory(cfg);
        py::dict out;
        out["final_entropy"] = rec.final_entropy;
        out["entropy_series"] = rec.entropy_series;
        out["n_measurements"] = rec.n_measurements;
        out["seed"] = rec.seed;
        return out;
      },
      py::arg("L"), py::arg("cartan"), py::arg("p"), py::arg("t_steps") = 0,
      py::arg("seed") = 0, py::arg("record_timeseries") = false);

  m.def(
      "sweep",
      [](int L, const CartanCoeffs& c, std::vector<double> p_grid, int n_traj, int t_steps,
         std::uint64_t master_seed, int workers) {
        SweepRequest req;
        req.L = L;
        req.cartan = c;
        req.p_grid = std::move(p_grid);
        req.n_traj = n_traj;
        req.t_steps = t_steps;
        req.master_seed = master_seed;
        req.workers = workers;
        py::gil_scoped_release release;
        return sweep(req);
      },
      py::arg("L"), py::arg("cartan"), py::arg("p_grid"), py::arg("n_traj") = 1500,
      py::arg("t_steps") = 0, py::arg("master_seed") = 0, py::arg("workers") = 1);

  m.def("default_p_grid", &default_p_grid);
  m.def(
      "run_experiment",
      [](const std::string& spec_json, const std::filesystem::path& out_dir, int workers,
         bool reuse) {
        auto spec = spec_from_json(spec_json);
        spec.output_dir = out_dir.string();
        py::gil_scoped_release release;
        return run_experiment(spec, out_dir, workers, reuse);
      },
      py::arg("spec_json"), py::arg("out_dir"), py::arg("workers") = 1, py::arg("reuse") = false);
  m.def(
      "normalize_spec_json",
      [](const std::string& text) { return spec_to_json(spec_from_json(text)); },
      py::arg("spec_json"), "Validated spec with every default written out.");

  // Scaling analysis

  py::class_<CollapseFit>(m, "CollapseFit")
      .def_readonly("p_c", &CollapseFit::p_c)
      .def_readonly("nu", &CollapseFit::nu)
      .def_readonly("p_c_err", &CollapseFit::p_c_err)
      .def_readonly("nu_err", &CollapseFit::nu_err)
      .def_readonly("quality", &CollapseFit::quality)
      .def_readonly("sizes_used", &CollapseFit::sizes_used)
      .def_readonly("converged", &CollapseFit::converged)
      .def_readonly("n_bootstrap", &CollapseFit::n_bootstrap)
      .def("__repr__", [](const CollapseFit& f) {
        return "CollapseFit(p_c=" + format_double(f.p_c) + ", nu=" + format_double(f.nu) + ")";
      });

  m.def(
      "fit_collapse",
      [](const std::vector<EntropyCurve>& curves, std::pair<double, double> p_c_range,
         std::pair<double, double> nu_range, int n_bootstrap, std::uint64_t seed, int workers,
         std::optional<std::pair<double, double>> p_data_range) {
        FitOptions opt;
        opt.p_c_range = {p_c_range.first, p_c_range.second};
        opt.nu_range = {nu_range.first, nu_range.second};
        opt.n_bootstrap = n_bootstrap;
        opt.seed = seed;
        opt.workers = workers;
        if (p_data_range) opt.p_data_range = Interval{p_data_range->first, p_data_range->second};
        py::gil_scoped_release release;
        return fit_collapse(curves, opt);
      },
      py::arg("curves"), py::arg("p_c_range") = std::pair{0.05, 0.6},
      py::arg("nu_range") = std::pair{0.5, 4.0}, py::arg("n_bootstrap") = 100, py::arg("seed") = 0,
      py::arg("workers") = 1, py::arg("p_data_range") = py::none());
  m.def(
      "collapse_quality",
      [](const std::vector<EntropyCurve>& curves, double p_c, double nu) {
        return collapse_quality(curves, p_c, nu);
      },
      py::arg("curves"), py::arg("p_c"), py::arg("nu"));
  m.def(
      "crossing_estimate",
      [](const std::vector<EntropyCurve>& curves) {
        const auto est = crossing_estimate(curves);
        py::dict out;
        out["p_c_approx"] = est.p_c_approx;
        out["band"] = py::make_tuple(est.band.lo, est.band.hi);
        out["crossings"] = est.crossings;
        return out;
      },
      py::arg("curves"));
  m.def(
      "collapsed_points_csv",
      [](const std::vector<EntropyCurve>& curves, double p_c, double nu) {
        return collapsed_points_to_csv(collapsed_points(curves, p_c, nu));
      },
      py::arg("curves"), py::arg("p_c"), py::arg("nu"));
}
