#include <pybind11/functional.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fracpoh/pohozaev.hpp"
#include "fracpoh/runner.hpp"
#include "fracpoh/serialize.hpp"
#include "fracpoh/solve.hpp"
#include "fracpoh/trace.hpp"

namespace py = pybind11;
using namespace fracpoh;

namespace {

Point as_point(const std::vector<double>& v) {
  Point p = Point::Zero();
  for (size_t i = 0; i < std::min<size_t>(2, v.size()); ++i) p[i] = v[i];
  return p;
}

py::dict report_dict(const PohozaevReport& r) {
  py::dict d;
  d["check"] = r.check;
  d["lhs_volume"] = r.lhs_volume;
  d["rhs_volume"] = r.rhs_volume;
  d["rhs_boundary"] = r.rhs_boundary;
  d["residual_abs"] = r.residual_abs;
  d["residual_rel"] = r.residual_rel;
  d["boundary_gross"] = r.boundary_gross;
  d["equation_residual"] = r.equation_residual;
  return d;
}

}  // namespace

PYBIND11_MODULE(_fracpoh, m) {
  m.doc() = "Dirichlet problems for homogeneous integro-differential operators: "
            "solvers, boundary traces, and Pohozaev identity checks";

  py::register_exception<parameter_error>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<numerical_error>(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception<io_error>(m, "IOError", PyExc_IOError);

  m.def("frac_constant", &frac_constant, py::arg("n"), py::arg("s"));
  m.def("torsion_constant", &torsion_constant, py::arg("n"), py::arg("s"));
  m.def("critical_exponent", &critical_exponent, py::arg("n"), py::arg("s"));

  py::class_<Kernel>(m, "Kernel")
      .def_static("fractional", &Kernel::fractional, py::arg("n"), py::arg("s"))
      .def_static(
          "sampled",
          [](int n, double s, const std::vector<double>& values) {
            return Kernel::make(n, s, AngularDensity::sampled_density(values, n));
          },
          py::arg("n"), py::arg("s"), py::arg("values"))
      .def_readonly("dim", &Kernel::dim)
      .def_readonly("order", &Kernel::order)
      .def_property_readonly("kappa",
                             [](const Kernel& k) { return k.constants.kappa; })
      .def_property_readonly("c_frac",
                             [](const Kernel& k) { return k.constants.c_frac; })
      .def("anisotropy", [](const Kernel& k, const std::vector<double>& nu) {
        return anisotropy(k, as_point(nu));
      });

  py::class_<Domain>(m, "Domain")
      .def_static("interval", &Domain::interval, py::arg("a"), py::arg("b"),
                  py::arg("distance_cap") = 0.0)
      .def_static(
          "ball",
          [](const std::vector<double>& center, double radius, double cap) {
            return Domain::ball(as_point(center), radius, cap);
          },
          py::arg("center"), py::arg("radius"), py::arg("distance_cap") = 0.0)
      .def_static(
          "ellipse",
          [](const std::vector<double>& center, double ax, double ay, double cap) {
            return Domain::ellipse(as_point(center), ax, ay, cap);
          },
          py::arg("center"), py::arg("ax"), py::arg("ay"),
          py::arg("distance_cap") = 0.0)
      .def_static("annulus", &Domain::annulus, py::arg("r_in"), py::arg("r_out"),
                  py::arg("distance_cap") = 0.0)
      .def("distance",
           [](const Domain& d, const std::vector<double>& x) {
             return d.distance(as_point(x));
           })
      .def("star_shape_margin",
           [](const Domain& d, const std::vector<double>& origin) {
             return star_shape_margin(d, as_point(origin));
           })
      .def_property_readonly("area", &Domain::area)
      .def_property_readonly("inradius", &Domain::inradius);

  py::class_<Grid, std::shared_ptr<Grid>>(m, "Grid")
      .def_property_readonly("size", [](const Grid& g) { return g.size(); })
      .def_property_readonly(
          "nodes",
          [](const Grid& g) {
            Matrix out(g.size(), 2);
            for (size_t i = 0; i < g.size(); ++i) out.row(i) = g.nodes[i];
            return out;
          })
      .def_property_readonly("weights", [](const Grid& g) { return g.weights; });

  m.def(
      "build_grid",
      [](const Domain& d, int n, double grading) {
        return std::make_shared<Grid>(build_grid(d, n, grading));
      },
      py::arg("domain"), py::arg("resolution"), py::arg("grading") = 2.0);

  py::class_<GridFunction>(m, "GridFunction")
      .def_property_readonly("values",
                             [](const GridFunction& u) { return u.values; })
      .def("__call__", [](const GridFunction& u, const std::vector<double>& x) {
        return u.eval(as_point(x));
      });

  py::class_<OperatorMatrix, std::shared_ptr<OperatorMatrix>>(m, "Operator")
      .def_property_readonly("size", [](const OperatorMatrix& o) { return o.size(); })
      .def("apply", &OperatorMatrix::apply)
      .def("entry", &OperatorMatrix::entry);

  m.def(
      "assemble",
      [](const Kernel& k, std::shared_ptr<Grid> g) {
        return std::make_shared<OperatorMatrix>(assemble(k, *g));
      },
      py::arg("kernel"), py::arg("grid"));

  m.def(
      "solve_torsion",
      [](std::shared_ptr<OperatorMatrix> op) {
        auto res = solve_linear(*op, Vector::Ones(op->size()));
        return GridFunction(op->grid, std::move(res.u));
      },
      "solve Lu = 1 with the exterior zero condition");

  m.def(
      "solve_linear",
      [](std::shared_ptr<OperatorMatrix> op, const Vector& g) {
        auto res = solve_linear(*op, g);
        return GridFunction(op->grid, std::move(res.u));
      },
      py::arg("operator"), py::arg("g"));

  m.def(
      "solve_power",
      [](std::shared_ptr<OperatorMatrix> op, double p) {
        auto res = solve_power(*op, p);
        py::dict d;
        d["u"] = GridFunction(op->grid, std::move(res.u));
        d["equation_residual"] = res.equation_residual;
        d["multiplier"] = res.multiplier;
        return d;
      },
      py::arg("operator"), py::arg("p"));

  m.def(
      "solve_eigen",
      [](std::shared_ptr<OperatorMatrix> op, int index) {
        auto res = solve_eigen(*op, index);
        py::dict d;
        d["value"] = res.value;
        d["function"] = GridFunction(op->grid, std::move(res.function));
        d["residual"] = res.residual;
        return d;
      },
      py::arg("operator"), py::arg("index") = 1);

  m.def(
      "trace_quotient",
      [](const GridFunction& u, double order, const std::vector<double>& z,
         const std::vector<double>& nu) {
        TraceSample ts =
            trace_quotient(u, *u.grid->domain, order, as_point(z), as_point(nu));
        py::dict d;
        d["quotient"] = ts.quotient;
        d["fit_residual"] = ts.fit_residual;
        d["ladder_t"] = ts.ladder_t;
        d["ladder_q"] = ts.ladder_q;
        return d;
      },
      py::arg("u"), py::arg("order"), py::arg("z"), py::arg("nu"));

  m.def(
      "verify_poh1",
      [](std::shared_ptr<OperatorMatrix> op, const GridFunction& u,
         const std::function<double(double, double, double)>& f) {
        PointwiseRhs rhs = [f](const Point& x, double val) {
          return f(x[0], x[1], val);
        };
        return report_dict(verify_poh1(*op, u, rhs));
      },
      py::arg("operator"), py::arg("u"), py::arg("f"));

  m.def(
      "nonexistence_verdict",
      [](double p, const Kernel& k, const Domain& d) {
        ObstructionVerdict v = nonexistence_verdict(p, k, d);
        py::dict out;
        out["p"] = v.p;
        out["p_critical"] = v.p_critical;
        out["coefficient"] = v.coefficient;
        out["sign_class"] = v.sign_class == ObstructionVerdict::SignClass::subcritical
                                ? "subcritical"
                                : (v.sign_class == ObstructionVerdict::SignClass::critical
                                       ? "critical"
                                       : "supercritical");
        out["star_margin"] = v.star_margin;
        out["verdict"] = v.verdict;
        return out;
      },
      py::arg("p"), py::arg("kernel"), py::arg("domain"));

  m.def(
      "run_config",
      [](const std::string& path, const std::string& out_dir) {
        ExperimentConfig cfg = ExperimentConfig::load(path);
        RunOutcome outcome = cfg.sweep ? sweep(cfg) : run(cfg);
        write_outputs(outcome, cfg, out_dir);
        py::dict d;
        d["all_passed"] = outcome.all_passed;
        py::list rows;
        for (const ReportRow& r : outcome.rows) {
          py::dict rr;
          rr["check"] = r.check;
          rr["residual_rel"] = r.residual_rel;
          rr["value"] = r.value;
          rr["passed"] = r.passed;
          rows.append(rr);
        }
        d["rows"] = rows;
        return d;
      },
      py::arg("path"), py::arg("out_dir") = std::string("out"));

#ifdef VERSION_INFO
  m.attr("__version__") = VERSION_INFO;
#else
  m.attr("__version__") = "dev";
#endif
}
