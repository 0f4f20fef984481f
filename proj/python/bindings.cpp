#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "degenlab/counterexamples.hpp"
#include "degenlab/digest.hpp"
#include "degenlab/errors.hpp"
#include "degenlab/exponents.hpp"
#include "degenlab/kernel.hpp"
#include "degenlab/report.hpp"

namespace py = pybind11;
using namespace degenlab;

namespace {

ExampleSpec example(const std::string& id, int n, double q) {
  const auto parsed = parse_example_id(id);
  if (!parsed) throw DomainError("unknown example id '" + id + "'");
  return ExampleSpec::make(*parsed, n, q);
}

// Divergent evaluations map to +inf.
double value_of(const quad::QuadratureResult& r) { return r.divergent() ? HUGE_VAL : r.value; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Compiled core of degenlab";
  m.attr("__version__") = "0.1.0";
  m.attr("SCHEMA_VERSION") = kSchemaVersion;

  // Translators run newest first, so the base class goes first.
  py::register_exception<Error>(m, "ComputationError", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  m.def("validate_config", [](const std::string& text) { return validate_config(Json::parse(text)); },
        py::arg("config_json"), "Schema errors of a JSON configuration, empty when valid.");

  m.def(
      "execute",
      [](const std::string& text) {
        const Json config = Json::parse(text);
        const auto errors = validate_config(config);
        if (!errors.empty()) {
          std::string joined;
          for (const auto& e : errors) joined += (joined.empty() ? "" : "; ") + e;
          throw DomainError(joined);
        }
        const Json normalized = normalize_config(config);
        RunOutput out;
        {
          py::gil_scoped_release release;
          out = execute(normalized);
        }
        return py::make_tuple(dump_json(out.report), out.sweep ? py::object(py::str(out.sweep->render())) : py::none(),
                              out.exit_code);
      },
      py::arg("config_json"), "Run a configuration in memory; returns (report_json, sweep_csv or None, exit_code).");

  m.def(
      "run",
      [](const std::string& text) {
        std::ostringstream err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = run(Json::parse(text), err);
        }
        return py::make_tuple(code, err.str());
      },
      py::arg("config_json"), "Validate, execute and write the output directory; returns (exit_code, stderr).");

  m.def("sha256_hex", [](const std::string& data) { return sha256_hex(data); }, py::arg("data"));

  m.def(
      "critical_source_exponent", &critical_source_exponent, py::arg("n"), py::arg("q"),
      "s0 = nq/(2q - n); NaN when undefined.");

  m.def(
      "kernel", [](int order, double x, double tol) { return value_of(kernel_direct(order, x, tol)); },
      py::arg("m"), py::arg("x"), py::arg("tol") = 1e-10);

  m.def(
      "eval_u",
      [](const std::string& id, int n, double q, double r, double tol) {
        return value_of(eval_u(example(id, n, q), r, tol));
      },
      py::arg("id"), py::arg("n"), py::arg("q"), py::arg("r"), py::arg("tol") = 1e-10);

  m.def(
      "eval_f",
      [](const std::string& id, int n, double q, double r, bool derived, double tol) {
        return value_of(eval_f(example(id, n, q), r, tol, derived ? SourceForm::kDerived : SourceForm::kVerbatim));
      },
      py::arg("id"), py::arg("n"), py::arg("q"), py::arg("r"), py::arg("derived") = false, py::arg("tol") = 1e-10);
}
