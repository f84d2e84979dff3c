#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "liedyn/errors.hpp"
#include "liedyn/runio.hpp"

namespace py = pybind11;

namespace {

// Accepts {"Omega": [0.1, 0.2, 0.3], "heading": 0.5, ...}: scalars are
// promoted to one-element vectors so single-number fields read naturally.
std::map<std::string, std::vector<double>> initial_fields(const py::dict& initial) {
  std::map<std::string, std::vector<double>> out;
  for (const auto& item : initial) {
    const std::string key = py::cast<std::string>(item.first);
    std::vector<double> values;
    if (py::isinstance<py::float_>(item.second) || py::isinstance<py::int_>(item.second)) {
      values.push_back(py::cast<double>(item.second));
    } else {
      values = py::cast<std::vector<double>>(item.second);
    }
    out[key] = std::move(values);
  }
  return out;
}

liedyn::RunConfig make_config(const std::string& scenario, const std::string& mode, double T,
                              double h, const std::map<std::string, double>& parameters,
                              const py::dict& initial) {
  liedyn::RunConfig config;
  config.scenario = scenario;
  config.mode = mode;
  config.T = T;
  config.h = h;
  config.parameters = parameters;
  config.initial = initial_fields(initial);
  liedyn::validate_config(config);
  return config;
}

}  // namespace

PYBIND11_MODULE(_liedyn, m) {
  m.doc() = "Simulation and constraint-enforcing feedback on product Lie groups";

  py::register_exception<liedyn::ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("version", &liedyn::version_string, "Library version string.");
  m.def("scenario_names", &liedyn::scenario_names, "Registered scenario names.");
  m.def("scenario_parameters", &liedyn::scenario_default_parameters, py::arg("scenario"),
        "Default parameter values of a scenario.");

  m.def(
      "simulate",
      [](const std::string& scenario, const std::string& mode, double T, double h,
         const std::map<std::string, double>& parameters, const py::dict& initial) {
        const liedyn::TrajectoryTable table =
            liedyn::run_table(make_config(scenario, mode, T, h, parameters, initial));
        py::dict out;
        out["columns"] = table.columns;
        out["rows"] = table.rows;
        return out;
      },
      py::arg("scenario"), py::arg("mode"), py::arg("T") = 10.0, py::arg("h") = 1e-3,
      py::arg("parameters") = std::map<std::string, double>{},
      py::arg("initial") = py::dict(),
      "Integrate a scenario and return the trajectory as columns plus rows.");

  m.def(
      "control_input",
      [](const std::string& scenario, const py::dict& initial,
         const std::map<std::string, double>& parameters) {
        const liedyn::ScenarioSpec spec = liedyn::build_scenario(scenario, parameters);
        if (!spec.constraint)
          throw liedyn::ConfigError("scenario",
                                    "scenario '" + spec.name + "' has no constraint");
        liedyn::RunConfig config;
        config.scenario = scenario;
        config.mode = "closed_loop";
        config.parameters = parameters;
        config.initial = initial_fields(initial);
        const liedyn::State state = liedyn::resolve_initial(spec, config);
        const liedyn::ControlOutput out = liedyn::solve_control(
            *spec.constraint, spec.metric, spec.structure, spec.potential, state);
        return std::vector<double>(out.u.data(), out.u.data() + out.u.size());
      },
      py::arg("scenario"), py::arg("initial") = py::dict(),
      py::arg("parameters") = std::map<std::string, double>{},
      "Input coefficients that keep the given state on the scenario's constraint.");

  m.def(
      "verify",
      [](const std::string& scenario, int samples, std::uint64_t seed) {
        const liedyn::ScenarioSpec spec = liedyn::build_scenario(scenario);
        const liedyn::VerifyReport report = liedyn::verify_scenario(spec, samples, seed);
        py::list properties;
        for (const liedyn::PropertyResult& p : report.properties) {
          py::dict entry;
          entry["name"] = p.name;
          entry["pass"] = p.pass;
          entry["worst"] = p.worst;
          entry["tolerance"] = p.tolerance;
          properties.append(entry);
        }
        py::dict out;
        out["scenario"] = report.scenario;
        out["samples"] = report.samples;
        out["seed"] = report.seed;
        out["properties"] = properties;
        out["all_pass"] = report.all_pass;
        return out;
      },
      py::arg("scenario"), py::arg("samples") = 1000, py::arg("seed") = 42,
      "Run the scenario's property suite and return the report as a dict.");
}
