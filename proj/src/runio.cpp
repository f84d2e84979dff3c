#include "liedyn/runio.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "liedyn/errors.hpp"

namespace liedyn {

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string trim(const std::string& s) {
  size_t a = 0;
  size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double to_double(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "not a number: '" + s + "'");
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  for (char c : text) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!item.empty()) out.push_back(item);
      item.clear();
    } else {
      item.push_back(c);
    }
  }
  if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<double> to_vector(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const std::string& item : split_list(text)) out.push_back(to_double(key, item));
  if (out.empty()) throw ConfigError(key, "expected at least one value");
  return out;
}

void assign_formats(RunConfig& config, const std::string& value) {
  std::vector<std::string> formats = split_list(value);
  if (formats.empty()) throw ConfigError("formats", "need at least one of csv, json");
  for (const std::string& f : formats)
    if (f != "csv" && f != "json")
      throw ConfigError("formats", "unknown format '" + f + "'");
  config.formats = std::move(formats);
}

void assign(RunConfig& config, const std::string& section, const std::string& key,
            const std::string& value) {
  if (section.empty()) {
    if (key == "scenario")
      config.scenario = value;
    else if (key == "mode")
      config.mode = value;
    else if (key == "T")
      config.T = to_double("T", value);
    else if (key == "h")
      config.h = to_double("h", value);
    else if (key == "formats")
      assign_formats(config, value);
    else
      throw ConfigError(key, "unknown key");
  } else if (section == "parameters") {
    config.parameters[key] = to_double("parameters." + key, value);
  } else if (section == "initial") {
    config.initial[key] = to_vector("initial." + key, value);
  } else {
    throw ConfigError(section, "unknown section '" + section + "'");
  }
}

void parse_keyvalue_text(RunConfig& config, const std::string& text) {
  std::istringstream stream(text);
  std::string line;
  std::string section;
  while (std::getline(stream, line)) {
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(line, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "parameters" && section != "initial")
        throw ConfigError(section, "unknown section '" + section + "'");
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected key = value");
    assign(config, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void parse_json_text(RunConfig& config, const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError("json", std::string("parse failure: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("json", "top level must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "scenario" || key == "mode") {
      if (!value.is_string()) throw ConfigError(key, "expected a string");
      (key == "scenario" ? config.scenario : config.mode) = value.get<std::string>();
    } else if (key == "T" || key == "h") {
      if (!value.is_number()) throw ConfigError(key, "expected a number");
      (key == "T" ? config.T : config.h) = value.get<double>();
    } else if (key == "formats") {
      if (!value.is_array()) throw ConfigError(key, "expected an array of strings");
      std::string joined;
      for (const auto& item : value) {
        if (!item.is_string()) throw ConfigError(key, "expected an array of strings");
        joined += item.get<std::string>() + ",";
      }
      assign_formats(config, joined);
    } else if (key == "parameters") {
      if (!value.is_object()) throw ConfigError(key, "expected an object");
      for (const auto& [name, num] : value.items()) {
        if (!num.is_number()) throw ConfigError("parameters." + name, "expected a number");
        config.parameters[name] = num.get<double>();
      }
    } else if (key == "initial") {
      if (!value.is_object()) throw ConfigError(key, "expected an object");
      for (const auto& [name, field] : value.items()) {
        std::vector<double> values;
        if (field.is_number()) {
          values.push_back(field.get<double>());
        } else if (field.is_array()) {
          for (const auto& item : field) {
            if (!item.is_number())
              throw ConfigError("initial." + name, "expected numbers");
            values.push_back(item.get<double>());
          }
        } else {
          throw ConfigError("initial." + name, "expected a number or array");
        }
        if (values.empty()) throw ConfigError("initial." + name, "expected at least one value");
        config.initial[name] = std::move(values);
      }
    } else {
      throw ConfigError(key, "unknown key");
    }
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

bool constrained_mode(const std::string& mode) {
  return mode == "nonholonomic" || mode == "closed_loop";
}

int point_width(const HomogeneousPoint& q) {
  return static_cast<int>(flatten(q).size());
}

int factor_width(FactorKind kind) {
  switch (kind) {
    case FactorKind::Rotation: return 9;
    case FactorKind::Translation: return 3;
    case FactorKind::Angle: return 1;
  }
  return 0;
}

std::vector<std::string> column_names(const Signature& sig, int q_width, int mu_rows) {
  std::vector<std::string> cols{"t"};
  for (int i = 0; i < sig.dim(); ++i) cols.push_back("xi_" + std::to_string(i));
  for (int f = 0; f < sig.factor_count(); ++f)
    for (int j = 0; j < factor_width(sig.kind(f)); ++j)
      cols.push_back("g_" + std::to_string(f) + "_" + std::to_string(j));
  for (int j = 0; j < q_width; ++j) cols.push_back("q_" + std::to_string(j));
  cols.push_back("energy");
  cols.push_back("vertical_residual");
  for (int j = 0; j < mu_rows; ++j) cols.push_back("mu_" + std::to_string(j));
  return cols;
}

void append_group(std::vector<double>& row, const GroupElement& g) {
  const Signature& sig = g.signature();
  for (int f = 0; f < sig.factor_count(); ++f) {
    switch (sig.kind(f)) {
      case FactorKind::Rotation: {
        const Mat3 r = g.rotation(f);
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) row.push_back(r(i, j));
        break;
      }
      case FactorKind::Translation: {
        const Vec3 t = g.translation(f);
        for (int i = 0; i < 3; ++i) row.push_back(t[i]);
        break;
      }
      case FactorKind::Angle:
        row.push_back(g.angle(f));
        break;
    }
  }
}

std::vector<double> sample_row(const Sample& s, int mu_rows) {
  std::vector<double> row;
  row.push_back(s.t);
  for (Eigen::Index i = 0; i < s.xi.coeffs.size(); ++i) row.push_back(s.xi.coeffs[i]);
  append_group(row, s.g);
  const Eigen::VectorXd q = flatten(s.q);
  for (Eigen::Index i = 0; i < q.size(); ++i) row.push_back(q[i]);
  row.push_back(s.diagnostics.energy);
  row.push_back(s.diagnostics.vertical_residual);
  for (int j = 0; j < mu_rows; ++j) row.push_back(s.diagnostics.constraint_residuals[j]);
  return row;
}

std::string join_row(const std::vector<double>& row) {
  std::string out;
  for (size_t i = 0; i < row.size(); ++i) {
    if (i) out += ",";
    out += fmt17(row[i]);
  }
  return out;
}

std::string csv_text(const Trajectory& traj, const std::vector<std::string>& cols,
                     int mu_rows) {
  std::string out;
  for (size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ",";
    out += cols[i];
  }
  out += "\n";
  for (const Sample& s : traj.samples) out += join_row(sample_row(s, mu_rows)) + "\n";
  return out;
}

std::string jstr(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += "\"";
  return out;
}

std::string trajectory_json_text(const RunConfig& config, const Trajectory& traj,
                                 const std::vector<std::string>& cols, int mu_rows) {
  std::string out = "{\n";
  out += "\"scenario\": " + jstr(config.scenario) + ",\n";
  out += "\"mode\": " + jstr(config.mode) + ",\n";
  out += "\"scheme\": " + jstr(traj.scheme) + ",\n";
  out += "\"step\": " + fmt17(traj.step) + ",\n";
  out += "\"columns\": [";
  for (size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ", ";
    out += jstr(cols[i]);
  }
  out += "],\n\"rows\": [\n";
  for (size_t i = 0; i < traj.samples.size(); ++i) {
    if (i) out += ",\n";
    out += "[";
    const std::vector<double> row = sample_row(traj.samples[i], mu_rows);
    for (size_t j = 0; j < row.size(); ++j) {
      if (j) out += ", ";
      out += fmt17(row[j]);
    }
    out += "]";
  }
  out += "\n]\n}\n";
  return out;
}

std::string summary_json_text(const RunSummary& summary, const Eigen::VectorXd& q_final) {
  const RunConfig& config = summary.config;
  std::string out = "{\n";
  out += "\"version\": " + jstr(summary.version) + ",\n";
  out += "\"config\": {\n";
  out += "\"scenario\": " + jstr(config.scenario) + ",\n";
  out += "\"mode\": " + jstr(config.mode) + ",\n";
  out += "\"T\": " + fmt17(config.T) + ",\n";
  out += "\"h\": " + fmt17(config.h) + ",\n";
  out += "\"formats\": [";
  for (size_t i = 0; i < config.formats.size(); ++i) {
    if (i) out += ", ";
    out += jstr(config.formats[i]);
  }
  out += "],\n";
  out += "\"strict\": " + std::string(config.strict ? "true" : "false") + ",\n";
  out += "\"parameters\": {";
  size_t n = 0;
  for (const auto& [key, value] : config.parameters) {
    if (n++) out += ", ";
    out += jstr(key) + ": " + fmt17(value);
  }
  out += "},\n\"initial\": {";
  n = 0;
  for (const auto& [key, values] : config.initial) {
    if (n++) out += ", ";
    out += jstr(key) + ": [";
    for (size_t j = 0; j < values.size(); ++j) {
      if (j) out += ", ";
      out += fmt17(values[j]);
    }
    out += "]";
  }
  out += "}\n},\n";
  out += "\"steps\": " + std::to_string(summary.steps) + ",\n";
  out += "\"final\": {\n";
  out += "\"t\": " + fmt17(summary.final_state.t) + ",\n";
  out += "\"xi\": [";
  for (Eigen::Index i = 0; i < summary.final_state.xi.coeffs.size(); ++i) {
    if (i) out += ", ";
    out += fmt17(summary.final_state.xi.coeffs[i]);
  }
  out += "],\n\"g\": [";
  std::vector<double> gflat;
  append_group(gflat, summary.final_state.g);
  for (size_t i = 0; i < gflat.size(); ++i) {
    if (i) out += ", ";
    out += fmt17(gflat[i]);
  }
  out += "],\n\"q\": [";
  for (Eigen::Index i = 0; i < q_final.size(); ++i) {
    if (i) out += ", ";
    out += fmt17(q_final[i]);
  }
  out += "]\n},\n";
  out += "\"diagnostics\": {\n";
  n = 0;
  for (const auto& [key, stat] : summary.diagnostics) {
    if (n++) out += ",\n";
    out += jstr(key) + ": {\"max\": " + fmt17(stat.max) + ", \"mean\": " + fmt17(stat.mean) + "}";
  }
  out += "\n},\n\"budget_violations\": [";
  for (size_t i = 0; i < summary.budget_violations.size(); ++i) {
    if (i) out += ", ";
    out += jstr(summary.budget_violations[i]);
  }
  out += "]\n}\n";
  return out;
}

}  // namespace

RunConfig parse_config(const std::optional<std::string>& path,
                       const std::vector<std::string>& overrides) {
  RunConfig config;
  if (path) {
    const std::string text = read_file(*path);
    if (path->size() >= 5 && path->compare(path->size() - 5, 5, ".json") == 0)
      parse_json_text(config, text);
    else
      parse_keyvalue_text(config, text);
  }
  for (const std::string& entry : overrides) {
    const size_t eq = entry.find('=');
    if (eq == std::string::npos)
      throw ConfigError("--set", "expected key=value, got '" + entry + "'");
    const std::string key = trim(entry.substr(0, eq));
    const std::string value = trim(entry.substr(eq + 1));
    const size_t dot = key.find('.');
    if (dot == std::string::npos)
      assign(config, "", key, value);
    else
      assign(config, key.substr(0, dot), key.substr(dot + 1), value);
  }
  validate_config(config);
  return config;
}

void validate_config(const RunConfig& config) {
  if (config.scenario.empty()) throw ConfigError("scenario", "missing scenario name");
  if (config.mode.empty()) throw ConfigError("mode", "missing run mode");
  const ScenarioSpec spec = build_scenario(config.scenario, config.parameters);
  if (config.mode != "geodesic" && config.mode != "mechanical" &&
      !constrained_mode(config.mode))
    throw ConfigError("mode", "unknown mode '" + config.mode + "'");
  if (constrained_mode(config.mode) && !spec.constraint)
    throw ConfigError("mode", "scenario '" + spec.name + "' has no constraint");
  if (config.mode == "nonholonomic" && spec.constraint->state_dependent)
    throw ConfigError("mode", "nonholonomic mode needs a state-independent constraint");
  if (!(config.T > 0.0)) throw ConfigError("T", "must be positive");
  if (!(config.h > 0.0)) throw ConfigError("h", "must be positive");
  if (config.h > config.T) throw ConfigError("h", "exceeds horizon");
  if (config.formats.empty()) throw ConfigError("formats", "need at least one of csv, json");
  for (const std::string& f : config.formats)
    if (f != "csv" && f != "json")
      throw ConfigError("formats", "unknown format '" + f + "'");
  resolve_initial(spec, config);
}

State resolve_initial(const ScenarioSpec& spec, const RunConfig& config) {
  const Signature sig = spec.structure.signature;
  const auto& fields = config.initial;
  auto fetch = [&fields](const std::string& key, size_t n,
                         std::vector<double>& target) {
    auto it = fields.find(key);
    if (it == fields.end()) return false;
    if (it->second.size() != n)
      throw ConfigError("initial." + key,
                        "expected " + std::to_string(n) + " value" + (n == 1 ? "" : "s"));
    target = it->second;
    return true;
  };

  if (fields.empty()) return default_initial(spec, config.mode);

  if (fields.count("xi")) {
    if (fields.size() != 1)
      throw ConfigError("initial.xi", "conflicts with named initial fields");
    std::vector<double> values;
    fetch("xi", static_cast<size_t>(sig.dim()), values);
    Eigen::VectorXd coeffs(sig.dim());
    for (int i = 0; i < sig.dim(); ++i) coeffs[i] = values[static_cast<size_t>(i)];
    return State{identity(sig), AlgebraVector(sig, std::move(coeffs)), 0.0};
  }

  auto reject_unknown = [&](std::initializer_list<const char*> allowed) {
    for (const auto& [key, values] : fields) {
      bool ok = false;
      for (const char* name : allowed) ok = ok || key == name;
      if (!ok)
        throw ConfigError("initial." + key,
                          "not an initial field of scenario '" + spec.name + "'");
    }
  };

  if (spec.name == "se3_r3") {
    reject_unknown({"omega", "v"});
    State state = default_initial(spec, config.mode);
    std::vector<double> values;
    if (fetch("omega", 3, values))
      state.xi.coeffs.head<3>() = Vec3(values[0], values[1], values[2]);
    if (fetch("v", 3, values))
      state.xi.coeffs.tail<3>() = Vec3(values[0], values[1], values[2]);
    return state;
  }
  if (spec.name == "sphere_on_sphere") {
    reject_unknown({"Omega"});
    std::vector<double> values;
    fetch("Omega", 3, values);
    Eigen::VectorXd coeffs(6);
    coeffs << -values[0], -values[1], 0.0, values[0], values[1], values[2];
    return State{identity(sig), AlgebraVector(sig, std::move(coeffs)), 0.0};
  }
  reject_unknown({"speed", "turn_rate", "heading"});
  double speed = 0.3;
  double turn_rate = 1.0;
  double heading = 0.0;
  std::vector<double> values;
  if (fetch("speed", 1, values)) speed = values[0];
  if (fetch("turn_rate", 1, values)) turn_rate = values[0];
  if (fetch("heading", 1, values)) heading = values[0];
  Eigen::VectorXd coeffs(4);
  coeffs << -speed * std::sin(heading), speed * std::cos(heading), 0.0, turn_rate;
  GroupElement g(sig, {Factor(Mat3(Mat3::Identity())), Factor(heading)});
  return State{std::move(g), AlgebraVector(sig, std::move(coeffs)), 0.0};
}

std::vector<std::string> check_budgets(const std::string& mode,
                                       const std::map<std::string, DiagnosticStat>& stats) {
  std::vector<std::string> out;
  auto it = stats.find("orthonormality_defect");
  if (it != stats.end() && it->second.max > 1e-10)
    out.push_back("orthonormality_defect max " + fmt17(it->second.max) +
                  " exceeds budget 1e-10");
  if (constrained_mode(mode)) {
    it = stats.find("constraint_residual");
    if (it != stats.end() && it->second.max > 1e-6)
      out.push_back("constraint_residual max " + fmt17(it->second.max) +
                    " exceeds budget 1e-06");
  }
  return out;
}

namespace {

SimulationSetup mode_setup(const ScenarioSpec& spec, const std::string& mode,
                           const State& init) {
  RhsFn rhs;
  AnnihilatorFn mu;
  if (mode == "geodesic") {
    rhs = geodesic_rhs(spec.metric);
  } else if (mode == "mechanical") {
    rhs = mechanical_rhs(spec.metric, spec.structure, spec.potential);
  } else if (mode == "nonholonomic") {
    const Subspace d = spec.constraint->d_of_state(init);
    rhs = nonholonomic_rhs(spec.metric, d, spec.structure, spec.potential);
    mu = spec.constraint->mu_of_state;
  } else {
    rhs = closed_loop_rhs(*spec.constraint, spec.metric, spec.structure, spec.potential);
    mu = spec.constraint->mu_of_state;
  }
  return SimulationSetup{rhs, spec.structure, spec.metric, spec.potential, mu};
}

}  // namespace

RunSummary execute_run(const RunConfig& config) {
  validate_config(config);
  const ScenarioSpec spec = build_scenario(config.scenario, config.parameters);
  const State init = resolve_initial(spec, config);
  const SimulationSetup setup = mode_setup(spec, config.mode, init);
  const AnnihilatorFn& mu = setup.mu_of_state;

  const auto start = std::chrono::steady_clock::now();
  const Trajectory traj = simulate(setup, init, config.T, config.h);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

  const int mu_rows =
      mu ? static_cast<int>(traj.samples.front().diagnostics.constraint_residuals.size()) : 0;

  std::map<std::string, DiagnosticStat> stats;
  auto fold = [&stats, &traj](const std::string& name, auto&& value_of) {
    DiagnosticStat stat;
    for (const Sample& s : traj.samples) {
      const double v = value_of(s);
      stat.max = std::max(stat.max, std::abs(v));
      stat.mean += v;
    }
    stat.mean /= static_cast<double>(traj.samples.size());
    stats[name] = stat;
  };
  const double e0 = traj.samples.front().diagnostics.energy;
  fold("energy", [](const Sample& s) { return s.diagnostics.energy; });
  fold("energy_drift", [e0](const Sample& s) {
    return std::abs(s.diagnostics.energy - e0) / std::max(1.0, std::abs(e0));
  });
  fold("vertical_residual", [](const Sample& s) { return s.diagnostics.vertical_residual; });
  fold("orthonormality_defect",
       [](const Sample& s) { return s.diagnostics.orthonormality_defect; });
  if (mu_rows > 0)
    fold("constraint_residual", [](const Sample& s) {
      return s.diagnostics.constraint_residuals.lpNorm<Eigen::Infinity>();
    });

  const Sample& last = traj.samples.back();
  RunSummary summary{State{last.g, last.xi, last.t},
                     static_cast<long>(traj.samples.size()) - 1,
                     std::move(stats),
                     {},
                     elapsed.count(),
                     config,
                     version_string()};
  summary.budget_violations = check_budgets(config.mode, summary.diagnostics);

  namespace fs = std::filesystem;
  const fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "'");

  const std::vector<std::string> cols = column_names(spec.structure.signature,
                                                     point_width(traj.samples.front().q),
                                                     mu_rows);
  for (const std::string& format : config.formats) {
    if (format == "csv")
      write_file(dir / "trajectory.csv", csv_text(traj, cols, mu_rows));
    else
      write_file(dir / "trajectory.json",
                 trajectory_json_text(config, traj, cols, mu_rows));
  }
  write_file(dir / "summary.json", summary_json_text(summary, flatten(last.q)));
  return summary;
}

TrajectoryTable run_table(const RunConfig& config) {
  validate_config(config);
  const ScenarioSpec spec = build_scenario(config.scenario, config.parameters);
  const State init = resolve_initial(spec, config);
  const SimulationSetup setup = mode_setup(spec, config.mode, init);
  const Trajectory traj = simulate(setup, init, config.T, config.h);

  const int mu_rows =
      setup.mu_of_state
          ? static_cast<int>(traj.samples.front().diagnostics.constraint_residuals.size())
          : 0;
  TrajectoryTable table;
  table.columns = column_names(spec.structure.signature,
                               point_width(traj.samples.front().q), mu_rows);
  table.rows.reserve(traj.samples.size());
  for (const Sample& s : traj.samples) table.rows.push_back(sample_row(s, mu_rows));
  return table;
}

VerifyReport run_verify(const std::string& scenario, int samples, std::uint64_t seed,
                        const std::string& out_dir) {
  if (samples < 1) throw ConfigError("samples", "must be at least 1");
  const ScenarioSpec spec = build_scenario(scenario);
  const VerifyReport report = verify_scenario(spec, samples, seed);

  namespace fs = std::filesystem;
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "'");
  write_file(dir / "report.txt", render_report(report));
  return report;
}

std::string list_scenarios_json() {
  std::string out = "{\n\"scenarios\": [\n";
  const std::vector<std::string> names = scenario_names();
  for (size_t i = 0; i < names.size(); ++i) {
    if (i) out += ",\n";
    out += "{\"name\": " + jstr(names[i]) + ", \"parameters\": {";
    size_t n = 0;
    for (const auto& [key, value] : scenario_default_parameters(names[i])) {
      if (n++) out += ", ";
      out += jstr(key) + ": " + fmt17(value);
    }
    out += "}}";
  }
  out += "\n]\n}\n";
  return out;
}

std::string version_string() { return "liedyn 0.1.0"; }

}  // namespace liedyn
