#include "degenlab/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "degenlab/commands.hpp"
#include "degenlab/digest.hpp"
#include "degenlab/errors.hpp"
#include "degenlab/exponents.hpp"

namespace degenlab {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void dump(const Json& v, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += inner + Json(it.key()).dump() + ": ";
        dump(it.value(), indent + 1, out);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out += ",\n";
        out += inner;
        dump(v[i], indent + 1, out);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double d = v.get<double>();
      if (std::isfinite(d)) out += format_number(d);
      else out += "\"" + format_number(d) + "\"";
      return;
    }
    default:
      out += v.dump();
  }
}

}  // namespace

std::string dump_json(const Json& value) {
  std::string out;
  dump(value, 0, out);
  out += "\n";
  return out;
}

std::string CsvTable::render() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
    out += "\n";
  }
  return out;
}

const std::map<std::string, std::vector<std::string>>& command_table() {
  static const std::map<std::string, std::vector<std::string>> table = {
      {"exponents", {}},
      {"coefficients", {}},
      {"kernel", {}},
      {"norm", {}},
      {"solve", {}},
      {"example", {"eval", "residual", "blowup", "membership"}},
      {"verify", {"sup-bound", "harnack", "holder", "moser-chain", "log-bound"}},
      {"report", {}},
  };
  return table;
}

namespace {

enum class Kind { kInt, kNumber, kExtended, kString, kBool, kNumberList, kIntList };

struct Rule {
  const char* key;
  Kind kind;
  Json fallback;                       ///< null means "no default"
  std::optional<double> min = std::nullopt;
  std::optional<double> max = std::nullopt;
  std::vector<std::string> choices = {};
  bool required = false;
};

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::kInt: return "an integer";
    case Kind::kNumber: return "a finite number";
    case Kind::kExtended: return "a number, a rational string or \"inf\"";
    case Kind::kString: return "a string";
    case Kind::kBool: return "a boolean";
    case Kind::kNumberList: return "a non-empty list of finite numbers";
    case Kind::kIntList: return "a non-empty list of integers";
  }
  return "?";
}

bool in_range(double v, const Rule& r) {
  return (!r.min || v >= *r.min) && (!r.max || v <= *r.max);
}

std::string range_text(const Rule& r) {
  std::string s;
  if (r.min) s += ">= " + format_number(*r.min);
  if (r.min && r.max) s += " and ";
  if (r.max) s += "<= " + format_number(*r.max);
  return s;
}

void check_value(const std::string& path, const Json& v, const Rule& r, std::vector<std::string>& errors) {
  auto bad = [&](const std::string& what) { errors.push_back(path + ": " + what); };
  switch (r.kind) {
    case Kind::kInt:
      if (!v.is_number_integer()) return bad(std::string("must be ") + kind_name(r.kind));
      if (!in_range(v.get<double>(), r)) bad("must be " + range_text(r));
      return;
    case Kind::kNumber:
      if (!v.is_number() || !std::isfinite(v.get<double>())) return bad(std::string("must be ") + kind_name(r.kind));
      if (!in_range(v.get<double>(), r)) bad("must be " + range_text(r));
      return;
    case Kind::kExtended: {
      double value = 0.0;
      if (v.is_number()) {
        value = v.get<double>();
      } else if (v.is_string()) {
        try {
          value = Number::parse(v.get<std::string>()).value();
        } catch (const std::exception&) {
          return bad(std::string("must be ") + kind_name(r.kind));
        }
      } else {
        return bad(std::string("must be ") + kind_name(r.kind));
      }
      if (std::isnan(value) || !in_range(value, r)) bad("must be " + range_text(r));
      return;
    }
    case Kind::kString:
      if (!v.is_string()) return bad(std::string("must be ") + kind_name(r.kind));
      if (!r.choices.empty() &&
          std::find(r.choices.begin(), r.choices.end(), v.get<std::string>()) == r.choices.end()) {
        std::string opts;
        for (const auto& c : r.choices) opts += (opts.empty() ? "" : ", ") + c;
        bad("must be one of " + opts);
      }
      return;
    case Kind::kBool:
      if (!v.is_boolean()) bad(std::string("must be ") + kind_name(r.kind));
      return;
    case Kind::kNumberList:
    case Kind::kIntList: {
      if (!v.is_array() || v.empty()) return bad(std::string("must be ") + kind_name(r.kind));
      for (std::size_t i = 0; i < v.size(); ++i) {
        const Json& e = v[i];
        const bool ok = r.kind == Kind::kIntList ? e.is_number_integer() : e.is_number() && std::isfinite(e.get<double>());
        if (!ok) {
          bad(std::string("must be ") + kind_name(r.kind));
          return;
        }
        if (!in_range(e.get<double>(), r)) {
          bad("entries must be " + range_text(r));
          return;
        }
      }
      return;
    }
  }
}

using RuleSet = std::vector<Rule>;

const RuleSet& param_rules() {
  static const RuleSet rules = {
      {"n", Kind::kInt, 3, 2, 64},
      {"p", Kind::kExtended, "inf", std::nextafter(1.0, 2.0), std::nullopt},
      {"q", Kind::kExtended, 2, std::nextafter(1.0, 2.0), 1e300},
      {"s", Kind::kExtended, "inf", 1, std::nullopt},
      {"gamma", Kind::kExtended, 2, std::nextafter(0.0, 1.0), 1e300},
  };
  return rules;
}

const RuleSet& example_rules() {
  static const RuleSet rules = {
      {"id", Kind::kString, "EX1", std::nullopt, std::nullopt, {"EX1", "EX2", "EX3", "BORDERLINE"}},
      {"n", Kind::kInt, 3, 2, 64},
      {"q", Kind::kNumber, 2, std::nextafter(0.0, 1.0), std::nullopt},
      {"theta", Kind::kNumber, nullptr, std::nullopt, std::nullopt},
      {"form", Kind::kString, "verbatim", std::nullopt, std::nullopt, {"verbatim", "derived"}},
  };
  return rules;
}

const RuleSet& solver_rules() {
  static const RuleSet rules = {
      {"r_min", Kind::kNumber, 1e-6, std::nextafter(0.0, 1.0), std::nullopt},
      {"grading", Kind::kNumber, 3, 1, 10},
      {"linear_tolerance", Kind::kNumber, 1e-10, std::nextafter(0.0, 1.0), 1e-4},
      {"max_iterations", Kind::kInt, 20000, 1, 1e8},
      {"inner_bc", Kind::kString, "NO_FLUX", std::nullopt, std::nullopt, {"NO_FLUX", "DIRICHLET_FROM_KERNEL"}},
      {"cells", Kind::kInt, 1024, 2, 1 << 22},
  };
  return rules;
}

const RuleSet& tolerance_rules() {
  static const RuleSet rules = {
      {"quadrature", Kind::kNumber, 1e-10, 1e-15, 1e-2},
      {"kernel", Kind::kNumber, 1e-10, 1e-15, 1e-2},
      {"residual_budget", Kind::kNumber, 1e-4, 0, std::nullopt},
      {"ladder_threshold", Kind::kNumber, 0.01, 0, 1},
      {"fit_quality", Kind::kNumber, 0.9, 0, 1},
      {"gap", Kind::kNumber, 0.05, 0, 1},
  };
  return rules;
}

std::string command_key(const std::string& command, const std::string& sub) {
  return sub.empty() ? command : command + " " + sub;
}

const RuleSet& option_rules(const std::string& key) {
  static const std::map<std::string, RuleSet> table = {
      {"exponents", {}},
      {"coefficients",
       {{"beta", Kind::kNumber, 0, 0, std::nullopt},
        {"theta", Kind::kNumber, 0},
        {"scale", Kind::kNumber, 1, std::nextafter(0.0, 1.0), std::nullopt},
        {"R", Kind::kNumber, 0.25, std::nextafter(0.0, 1.0), std::nullopt}}},
      {"kernel",
       {{"m", Kind::kInt, 1, 1, 3},
        {"x", Kind::kNumberList, Json::array({0.01}), 0, 1e6},
        {"outer_radius", Kind::kNumber, 0.5, std::nextafter(0.0, 1.0), 0.5},
        {"split", Kind::kBool, false}}},
      {"norm",
       {{"a", Kind::kNumber, nullptr, std::nullopt, std::nullopt, {}, true},
        {"b", Kind::kNumber, nullptr, std::nullopt, std::nullopt, {}, true},
        {"r_lo", Kind::kNumber, 0, 0, 0.5},
        {"r_hi", Kind::kNumber, 0.5, std::nextafter(0.0, 1.0), 0.5}}},
      {"solve",
       {{"geometry", Kind::kString, "radial", std::nullopt, std::nullopt, {"radial", "planar"}},
        {"R", Kind::kNumber, 1, std::nextafter(0.0, 1.0), std::nullopt},
        {"beta", Kind::kNumber, 0, 0, std::nullopt},
        {"theta", Kind::kNumber, 0},
        {"scale", Kind::kNumber, 1, std::nextafter(0.0, 1.0), std::nullopt},
        {"source", Kind::kString, "constant", std::nullopt, std::nullopt, {"constant", "example", "plateau"}},
        {"source_value", Kind::kNumber, 1},
        {"plateau_radius", Kind::kNumber, 0.05, std::nextafter(0.0, 1.0), std::nullopt},
        {"outer_value", Kind::kNumber, 0},
        {"boundary", Kind::kString, "constant", std::nullopt, std::nullopt, {"constant", "x1", "example"}}}},
      {"example eval", {{"radii", Kind::kNumberList, Json::array({0.01, 0.05, 0.1, 0.25}), 0, 0.5}}},
      {"example residual",
       {{"r_a", Kind::kNumber, 0.01, std::nextafter(0.0, 1.0), 0.5},
        {"r_b", Kind::kNumber, 0.25, std::nextafter(0.0, 1.0), 0.5},
        {"nodes", Kind::kInt, 64, 16, 100000},
        {"relative_step", Kind::kNumber, 1e-5, 1e-9, 0.01}}},
      {"example blowup",
       {{"kmax", Kind::kInt, 30, 4, 60}, {"fit_lo", Kind::kInt, 10, 2, 60}, {"fit_hi", Kind::kInt, 30, 2, 60}}},
      {"example membership",
       {{"s", Kind::kNumber, nullptr, 1, std::nullopt, {}, true},
        {"first_decade", Kind::kInt, 1, 1, 15},
        {"last_decade", Kind::kInt, 8, 1, 15},
        {"per_decade", Kind::kInt, 2, 1, 20}}},
      {"verify sup-bound",
       {{"beta", Kind::kNumber, 0, 0, std::nullopt},
        {"theta", Kind::kNumber, 0},
        {"R", Kind::kNumber, nullptr, std::nextafter(0.0, 1.0), std::nullopt},
        {"ball_fraction", Kind::kNumber, 0.5, std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)},
        {"source", Kind::kString, "constant", std::nullopt, std::nullopt, {"constant", "example_truncated"}},
        {"source_value", Kind::kNumber, 1},
        {"truncation_k", Kind::kIntList, Json::array({6, 10, 14, 18}), 2, 40}}},
      {"verify harnack",
       {{"betas", Kind::kNumberList, Json::array({0.5, 1.0, 1.4}), 0, std::nullopt},
        {"thetas", Kind::kNumberList, Json::array({0.0, 0.5, 1.0})},
        {"R", Kind::kNumber, 0.25, std::nextafter(0.0, 1.0), 0.5},
        {"source_value", Kind::kNumber, 1, 0, std::nullopt}}},
      {"verify holder",
       {{"solution", Kind::kString, "smooth", std::nullopt, std::nullopt, {"smooth", "example", "affine"}},
        {"center", Kind::kNumberList, Json::array({0.0, 0.0})},
        {"R", Kind::kNumber, 0.125, std::nextafter(0.0, 1.0), 0.5},
        {"levels", Kind::kInt, 8, 0, 40}}},
      {"verify moser-chain",
       {{"solution", Kind::kString, "smooth", std::nullopt, std::nullopt, {"smooth", "example"}},
        {"gamma0", Kind::kNumber, 2, std::nextafter(0.0, 1.0), std::nullopt},
        {"M", Kind::kInt, 10, 1, 12}}},
      {"verify log-bound",
       {{"members", Kind::kIntList, Json::array({8, 16, 32, 64, 128, 256, 512, 1024}), 1, 1e9},
        {"c", Kind::kNumber, 0.25, std::nextafter(0.0, 1.0), std::nullopt},
        {"R", Kind::kNumber, 0.25, std::nextafter(0.0, 1.0), std::nullopt},
        {"beta", Kind::kNumber, 1.5, 0, std::nullopt},
        {"theta", Kind::kNumber, 2.0 / 3.0}}},
      {"report", {}},
  };
  static const RuleSet empty;
  const auto it = table.find(key);
  return it == table.end() ? empty : it->second;
}

void check_section(const Json& config, const char* name, const RuleSet& rules, std::vector<std::string>& errors) {
  static const Json none = Json::object();
  const Json& section = config.contains(name) ? config.at(name) : none;
  if (!section.is_object()) {
    errors.push_back(std::string(name) + ": must be an object");
    return;
  }
  for (auto it = section.begin(); it != section.end(); ++it) {
    const auto rule = std::find_if(rules.begin(), rules.end(), [&](const Rule& r) { return it.key() == r.key; });
    if (rule == rules.end()) {
      errors.push_back(std::string(name) + "." + it.key() + ": unknown key");
      continue;
    }
    if (it.value().is_null() && !rule->required) continue;
    check_value(std::string(name) + "." + it.key(), it.value(), *rule, errors);
  }
  for (const Rule& r : rules)
    if (r.required && (!section.contains(r.key) || section.at(r.key).is_null()))
      errors.push_back(std::string(name) + "." + r.key + ": required");
}

Json fill_section(const Json& config, const char* name, const RuleSet& rules) {
  Json out = Json::object();
  const Json given = config.contains(name) ? config.at(name) : Json::object();
  for (const Rule& r : rules) {
    if (given.contains(r.key) && !given.at(r.key).is_null()) out[r.key] = given.at(r.key);
    else if (!r.fallback.is_null()) out[r.key] = r.fallback;
  }
  return out;
}

}  // namespace

std::vector<FlagSpec> flag_specs(const std::string& command, const std::string& subcommand) {
  static const std::map<std::string, std::vector<std::string>> sections = {
      {"exponents", {"params"}},
      {"coefficients", {"params", "tolerances"}},
      {"kernel", {"tolerances"}},
      {"norm", {"tolerances"}},
      {"solve", {"params", "solver", "example", "tolerances"}},
      {"example", {"example", "tolerances"}},
      {"verify", {"params", "solver", "example", "tolerances"}},
      {"report", {"params", "example", "solver", "tolerances"}},
  };
  auto kind_text = [](Kind k) {
    switch (k) {
      case Kind::kInt: return "int";
      case Kind::kNumber: return "number";
      case Kind::kExtended: return "extended";
      case Kind::kString: return "string";
      case Kind::kBool: return "bool";
      case Kind::kNumberList: return "number_list";
      case Kind::kIntList: return "int_list";
    }
    return "string";
  };
  std::vector<FlagSpec> out;
  auto add = [&](const char* section, const RuleSet& rules) {
    for (const Rule& r : rules) {
      FlagSpec f{section, r.key, kind_text(r.kind), kind_name(r.kind), r.required};
      if (!r.choices.empty()) {
        std::string opts;
        for (const auto& c : r.choices) opts += (opts.empty() ? "" : "|") + c;
        f.help = opts;
      }
      if (!r.fallback.is_null()) f.help += ", default " + (r.fallback.is_string() ? r.fallback.get<std::string>()
                                                                                  : r.fallback.dump());
      out.push_back(std::move(f));
    }
  };
  add("options", option_rules(command_key(command, subcommand)));
  const auto it = sections.find(command);
  if (it == sections.end()) return out;
  for (const auto& s : it->second) {
    if (s == "params") add("params", param_rules());
    if (s == "example") add("example", example_rules());
    if (s == "solver") add("solver", solver_rules());
    if (s == "tolerances") add("tolerances", tolerance_rules());
  }
  return out;
}

std::vector<std::string> validate_config(const Json& config) {
  std::vector<std::string> errors;
  if (!config.is_object()) return {"config: must be a JSON object"};
  static const std::vector<std::string> top = {"command", "subcommand", "schema_version", "params", "example",
                                               "solver",  "tolerances", "options",       "output_dir", "seed"};
  for (auto it = config.begin(); it != config.end(); ++it)
    if (std::find(top.begin(), top.end(), it.key()) == top.end()) errors.push_back(it.key() + ": unknown key");

  std::string command;
  std::string sub;
  if (!config.contains("command") || !config.at("command").is_string()) {
    errors.push_back("command: required string");
  } else {
    command = config.at("command").get<std::string>();
    const auto it = command_table().find(command);
    if (it == command_table().end()) {
      errors.push_back("command: unknown command '" + command + "'");
      command.clear();
    } else if (!it->second.empty()) {
      if (!config.contains("subcommand") || !config.at("subcommand").is_string()) {
        errors.push_back("subcommand: required for '" + command + "'");
        command.clear();
      } else {
        sub = config.at("subcommand").get<std::string>();
        if (std::find(it->second.begin(), it->second.end(), sub) == it->second.end()) {
          errors.push_back("subcommand: unknown subcommand '" + sub + "' for '" + command + "'");
          command.clear();
        }
      }
    } else if (config.contains("subcommand")) {
      errors.push_back("subcommand: '" + command + "' takes no subcommand");
    }
  }
  if (config.contains("schema_version") &&
      (!config.at("schema_version").is_number_integer() || config.at("schema_version").get<int>() != kSchemaVersion))
    errors.push_back("schema_version: must be " + std::to_string(kSchemaVersion));
  if (config.contains("output_dir") && !config.at("output_dir").is_string())
    errors.push_back("output_dir: must be a string");
  if (config.contains("seed") &&
      (!config.at("seed").is_number_integer() || config.at("seed").get<long long>() < 0))
    errors.push_back("seed: must be a non-negative integer");
  check_section(config, "params", param_rules(), errors);
  check_section(config, "example", example_rules(), errors);
  check_section(config, "solver", solver_rules(), errors);
  check_section(config, "tolerances", tolerance_rules(), errors);
  if (!command.empty()) check_section(config, "options", option_rules(command_key(command, sub)), errors);
  return errors;
}

Json normalize_config(const Json& config) {
  Json out = Json::object();
  const std::string command = config.at("command").get<std::string>();
  const std::string sub = config.contains("subcommand") ? config.at("subcommand").get<std::string>() : "";
  out["schema_version"] = kSchemaVersion;
  out["command"] = command;
  if (!sub.empty()) out["subcommand"] = sub;
  out["params"] = fill_section(config, "params", param_rules());
  out["example"] = fill_section(config, "example", example_rules());
  out["solver"] = fill_section(config, "solver", solver_rules());
  out["tolerances"] = fill_section(config, "tolerances", tolerance_rules());
  out["options"] = fill_section(config, "options", option_rules(command_key(command, sub)));
  out["output_dir"] = config.value("output_dir", std::string("degenlab-out"));
  out["seed"] = config.value("seed", 0LL);
  return out;
}

RunOutput execute(const Json& normalized) {
  RunOutput out;
  Json& report = out.report;
  report["schema_version"] = kSchemaVersion;
  report["command"] = normalized.at("command");
  if (normalized.contains("subcommand")) report["subcommand"] = normalized.at("subcommand");
  Json echo = normalized;
  echo.erase("output_dir");
  report["config"] = echo;
  try {
    CommandResult result = run_command(normalized);
    report["result"] = std::move(result.result);
    report["status"] = "ok";
    out.sweep = std::move(result.sweep);
    out.exit_code = 0;
  } catch (const std::exception& e) {
    report["status"] = "error";
    report["diagnostic"] = e.what();
    out.exit_code = 1;
  }
  return out;
}

namespace {

std::string columns_markdown(const CsvTable& table, const std::string& command) {
  std::string out = "# sweep.csv columns\n\nWritten by `" + command + "`.\n\n| column | meaning |\n|---|---|\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    std::string desc;
    for (char c : i < table.descriptions.size() ? table.descriptions[i] : std::string())
      desc += c == '|' ? std::string("\\|") : std::string(1, c);
    out += "| `" + table.columns[i] + "` | " + desc + " |\n";
  }
  return out;
}

}  // namespace

int run(const Json& config, std::ostream& err, std::ostream* echo_to, bool echo_csv) {
  const auto started = std::chrono::steady_clock::now();
  const std::vector<std::string> errors = validate_config(config);
  if (!errors.empty()) {
    for (const auto& e : errors) err << e << "\n";
    return 2;
  }
  const Json normalized = normalize_config(config);
  std::string dir = normalized.at("output_dir").get<std::string>();
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') dir = env;

  RunOutput output = execute(normalized);
  if (output.exit_code != 0) err << "error: " << output.report.value("diagnostic", std::string("unknown")) << "\n";

  // Single writer: every file is rendered first, then written in a fixed order.
  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("report.json", dump_json(output.report));
  const std::string command = normalized.contains("subcommand")
                                  ? normalized.at("command").get<std::string>() + " " +
                                        normalized.at("subcommand").get<std::string>()
                                  : normalized.at("command").get<std::string>();
  if (output.sweep) {
    files.emplace_back("sweep.csv", output.sweep->render());
    files.emplace_back("COLUMNS.md", columns_markdown(*output.sweep, command));
  }
  Json manifest;
  manifest["schema_version"] = kSchemaVersion;
  manifest["command"] = command;
  Json echo = normalized;
  echo.erase("output_dir");
  manifest["config"] = echo;
  manifest["config_digest"] = sha256_hex(dump_json(echo));
  Json digests = Json::object();
  for (const auto& [name, body] : files) digests[name] = sha256_hex(body);
  manifest["digests"] = digests;
  manifest["status"] = output.report.at("status");
  manifest["wall_time_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  files.emplace_back("manifest.json", dump_json(manifest));

  try {
    std::filesystem::create_directories(dir);
    for (const auto& [name, body] : files) {
      std::ofstream f(std::filesystem::path(dir) / name, std::ios::binary | std::ios::trunc);
      if (!f) throw Error("cannot open " + (std::filesystem::path(dir) / name).string() + " for writing");
      f << body;
      if (!f) throw Error("write failed for " + name);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  if (echo_to != nullptr) {
    const std::string& shown = echo_csv && output.sweep ? files[1].second : files[0].second;
    *echo_to << shown;
    if (!shown.empty() && shown.back() != '\n') *echo_to << "\n";
  }
  return output.exit_code;
}

}  // namespace degenlab
