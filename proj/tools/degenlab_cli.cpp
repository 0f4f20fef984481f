// degenlab command-line front end. Flags map onto the JSON run configuration;
// `--config file.json` wins over any flag that sets the same key.

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "degenlab/report.hpp"

namespace {

using degenlab::FlagSpec;
using degenlab::Json;

struct Leaf {
  std::string command;
  std::string subcommand;
  CLI::App* app = nullptr;
  // Option storage; std::map keeps references stable while CLI11 holds them.
  std::map<std::string, std::vector<std::string>> values;
  std::vector<std::pair<FlagSpec, CLI::Option*>> flags;
};

std::string dashed(std::string s) {
  for (char& c : s)
    if (c == '_') c = '-';
  return s;
}

Json convert(const FlagSpec& spec, const std::vector<std::string>& raw) {
  auto scalar = [&](const std::string& text) -> Json {
    if (spec.kind == "int" || spec.kind == "int_list") return std::stoll(text);
    if (spec.kind == "number" || spec.kind == "number_list") return std::stod(text);
    if (spec.kind == "bool") return text == "true" || text == "1" || text == "yes" || text == "on";
    if (spec.kind == "extended") {
      std::size_t used = 0;
      try {
        const long long v = std::stoll(text, &used);
        if (used == text.size()) return v;
      } catch (const std::exception&) {
      }
    }
    return text;
  };
  if (spec.kind == "number_list" || spec.kind == "int_list") {
    Json list = Json::array();
    for (const auto& r : raw) list.push_back(scalar(r));
    return list;
  }
  return scalar(raw.back());
}

void register_flags(Leaf& leaf) {
  std::map<std::string, bool> taken;
  for (const FlagSpec& spec : degenlab::flag_specs(leaf.command, leaf.subcommand)) {
    const std::string id = spec.section + "." + spec.key;
    std::string names;
    if (!taken[spec.key]) {
      names = "--" + spec.key;
      if (dashed(spec.key) != spec.key) names += ",--" + dashed(spec.key);
      taken[spec.key] = true;
    } else {
      names = "--" + spec.section + "-" + dashed(spec.key);
    }
    auto& slot = leaf.values[id];
    CLI::Option* opt = leaf.app->add_option(names, slot, spec.section + " " + spec.kind + ": " + spec.help);
    if (spec.kind == "number_list" || spec.kind == "int_list") opt->delimiter(',')->expected(1, -1);
    else opt->expected(1);
    leaf.flags.emplace_back(spec, opt);
  }
}

Json config_from_flags(const Leaf& leaf) {
  Json cfg = Json::object();
  cfg["command"] = leaf.command;
  if (!leaf.subcommand.empty()) cfg["subcommand"] = leaf.subcommand;
  for (const auto& [spec, opt] : leaf.flags) {
    if (opt->count() == 0) continue;
    cfg[spec.section][spec.key] = convert(spec, leaf.values.at(spec.section + "." + spec.key));
  }
  return cfg;
}

// Keys of `over` replace those of `base`, one level into each section.
Json merge(Json base, const Json& over) {
  for (auto it = over.begin(); it != over.end(); ++it) {
    if (it.value().is_object() && base.contains(it.key()) && base[it.key()].is_object()) {
      for (auto jt = it.value().begin(); jt != it.value().end(); ++jt) base[it.key()][jt.key()] = jt.value();
    } else {
      base[it.key()] = it.value();
    }
  }
  return base;
}

const std::map<std::string, std::string>& descriptions() {
  static const std::map<std::string, std::string> text = {
      {"exponents", "derived exponents, flags and regime for (n, p, q, s)"},
      {"coefficients", "integrability norms of a power-log coefficient and the ellipticity aggregate"},
      {"kernel", "radial kernel K_m at given points, optionally with split bounds"},
      {"norm", "power-log radial integral with a cutoff ladder"},
      {"solve", "radial or planar finite-volume solve"},
      {"example", "closed-form counterexamples"},
      {"example eval", "u, u' and f on a radius grid"},
      {"example residual", "strong-form residual of the (u, f) pair"},
      {"example blowup", "u(2^-k) profile and log-log fit"},
      {"example membership", "L^s membership of the source by cutoff ladder"},
      {"verify", "property checks on computed or closed-form solutions"},
      {"verify sup-bound", "sup bound with fitted constant across refinements"},
      {"verify harnack", "Harnack quotient over a coefficient sweep"},
      {"verify holder", "oscillation decay and fitted Holder exponent"},
      {"verify moser-chain", "norm chain L^t -> L^inf"},
      {"verify log-bound", "plateau family against the logarithmic bound"},
      {"report", "bundle of the main checks in one report"},
  };
  return text;
}

std::string describe(const std::string& key) {
  const auto it = descriptions().find(key);
  return it == descriptions().end() ? "" : it->second;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"degenlab: exponent tables, counterexamples and regularity checks for degenerate elliptic equations"};
  app.require_subcommand(1);
  std::string config_path;
  std::string output_dir;
  long long seed = -1;
  bool print_csv = false;
  bool quiet = false;
  app.add_option("--config", config_path, "JSON run configuration; its keys win over flags");
  app.add_option("--output-dir", output_dir, "output directory (DEGENLAB_OUTPUT_DIR overrides it)");
  app.add_option("--seed", seed, "seed for the sweep order");
  app.add_flag("--csv", print_csv, "print sweep.csv instead of report.json");
  app.add_flag("--quiet", quiet, "print nothing on success");
  app.fallthrough();

  std::vector<std::unique_ptr<Leaf>> leaves;
  for (const auto& [command, subs] : degenlab::command_table()) {
    CLI::App* cmd = app.add_subcommand(command, describe(command));
    cmd->fallthrough();
    if (subs.empty()) {
      leaves.push_back(std::make_unique<Leaf>(Leaf{command, "", cmd, {}, {}}));
      register_flags(*leaves.back());
      continue;
    }
    cmd->require_subcommand(1);
    for (const auto& sub : subs) {
      CLI::App* leaf_app = cmd->add_subcommand(sub, describe(command + " " + sub));
      leaf_app->fallthrough();
      leaves.push_back(std::make_unique<Leaf>(Leaf{command, sub, leaf_app, {}, {}}));
      register_flags(*leaves.back());
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "flags: " << e.what() << "\n";
    return 2;
  }

  const Leaf* chosen = nullptr;
  for (const auto& leaf : leaves)
    if (leaf->app->parsed()) chosen = leaf.get();
  if (chosen == nullptr) {
    std::cerr << "command: required\n";
    return 2;
  }

  Json cfg = config_from_flags(*chosen);
  if (!output_dir.empty()) cfg["output_dir"] = output_dir;
  if (seed >= 0) cfg["seed"] = seed;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "config: cannot read " << config_path << "\n";
      return 2;
    }
    Json file;
    try {
      file = Json::parse(in);
    } catch (const Json::parse_error& e) {
      std::cerr << "config: " << e.what() << "\n";
      return 2;
    }
    if (!file.is_object()) {
      std::cerr << "config: must be a JSON object\n";
      return 2;
    }
    cfg = merge(cfg, file);
  }
  return degenlab::run(cfg, std::cerr, quiet ? nullptr : &std::cout, print_csv);
}
