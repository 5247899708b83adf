#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gfspec/cli.hpp"

namespace {

using namespace gfspec;
using namespace gfspec::cli;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::vector<double> split_numbers(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(std::string("could not parse ") + what + " '" + s + "'");
    }
  }
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open '" + path + "' for writing");
  f << text;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") std::cout << text;
  else write_file(path, text);
}

json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config '" + path + "'");
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

struct CommonArgs {
  std::string net;
  std::string box;
  int nx = 0, nt = 0;
  double eps_max = 0.1, rho = 0.6;
  int neps = 24;
  long long seed = 0;
  std::string out, csv;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_grid) {
  cmd->add_option("--net", a.net, "net spec, e.g. delta_pow:m=2");
  cmd->add_option("--eps-max", a.eps_max, "largest epsilon of the schedule");
  cmd->add_option("--rho", a.rho, "schedule ratio in (0,1)");
  cmd->add_option("--neps", a.neps, "number of epsilon samples");
  cmd->add_option("--seed", a.seed, "recorded in the report; the pipeline is deterministic");
  cmd->add_option("--out", a.out, "JSON output path (default stdout)");
  if (with_grid) {
    cmd->add_option("--nx", a.nx, "grid points along x");
    cmd->add_option("--nt", a.nt, "grid points along t (2-D nets)");
  }
}

ExperimentConfig config_from_args(const CommonArgs& a, const std::string& target, const std::string& box_text) {
  ExperimentConfig c;
  auto [id, params] = parse_net_spec(a.net);
  c.net_id = id;
  c.experiment = id;
  c.params = params;
  c.target = target;
  c.schedule = EpsilonSchedule{a.eps_max, a.rho, a.neps};
  c.seed = a.seed;
  if (!box_text.empty()) {
    const auto v = split_numbers(box_text, "box");
    if (v.size() != 2 && v.size() != 4) throw ConfigError("--box needs 2 or 4 numbers");
    for (std::size_t i = 0; i < v.size(); i += 2) c.region.box.emplace_back(v[i], v[i + 1]);
    const ExperimentEntry& e = find_experiment(id);
    const int nx = a.nx > 0 ? a.nx : e.default_region.points[0];
    c.region.points.push_back(nx);
    if (v.size() == 4) c.region.points.push_back(a.nt > 0 ? a.nt : nx);
  }
  finalize(c);
  if (box_text.empty() && (a.nx > 0 || a.nt > 0)) {
    if (a.nx > 0) c.region.points[0] = a.nx;
    if (a.nt > 0 && c.region.points.size() > 1) c.region.points[1] = a.nt;
    finalize(c);
  }
  return c;
}

void write_run(const ExperimentConfig& c, const std::string& out, const std::string& csv) {
  const RunResult r = run(c);
  emit(canonical_dump(r.report), out.empty() ? c.json_out : out);
  const std::string csv_path = csv.empty() ? c.csv_out : csv;
  if (!csv_path.empty()) {
    if (r.csv.empty()) throw ConfigError("this experiment has no CSV encoding");
    write_file(csv_path, r.csv);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gfspec: asymptotic singular spectra of generalized functions"};
  app.require_subcommand(1);

  CommonArgs sa;
  std::string config_path, target = "C0", csv_path;
  auto* spectrum = app.add_subcommand("spectrum", "estimate the singular spectrum over a grid");
  spectrum->add_option("--config", config_path, "experiment config (JSON)");
  spectrum->add_option("--target", target, "C<p> or Dprime");
  spectrum->add_option("--box", sa.box, "lo,hi or xlo,xhi,tlo,thi");
  spectrum->add_option("--csv", csv_path, "CSV output path");
  add_common(spectrum, sa, true);

  CommonArgs va;
  std::string k_box;
  int l = 0;
  auto* valuation = app.add_subcommand("valuation", "estimate the (K,l)-valuation of a net");
  valuation->add_option("--k", k_box, "compact set K as lo,hi or xlo,xhi,tlo,thi")->required();
  valuation->add_option("--l", l, "seminorm order");
  add_common(valuation, va, true);

  CommonArgs ca;
  std::string c_box;
  int l_max = 4;
  auto* classify = app.add_subcommand("classify", "classify a net as G-infinity, slow-scale or neither");
  classify->add_option("--lmax", l_max, "highest derivative order probed");
  classify->add_option("--k", c_box, "compact set K");
  add_common(classify, ca, true);

  std::string example_name, example_csv;
  std::vector<std::string> example_params;
  CommonArgs ea;
  auto* example = app.add_subcommand("example", "run a registered experiment with its defaults");
  example->add_option("name", example_name, "experiment name (see list)")->required();
  example->add_option("--param", example_params, "parameter override key=value")->take_all();
  example->add_option("--csv", example_csv, "CSV output path");
  example->add_option("--out", ea.out, "JSON output path (default stdout)");
  example->add_option("--seed", ea.seed, "recorded in the report");

  app.add_subcommand("list", "list registered experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (app.got_subcommand("list")) {
      std::cout << list_experiments();
      return 0;
    }
    if (spectrum->parsed()) {
      ExperimentConfig c;
      if (!config_path.empty()) {
        c = parse_config(load_json(config_path));
        if (spectrum->count("--seed")) c.seed = sa.seed;
      } else {
        if (sa.net.empty()) throw ConfigError("spectrum needs --config or --net");
        c = config_from_args(sa, target, sa.box);
      }
      write_run(c, sa.out, csv_path);
      return 0;
    }
    if (valuation->parsed()) {
      if (va.net.empty()) throw ConfigError("valuation needs --net");
      const ExperimentConfig c = config_from_args(va, "C0", k_box);
      emit(canonical_dump(valuation_report(c, l)), va.out);
      return 0;
    }
    if (classify->parsed()) {
      if (ca.net.empty()) throw ConfigError("classify needs --net");
      if (l_max < 0 || l_max > kDefaultMaxOrder) throw ConfigError("--lmax out of range");
      const ExperimentConfig c = config_from_args(ca, "C0", c_box);
      emit(canonical_dump(classify_report(c, l_max)), ca.out);
      return 0;
    }
    if (example->parsed()) {
      std::string spec = example_name;
      for (std::size_t i = 0; i < example_params.size(); ++i) spec += (i ? "," : ":") + example_params[i];
      ExperimentConfig c;
      auto [id, params] = parse_net_spec(spec);
      c.experiment = id;
      c.net_id = id;
      c.params = params;
      c.seed = ea.seed;
      finalize(c);
      write_run(c, ea.out, example_csv);
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "gfspec: configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "gfspec: invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalFailure& e) {
    std::cerr << "gfspec: numerical failure at x=(" << e.where()[0] << ", " << e.where()[1] << "), eps=" << e.eps()
              << ": " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "gfspec: numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
