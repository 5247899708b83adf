#include <catch_amalgamated.hpp>

#include <sstream>

#include "gfspec/cli.hpp"

using namespace gfspec;
using namespace gfspec::cli;
using Catch::Approx;

namespace {

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("registry names are stable") {
  std::vector<std::string> names;
  for (const auto& e : registry()) names.push_back(e.name);
  const std::vector<std::string> golden{"delta_pow",       "delta_deriv",    "heaviside",
                                        "osc",             "wave1d",         "semilinear:dissipative",
                                        "semilinear:sqrt", "semilinear:log", "blowup",
                                        "rauch_reed",      "classify",       "zero",
                                        "eps_power"};
  CHECK(names == golden);
  CHECK(names.size() >= 9);
  CHECK(list_experiments().find("semilinear:log") != std::string::npos);
  CHECK_THROWS_AS(find_experiment("nope"), ConfigError);
}

TEST_CASE("every registered experiment builds with defaults") {
  for (const auto& e : registry()) {
    ExperimentConfig c;
    c.experiment = e.name;
    finalize(c);
    const Net net = c.build_net();
    INFO(e.name);
    CHECK(net.dim() == static_cast<int>(c.region.box.size()));
    const CompactRegion K = c.compact_region();
    const Point mid = K.box.center();
    CHECK(std::isfinite(net.value(mid, 0.05)));
    const Target t = parse_target(c.target);
    if (t.kind == Target::Kind::cp) CHECK(t.p <= net.max_order());
  }
}

TEST_CASE("net specifications") {
  auto [a, pa] = parse_net_spec("delta_pow:m=3");
  CHECK(a == "delta_pow");
  CHECK(pa.at("m") == 3.0);
  auto [b, pb] = parse_net_spec("semilinear:log:m=1,k=-1");
  CHECK(b == "semilinear:log");
  CHECK(pb.at("k") == -1.0);
  auto [c, pc] = parse_net_spec("semilinear:sqrt");
  CHECK(c == "semilinear:sqrt");
  CHECK(pc.empty());
  CHECK_THROWS_AS(parse_net_spec("delta_pow:m=two"), ConfigError);
  CHECK(parse_net_spec("delta_pow:m").first == "delta_pow:m");
  CHECK_THROWS_AS(find_experiment(parse_net_spec("delta_pow:m").first), ConfigError);
  CHECK_THROWS_AS(parse_net_spec("m=2"), ConfigError);
}

TEST_CASE("targets") {
  CHECK(parse_target("C0").p == 0);
  CHECK(parse_target("c2").p == 2);
  CHECK(parse_target("Dprime").kind == Target::Kind::dprime);
  CHECK(parse_target("dprime").kind == Target::Kind::dprime);
  CHECK_THROWS_AS(parse_target("C"), ConfigError);
  CHECK_THROWS_AS(parse_target("C9"), ConfigError);
  CHECK_THROWS_AS(parse_target("L2"), ConfigError);
}

TEST_CASE("config parsing fills defaults and validates") {
  const ExperimentConfig c = parse_config(json::parse(R"({"experiment": "delta_pow", "net": "delta_pow:m=3"})"));
  CHECK(c.params.at("m") == 3.0);
  CHECK(c.target == "C0");
  CHECK(c.region.points == std::vector<int>{81});
  CHECK(c.schedule.n == 24);

  const ExperimentConfig w = parse_config(json::parse(
      R"({"net": {"id": "wave1d", "params": {"c1": 1}}, "region": {"box": [[-1, 1], [0.5, 1.5]], "points": 9}})"));
  CHECK(w.region.points == std::vector<int>{9, 9});
  CHECK(w.params.at("c1") == 1.0);
  CHECK(w.target == "Dprime");

  CHECK_THROWS_AS(parse_config(json::parse(R"({"experiment": "delta_pow", "colour": 1})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"net": "delta_pow:m=9"})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"net": "delta_pow:q=1"})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"net": "delta_pow:m=1.5"})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"net": "delta_pow", "region": {"box": [[-1, 1]], "points": 10}})")),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"net": "delta_pow", "region": {"box": [[1, -1]], "points": 9}})")),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"net": "delta_pow", "schedule": {"rho": 1.5}})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"net": "delta_pow", "scale": {"id": "log"}})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"net": "delta_pow", "target": "C7"})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"target": "C0"})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"([1, 2])")), ConfigError);
}

TEST_CASE("canonical serialization") {
  json j;
  j["b"] = 1.5;
  j["a"] = {{"z", 2}, {"y", std::numeric_limits<double>::infinity()}};
  j["c"] = json::array({1.0, "x"});
  const std::string s = canonical_dump(j);
  CHECK(s == "{\n  \"a\": {\n    \"y\": \"inf\",\n    \"z\": 2\n  },\n  \"b\": 1.500000e+00,\n"
             "  \"c\": [1.000000e+00, \"x\"]\n}\n");
  CHECK(format_double(-0.25) == "-2.500000e-01");
}

TEST_CASE("delta squared spectrum report") {
  ExperimentConfig c = parse_config(json::parse(R"({"net": "delta_pow:m=2", "scale": {"exponents": [1, 2, 3]}})"));
  const RunResult r = run(c);
  const json& rep = r.report;
  CHECK(rep.at("schema_version") == "1.0");
  CHECK(rep.at("tool").at("name") == "gfspec");
  CHECK(rep.at("summary").at("grid_points") == 81);
  CHECK(rep.at("summary").at("max_R").get<double>() == Approx(2.0).margin(0.15));

  // the nonempty fibers form one contiguous run around x = 0
  std::vector<int> idx;
  const json& pts = rep.at("points");
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (pts[i].at("endpoint") != "empty") idx.push_back(static_cast<int>(i));
  REQUIRE_FALSE(idx.empty());
  CHECK(idx.back() - idx.front() + 1 == static_cast<int>(idx.size()));
  const auto ext = rep.at("summary").at("singular_support_extent");
  CHECK(ext[0][0].get<double>() <= 0.0);
  CHECK(ext[0][1].get<double>() >= 0.0);
  CHECK(ext[0][1].get<double>() - ext[0][0].get<double>() <= 0.5);
  const json& centre = pts[40];
  CHECK(centre.at("x")[0].get<double>() == 0.0);
  CHECK(centre.at("fiber_membership")[0].at("in_fiber") == true);
  CHECK(centre.at("fiber_membership")[2].at("in_fiber") == false);

  // the CSV carries the same fibers row by row
  const auto rows = csv_rows(r.csv);
  REQUIRE(rows.size() == pts.size() + 1);
  CHECK(rows[0][0] == "x");
  CHECK(rows[0][1] == "R");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& row = rows[i + 1];
    CHECK(std::stod(row[0]) == Approx(pts[i].at("x")[0].get<double>()).margin(1e-6));
    CHECK(std::stod(row[1]) == Approx(pts[i].at("R").get<double>()).epsilon(1e-6).margin(1e-12));
    CHECK(row[2] == pts[i].at("endpoint").get<std::string>());
    CHECK(row[3] == pts[i].at("classification").get<std::string>());
  }

  // reruns are byte-identical
  CHECK(canonical_dump(run(c).report) == canonical_dump(rep));
  CHECK(run(c).csv == r.csv);
}

TEST_CASE("zero net report has only empty fibers") {
  ExperimentConfig c = parse_config(json::parse(R"({"experiment": "zero"})"));
  const json rep = run(c).report;
  CHECK(rep.at("summary").at("nonempty_fibers") == 0);
  CHECK(rep.at("summary").at("singular_support_extent").is_null());
}

TEST_CASE("valuation and classification reports") {
  ExperimentConfig c = parse_config(json::parse(
      R"({"net": "delta_pow:m=1", "region": {"box": [[-0.5, 0.5]], "points": 33}})"));
  const json v = valuation_report(c, 1);
  CHECK(v.at("valuation").get<double>() == Approx(2.0).margin(0.1));
  CHECK_THROWS_AS(valuation_report(c, 99), ConfigError);

  ExperimentConfig k = parse_config(json::parse(R"({"experiment": "classify"})"));
  const json rep = run(k).report;
  const json& cases = rep.at("classifications");
  REQUIRE(cases.size() == 4);
  CHECK(cases[0].at("class") == "g_infinity_with_m");
  CHECK(cases[0].at("m") == 1);
  CHECK(cases[1].at("class") == "total_slow_scale");
  CHECK(cases[2].at("class") == "neither");
  CHECK(cases[3].at("class") == "neither");
}
