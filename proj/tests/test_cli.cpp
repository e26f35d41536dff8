#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "hdw/cli.hpp"

using namespace hdw;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name)
      : dir(fs::temp_directory_path() / ("hdw_test_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name) << text;
    return (dir / name).string();
  }
};

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::vector<double>> read_csv(const fs::path& p, std::string& header) {
  std::ifstream f(p);
  std::getline(f, header);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(f, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

const char* kOscillator = R"json({
  "chart": {"m": 1, "n": 1},
  "hamiltonian": "(u1^2 + p1_1^2)/2",
  "currents": [{"name": "f", "f": "u1*p1_1"}, {"name": "one", "f": "1"}],
  "points": [{"x1": 0, "u1": 1, "p1_1": 2}]
})json";

}  // namespace

TEST_CASE("parse_point") {
  Binding b = parse_point("x1=0, u1 = 1.5,p1_1=-2e-1");
  CHECK(b.get("u1") == 1.5);
  CHECK(b.get("p1_1") == -0.2);
  CHECK_THROWS_AS(parse_point("u1"), SchemaError);
  CHECK_THROWS_AS(parse_point("u1=abc"), SchemaError);
}

TEST_CASE("bracket command") {
  Scratch s("bracket");
  auto model = s.write("osc.json", kOscillator);
  auto r = cli({"bracket", "--model", model, "--current", "f"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("{f,h}") != std::string::npos);
  CHECK(r.out.find(format_number(3.0)) != std::string::npos);

  auto c = cli({"bracket", "--model", model, "--current", "one", "--at", "x1=1,u1=2,p1_1=3"});
  CHECK(c.code == kExitOk);
  CHECK(c.out.find("{f,h} = 0") != std::string::npos);
  CHECK(c.out.find(" " + format_number(0.0) + "\n") != std::string::npos);

  auto bad = cli({"bracket", "--model", model, "--current", "nope"});
  CHECK(bad.code == kExitUsage);
  CHECK(bad.err.find("available: f, one") != std::string::npos);

  auto field = s.write("wave.json", R"json({
    "model": "wave",
    "currents": [{"name": "momentum", "Y": ["1"], "beta": ["0", "0"]},
                 {"name": "const", "Y": ["0"], "beta": ["2", "3"]}],
    "points": [{"x1": 0, "x2": 0, "u1": 3, "p1_1": 1, "p2_1": 1}]
  })json");
  auto w = cli({"bracket", "--model", field});
  CHECK(w.code == kExitOk);
  CHECK(w.out.find("current momentum") != std::string::npos);
  CHECK(w.out.find("{c,h} = 0") != std::string::npos);
}

TEST_CASE("model file schema") {
  Scratch s("schema");
  auto unknown = s.write("a.json", R"json({"model": "wave", "colour": 1})json");
  auto r = cli({"parse-check", "--model", unknown});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("unknown key 'colour'") != std::string::npos);

  auto nested = s.write("b.json", R"json({"model": {"name": "wave", "speed": 2}})json");
  CHECK(cli({"parse-check", "--model", nested}).code == kExitUsage);

  auto badcur = s.write("c.json", R"json({"model": "wave",
    "currents": [{"name": "c", "Y": ["p1_1"], "beta": ["0", "0"]}]})json");
  auto rc = cli({"parse-check", "--model", badcur});
  CHECK(rc.code == kExitUsage);
  CHECK(rc.err.find("p1_1") != std::string::npos);

  auto syntax = s.write("d.json", R"json({"chart": {"m": 1, "n": 1}, "hamiltonian": "u1 + * 2"})json");
  auto rs = cli({"parse-check", "--model", syntax});
  CHECK(rs.code == kExitUsage);
  CHECK(rs.err.find("offset 5") != std::string::npos);

  CHECK(cli({"parse-check", "--model", (s.dir / "missing.json").string()}).code == kExitUsage);
  CHECK(cli({"parse-check", "--model", s.write("e.json", "{not json")}).code == kExitUsage);

  auto ok = cli({"parse-check", "--model", s.write("f.json", kOscillator)});
  CHECK(ok.code == kExitOk);
  CHECK(ok.out.find("ok") != std::string::npos);

  auto gas1 = s.write("g.json", R"json({"model": {"name": "perfect_gas", "gamma": 1.0}})json");
  CHECK(cli({"parse-check", "--model", gas1}).code == kExitNumeric);

  for (const auto& name : builtin_model_names()) {
    auto p = s.write(name + ".json", "{\"model\": \"" + name + "\"}");
    CAPTURE(name);
    CHECK(cli({"parse-check", "--model", p}).code == kExitOk);
  }
}

TEST_CASE("parse-check on expressions") {
  auto r = cli({"parse-check", "--expr", "u1*0 + x1"});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "x1\n");
  auto e = cli({"parse-check", "--expr", "u1 + * 2"});
  CHECK(e.code == kExitUsage);
  CHECK(e.err.find("offset 5") != std::string::npos);
}

TEST_CASE("usage errors") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({"bracket"}).code == kExitUsage);
  CHECK(cli({"verify", "--levels", "x"}).code == kExitUsage);
  CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("simulate the wave model against the travelling wave") {
  Scratch s("wave");
  auto model = s.write("wave.json", R"json({
    "model": "wave",
    "solver": {"dt": 0.01227184630308513, "K": 128, "t_final": 1.0},
    "initial": {"u": ["sin(x)"], "M": ["-cos(x)"]},
    "output": {"plot": "plot.dat", "plot_stride": 8}
  })json");
  auto r = cli({"simulate", "--model", model, "--out", (s.dir / "out").string()});
  REQUIRE(r.code == kExitOk);
  std::string header;
  auto rows = read_csv(s.dir / "out" / "trajectory.csv", header);
  CHECK(header == "t,x,u1,M1,P1");
  double err = 0.0;
  for (const auto& row : rows) {
    if (std::fabs(row[0] - 1.0) < 1e-12) err = std::max(err, std::fabs(row[2] - std::sin(row[1] - 1.0)));
  }
  CHECK(err > 0.0);
  CHECK(err <= 1e-3);
  auto manifest = nlohmann::json::parse(slurp(s.dir / "out" / "manifest.json"));
  CHECK(manifest["model"] == "wave");
  CHECK(manifest["config"]["reconstruction"] == "closed_form");
  CHECK(manifest["norms"].size() == 3);
  CHECK(fs::exists(s.dir / "out" / "plot.dat"));

  // Byte-stable output.
  const std::string first = slurp(s.dir / "out" / "trajectory.csv");
  const std::string first_manifest = slurp(s.dir / "out" / "manifest.json");
  REQUIRE(cli({"simulate", "--model", model, "--out", (s.dir / "out").string()}).code == kExitOk);
  CHECK(slurp(s.dir / "out" / "trajectory.csv") == first);
  CHECK(slurp(s.dir / "out" / "manifest.json") == first_manifest);
  CHECK(first.find("1.0000000000000000e+00") != std::string::npos);
}

TEST_CASE("simulate zero data and the oscillator") {
  Scratch s("zero");
  auto zero = s.write("z.json", R"json({
    "model": "wave", "solver": {"dt": 0.05, "K": 16, "t_final": 0.2}
  })json");
  REQUIRE(cli({"simulate", "--model", zero, "--out", s.dir.string()}).code == kExitOk);
  std::string header;
  for (const auto& row : read_csv(s.dir / "trajectory.csv", header)) {
    CHECK(row[2] == 0.0);
    CHECK(row[3] == 0.0);
    CHECK(row[4] == 0.0);
  }

  auto osc = s.write("o.json", R"json({
    "model": "td_mechanics",
    "solver": {"dt": 0.01, "t_final": 1.0},
    "initial": {"u": [1.0], "p": [0.0]}
  })json");
  REQUIRE(cli({"simulate", "--model", osc, "--out", s.dir.string()}).code == kExitOk);
  auto rows = read_csv(s.dir / "trajectory.csv", header);
  CHECK(header == "t,u1,p1_1");
  CHECK(rows.size() == 101);
  CHECK(std::fabs(rows.back()[1] - std::cos(1.0)) <= 1e-9);

  auto nosolver = s.write("n.json", R"json({"model": "wave"})json");
  CHECK(cli({"simulate", "--model", nosolver, "--out", s.dir.string()}).code == kExitUsage);
}

TEST_CASE("simulate Yang-Mills keeps E constant") {
  Scratch s("ym");
  auto model = s.write("ym.json", R"json({
    "model": "yang_mills_abelian",
    "solver": {"dt": 0.02, "K": 32, "t_final": 0.5},
    "initial": {"A": ["0.3*sin(x)"], "E": ["0.7"]}
  })json");
  REQUIRE(cli({"simulate", "--model", model, "--out", s.dir.string()}).code == kExitOk);
  std::string header;
  auto rows = read_csv(s.dir / "trajectory.csv", header);
  CHECK(header == "t,x,A1,E1");
  for (const auto& row : rows) CHECK(row[3] == 0.7);
  auto manifest = nlohmann::json::parse(slurp(s.dir / "manifest.json"));
  CHECK(manifest["electric_field_drift"] == 0.0);
}

TEST_CASE("simulate reports numeric failures") {
  Scratch s("numeric");
  auto model = s.write("bad.json", R"json({
    "chart": {"m": 2, "n": 1},
    "hamiltonian": "p1_1^2/2 + exp(p2_1)",
    "solver": {"dt": 0.01, "K": 16, "t_final": 0.1},
    "initial": {"u": ["sin(x)"]}
  })json");
  auto r = cli({"simulate", "--model", model, "--out", s.dir.string()});
  CHECK(r.code == kExitNumeric);
  CHECK(r.err.find("Newton") != std::string::npos);
}

TEST_CASE("verify command") {
  Scratch s("verify");
  auto one = cli({"verify", "--suite", "sharp_roundtrip", "--out", s.dir.string()});
  CHECK(one.code == kExitOk);
  CHECK(one.out.find("PASS sharp_roundtrip") != std::string::npos);
  auto report = nlohmann::json::parse(slurp(s.dir / "verify_report.json"));
  CHECK(report["reports"].size() == 1);
  CHECK(report["status"] == "pass");

  auto bad = cli({"verify", "--suite", "nope"});
  CHECK(bad.code == kExitUsage);
  CHECK(bad.err.find("available") != std::string::npos);

  auto all = cli({"verify", "--json", "--seed", "7"});
  CHECK(all.code == kExitOk);
  auto j = nlohmann::json::parse(all.out);
  CHECK(j["reports"].size() == 11);
  CHECK(j["reports"][0]["seed"] == 7);
}
