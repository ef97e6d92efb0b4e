#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "oracles.hpp"
#include "polyspectra/cli.hpp"

using namespace polyspectra;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path workdir() {
  const fs::path dir(POLYSPECTRA_CLI_WORKDIR);
  fs::create_directories(dir);
  return dir;
}

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_temp(const std::string& name, const std::string& text) {
  const fs::path p = workdir() / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

}  // namespace

TEST_CASE("eigs prints a table and optional JSON") {
  const Result r = run({"eigs", "--input", oracle::fixture("example6.json")});
  REQUIRE(r.code == kExitOk);
  std::istringstream lines(r.out);
  std::string header;
  std::getline(lines, header);
  CHECK(header.find("alg") != std::string::npos);
  int rows = 0;
  for (std::string line; std::getline(lines, line);) {
    std::istringstream f(line);
    double re = 0.0;
    double im = 0.0;
    int alg = 0;
    int geo = 0;
    f >> re >> im >> alg >> geo;
    CHECK(alg == 2);
    CHECK(geo == 1);
    ++rows;
  }
  CHECK(rows == 2);

  const fs::path out = workdir() / "eigs7.json";
  REQUIRE(run({"eigs", "--input", oracle::fixture("example7.json"), "--json", out.string()}).code == kExitOk);
  const json doc = json::parse(read(out));
  CHECK(doc["eigenvalues"].size() == 6);
  for (const auto& e : doc["eigenvalues"]) CHECK(e["algebraic"] == 1);
}

TEST_CASE("field writes a CSV with the fixed header and one SVG layer per epsilon") {
  const fs::path csv = workdir() / "field6.csv";
  const fs::path svg = workdir() / "field6.svg";
  const Result r = run({"field", "--input", oracle::fixture("example6.json"), "--grid", "41", "31", "--csv",
                        csv.string(), "--svg", svg.string()});
  REQUIRE(r.code == kExitOk);
  std::istringstream lines(read(csv));
  std::string line;
  std::getline(lines, line);
  CHECK(line == "x,y,value");
  int rows = 0;
  std::getline(lines, line);
  ++rows;
  // 17 significant digits survive a text round trip
  const std::string first_value = line.substr(line.rfind(',') + 1);
  CHECK(std::stod(first_value) == doctest::Approx(oracle::s_min(oracle::load("example6.json").p, Complex(0.2, -1.0)) /
                                                  (1.0 + std::abs(Complex(0.2, -1.0)) + std::norm(Complex(0.2, -1.0))))
                                      .epsilon(1e-14));
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 41 * 31);

  const std::string plot = read(svg);
  CHECK(plot.find("<svg") != std::string::npos);
  for (const char* label : {"eps=0.005", "eps=0.0091", "eps=0.02", "eps=0.03"}) {
    CHECK(plot.find(label) != std::string::npos);
  }
  const json doc = json::parse(r.out);
  CHECK(doc["epsilons"].size() == 4);
}

TEST_CASE("components merge just above the rounded 0.0091") {
  const Result r = run({"components", "--input", oracle::fixture("example6.json")});
  REQUIRE(r.code == kExitOk);
  const json doc = json::parse(r.out);
  std::vector<int> counts;
  for (const auto& rep : doc["reports"]) counts.push_back(rep["count"]);
  // the merge level is 0.0091055, so 0.0091 itself still shows two touching components
  CHECK(counts == std::vector<int>{2, 2, 1, 1});
  const Result above = run({"components", "--input", oracle::fixture("example6.json"), "--eps", "0.00911"});
  REQUIRE(above.code == kExitOk);
  CHECK(json::parse(above.out)["reports"][0]["count"] == 1);
}

TEST_CASE("outputs are deterministic") {
  const fs::path a = workdir() / "det_a.csv";
  const fs::path b = workdir() / "det_b.csv";
  const fs::path ja = workdir() / "det_a.json";
  const fs::path jb = workdir() / "det_b.json";
  REQUIRE(run({"field", "--input", oracle::fixture("example7.json"), "--grid", "51", "51", "--csv", a.string(),
               "--json", ja.string(), "--threads", "1"})
              .code == kExitOk);
  REQUIRE(run({"field", "--input", oracle::fixture("example7.json"), "--grid", "51", "51", "--csv", b.string(),
               "--json", jb.string(), "--threads", "4"})
              .code == kExitOk);
  CHECK(read(a) == read(b));
  CHECK(read(ja) == read(jb));
  CHECK_FALSE(read(a).empty());
}

TEST_CASE("trace writes closed curves for a disc") {
  const fs::path csv = workdir() / "trace.csv";
  const Result r = run({"trace", "--input", oracle::fixture("scalar_disc.json"), "--csv", csv.string()});
  REQUIRE(r.code == kExitOk);
  const json doc = json::parse(r.out);
  REQUIRE(doc["curves"].size() == 1);
  CHECK(doc["curves"][0]["closed"] == true);
  std::istringstream lines(read(csv));
  std::string line;
  std::getline(lines, line);
  CHECK(line == "curve_id,x,y");
  double deviation = 0.0;
  while (std::getline(lines, line)) {
    double id = 0.0;
    double x = 0.0;
    double y = 0.0;
    char comma = 0;
    std::istringstream f(line);
    f >> id >> comma >> x >> comma >> y;
    deviation = std::max(deviation, std::abs(std::abs(Complex(x, y) - Complex(0.5, 0.25)) - 0.5));
  }
  CHECK(deviation < 1e-6);
}

TEST_CASE("faults lists refined points") {
  const Result r = run({"faults", "--input", oracle::fixture("example3.json")});
  REQUIRE(r.code == kExitOk);
  const json doc = json::parse(r.out);
  REQUIRE(doc["points"].size() == 1);
  CHECK(std::hypot(doc["points"][0]["re"].get<double>(), doc["points"][0]["im"].get<double>()) < 1e-4);

  const Result e4 = run({"faults", "--input", oracle::fixture("example4.json")});
  REQUIRE(e4.code == kExitOk);
  CHECK(json::parse(e4.out)["empty"] == true);
}

TEST_CASE("distance and perturb serialize certificates") {
  const Result d = run({"distance", "--input", oracle::fixture("diag_pm1.json"), "--eps-max", "2"});
  REQUIRE(d.code == kExitOk);
  const json doc = json::parse(d.out);
  CHECK(std::abs(doc["r"].get<double>() - 1.0) < 1e-3);

  const Result d6 = run({"distance", "--input", oracle::fixture("example6.json")});
  REQUIRE(d6.code == kExitOk);
  const json doc6 = json::parse(d6.out);
  CHECK(std::abs(doc6["r"].get<double>() - 0.0091) < 2e-4);
  const json& q = doc6["certificate"]["q_hat"]["coefficients"];
  REQUIRE(q.size() == 3);
  CHECK(std::abs(q[2]["re"][0][0].get<double>() - 0.9969) < 1e-3);
  CHECK(std::abs(q[1]["re"][1][1].get<double>() + 4.0031) < 1e-3);
  CHECK(doc6["certificate"]["defective"] == true);
  CHECK(d6.err.find("warning:") != std::string::npos);

  const Result p = run({"perturb", "--input", oracle::fixture("scalar_disc.json"), "--mu", "3", "0"});
  REQUIRE(p.code == kExitOk);
  CHECK(json::parse(p.out)["certificate"]["defective"] == false);
}

TEST_CASE("exit codes") {
  CHECK(run({"eigs", "--input", "/nonexistent.json"}).code == kExitOther);
  CHECK(run({"bogus", "--input", oracle::fixture("example6.json")}).code == kExitParse);
  CHECK(run({"eigs"}).code == kExitParse);

  const fs::path broken = write_temp("broken.json", R"({"n": 1, "coefficients": []})");
  const Result r = run({"eigs", "--input", broken.string()});
  CHECK(r.code == kExitParse);
  CHECK(r.err.find("$.m") != std::string::npos);

  const fs::path singular = write_temp("singular.json", R"({"n": 2, "m": 1, "coefficients": [
    {"re": [[1, 0], [0, 1]], "im": [[0, 0], [0, 0]]},
    {"re": [[1, 0], [0, 0]], "im": [[0, 0], [0, 0]]}], "weight": {"mode": "unit"}})");
  CHECK(run({"eigs", "--input", singular.string()}).code == kExitNumerical);

  CHECK(run({"perturb", "--input", oracle::fixture("scalar_disc.json"), "--mu", "0.5", "0.25"}).code ==
        kExitPrecondition);
  CHECK(run({"distance", "--input", oracle::fixture("diag_pm1.json"), "--eps-max", "0.5"}).code == kExitNumerical);
}

TEST_CASE("failed commands write nothing and successful ones list their outputs") {
  const fs::path csv = workdir() / "never.csv";
  fs::remove(csv);
  CHECK(run({"field", "--input", oracle::fixture("example6.json"), "--grid", "1", "1", "--csv", csv.string()}).code !=
        kExitOk);
  CHECK_FALSE(fs::exists(csv));
  const fs::path json_out = workdir() / "never.json";
  fs::remove(json_out);
  CHECK(run({"distance", "--input", oracle::fixture("diag_pm1.json"), "--eps-max", "0.5", "--json",
             json_out.string()})
            .code == kExitNumerical);
  CHECK_FALSE(fs::exists(json_out));

  const fs::path report = workdir() / "report.json";
  const fs::path svg = workdir() / "report.svg";
  REQUIRE(run({"faults", "--input", oracle::fixture("example5.json"), "--grid", "61", "61", "--svg", svg.string(),
               "--report", report.string()})
              .code == kExitOk);
  const json rep = json::parse(read(report));
  CHECK(rep["command"] == "faults");
  CHECK(rep["input_digest"].is_string());
  for (const auto& path : rep["outputs"]) {
    CHECK(fs::exists(path.get<std::string>()));
    CHECK(fs::file_size(path.get<std::string>()) > 0);
  }
  for (const auto& entry : fs::directory_iterator(workdir())) CHECK(entry.path().extension() != ".tmp");
}
