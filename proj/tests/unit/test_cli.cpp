#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "relev/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = relev::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

/// Data rows of a CSV, skipping `# key=value` lines and the column header.
std::vector<std::vector<std::string>> rows(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  bool header = true;
  for (const auto& line : lines(text)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream in(line);
    for (std::string cell; std::getline(in, cell, ',');) cells.push_back(cell);
    out.push_back(cells);
  }
  return out;
}

std::map<std::string, std::string> echo(const std::string& text) {
  std::map<std::string, std::string> out;
  for (const auto& line : lines(text)) {
    if (line.rfind("# ", 0) != 0) continue;
    const auto eq = line.find('=');
    if (eq != std::string::npos) out[line.substr(2, eq - 2)] = line.substr(eq + 1);
  }
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct ThreadsEnv {
  explicit ThreadsEnv(const char* value) { setenv("RELEV_THREADS", value, 1); }
  ~ThreadsEnv() { unsetenv("RELEV_THREADS"); }
};

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("simulate writes one row per arrival") {
    const auto r = invoke({"simulate", "--process", "renewal", "--dist", "exp:rate=1", "--n", "3", "--reps", "1000",
                          "--seed", "7"});
    REQUIRE(r.code == 0);
    const auto data = rows(r.out);
    CHECK(data.size() == 3000);
    CHECK(lines(r.out)[0] == "# relev simulate");
    CHECK(echo(r.out)["seed"] == "7");
    CHECK(data[0][1] == "1");
    for (const auto& row : data) REQUIRE(row.size() == 3);
    CHECK(data.back()[0] == "999");
  }

  TEST_CASE("reruns are byte-identical for any thread count") {
    const std::vector<std::string> args = {"simulate", "--process", "relevation", "--dist", "laixie", "--n", "4",
                                           "--reps", "5000", "--seed", "11"};
    const auto base = invoke(args);
    REQUIRE(base.code == 0);
    CHECK(invoke(args).out == base.out);
    for (const char* threads : {"1", "3", "8"}) {
      ThreadsEnv env(threads);
      CHECK(invoke(args).out == base.out);
    }
    ThreadsEnv bad("zero");
    CHECK(invoke(args).code == relev::cli::kExitConfig);
  }

  TEST_CASE("horizon-stopped simulation and curves") {
    const auto r = invoke({"simulate", "--process", "minimal-repair", "--dist", "gamma:shape=2", "--horizon", "3",
                          "--reps", "200", "--seed", "2"});
    REQUIRE(r.code == 0);
    for (const auto& row : rows(r.out)) CHECK(std::stod(row[2]) <= 3.0);

    const fs::path curves = fs::temp_directory_path() / "relev_cli_curves.csv";
    const auto c = invoke({"simulate", "--process", "yule", "--dist", "exp:rate=1", "--n", "2", "--reps", "2000",
                          "--seed", "4", "--paths", "-", "--curves", curves.string(), "--grid-points", "64"});
    REQUIRE(c.code == 0);
    const auto text = slurp(curves);
    const auto data = rows(text);
    CHECK(data.size() == 128);
    CHECK(echo(text)["delta"] == "0.01");
    for (const auto& row : data) {
      const double s = std::stod(row[1]), lo = std::stod(row[2]), hi = std::stod(row[3]);
      CHECK(lo <= s);
      CHECK(s <= hi);
      CHECK(row[5] == "yule");
    }
    fs::remove(curves);
  }

  TEST_CASE("yule gaps from the command line") {
    const auto r = invoke({"simulate", "--process", "yule", "--dist", "exp:rate=1", "--n", "3", "--reps", "40000",
                          "--seed", "8"});
    REQUIRE(r.code == 0);
    std::vector<double> sum(3, 0.0), prev_time(40000, 0.0);
    for (const auto& row : rows(r.out)) {
      const std::size_t rep = std::stoul(row[0]), k = std::stoul(row[1]);
      const double t = std::stod(row[2]);
      sum[k - 1] += t - (k > 1 ? prev_time[rep] : 0.0);
      prev_time[rep] = t;
    }
    for (std::size_t k = 1; k <= 3; ++k) CHECK(sum[k - 1] / 40000 == doctest::Approx(1.0 / (k + 1)).epsilon(0.03));
    // offset 0 makes the first gap Exp(1)
    const auto z = invoke({"simulate", "--process", "yule", "--dist", "exp:rate=1", "--offset", "0", "--n", "1",
                          "--reps", "40000", "--seed", "8"});
    double first = 0;
    for (const auto& row : rows(z.out)) first += std::stod(row[2]);
    CHECK(first / 40000 == doctest::Approx(1.0).epsilon(0.03));
  }

  TEST_CASE("exit codes") {
    CHECK(invoke({"simulate", "--process", "nope", "--seed", "1"}).code == relev::cli::kExitConfig);
    CHECK(invoke({"simulate", "--process", "renewal", "--dist", "gamma:shape=-1", "--n", "2", "--seed", "1"}).code ==
          relev::cli::kExitConfig);
    CHECK(invoke({"simulate", "--process", "renewal", "--dist", "exp", "--seed", "1"}).code == relev::cli::kExitConfig);
    CHECK(invoke({"frobnicate"}).code == relev::cli::kExitConfig);
    const auto singular = invoke({"relevation-curve", "--dist", "exp:rate=1", "--second", "exp:rate=1", "--t-max",
                                 "700", "--points", "3"});
    CHECK(singular.code == relev::cli::kExitNumeric);
    CHECK(singular.err.find("575.6") != std::string::npos);

    const std::vector<std::string> same = {"compare", "--a", "age", "--b", "age", "--dist", "gamma:shape=2",
                                           "--n-max", "2", "--reps", "2000", "--seed", "1"};
    CHECK(invoke(same).code == relev::cli::kExitOk);
    auto strict = same;
    strict.push_back("--strict");
    CHECK(invoke(strict).code == relev::cli::kExitInconclusive);
  }

  TEST_CASE("compare reports per-n, counting and coupling verdicts") {
    const auto r = invoke({"compare", "--dist", "gamma:shape=2", "--n-max", "3", "--reps", "20000", "--seed", "5",
                          "--t", "1,2", "--coupling"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    REQUIRE(j["per_n"].size() == 3);
    CHECK(j["per_n"][0]["verdict"]["relation"] == "Equal");
    CHECK(j["per_n"][1]["verdict"]["relation"] == "ALessB");
    CHECK(j["per_n"][1]["verdict"]["statistical"] == false);
    CHECK(j["per_n"][2]["verdict"]["statistical"] == true);
    REQUIRE(j["counting"].size() == 2);
    for (const auto& c : j["counting"]) CHECK(c["verdict"]["relation"] == "BLessA");  // N_A(t) >= N_B(t)
    CHECK(j["coupling"]["certificate"] == "ALessB");
    CHECK(j["coupling"]["epb_below"]["violating_paths"] == 0);
    CHECK(j["config"]["seed"] == "5");

    const auto dfr = invoke({"compare", "--dist", "gamma:shape=0.5", "--n-max", "2", "--reps", "2000", "--seed", "5"});
    CHECK(nlohmann::json::parse(dfr.out)["per_n"][1]["verdict"]["relation"] == "BLessA");
  }

  TEST_CASE("figures") {
    const auto cox = invoke({"figure", "cox"});
    REQUIRE(cox.code == 0);
    CHECK(echo(cox.out)["relation"] == "Crossing");
    CHECK(echo(cox.out)["sign_changes"] == "1");
    CHECK(rows(cox.out).size() == 1024);

    const fs::path svg = fs::temp_directory_path() / "relev_cli_cox.svg";
    const auto with_svg = invoke({"figure", "cox", "--svg", svg.string()});
    CHECK(with_svg.out == cox.out);
    const auto picture = slurp(svg);
    CHECK(picture.find("<svg") != std::string::npos);
    CHECK(picture.find("</svg>") != std::string::npos);
    fs::remove(svg);

    CHECK(invoke({"figure", "age"}).code == relev::cli::kExitConfig);  // --seed is required
    const auto age = invoke({"figure", "age", "--seed", "3"});
    REQUIRE(age.code == 0);
    CHECK(echo(age.out)["mr_below_age_band"] == "true");
    CHECK(invoke({"figure", "age", "--seed", "3"}).out == age.out);
  }

  TEST_CASE("ageing and relevation-curve commands") {
    const auto a = invoke({"ageing", "--dist", "laixie"});
    REQUIRE(a.code == 0);
    const auto j = nlohmann::json::parse(a.out);
    CHECK(j["nbu"] == "no");
    CHECK(j["nwu"] == "no");
    CHECK(j["ifr"] == "no");

    const auto c = invoke({"relevation-curve", "--dist", "exp:rate=1", "--second", "exp:rate=2", "--points", "3",
                          "--t-max", "2"});
    REQUIRE(c.code == 0);
    const auto data = rows(c.out);
    REQUIRE(data.size() == 3);
    CHECK(std::stod(data[2][1]) == doctest::Approx(2 * std::exp(-2.0) - std::exp(-4.0)).epsilon(1e-10));
    const auto n3 = invoke({"relevation-curve", "--dist", "weibull:shape=2", "--n", "3", "--points", "2", "--t-max",
                           "1"});
    CHECK(std::stod(rows(n3.out)[1][1]) == doctest::Approx(2.5 * std::exp(-1.0)).epsilon(1e-9));
  }
}
