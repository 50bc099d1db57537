#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "llespec/cli_harness.hpp"

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = llespec::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("llespec_test_" + name);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("eta tables") {
    auto r = run({"eta", "--kappa", "2", "--n-max", "3"});
    CHECK(r.code == 0);
    CHECK(r.out == "n,eta\n1,1\n2,4\n3,9\n");
    r = run({"eta", "--uniform-rate", "1", "--n-max", "4"});
    CHECK(r.out == "n,eta\n1,1\n2,1\n3,1\n4,1\n");
    r = run({"eta", "--atom", "pi:1/2", "--n-max", "2"});
    CHECK(r.out == "n,eta\n1,1\n2,0\n");
  }

  TEST_CASE("exit codes") {
    CHECK(run({"eta", "--n-max", "3"}).code == 2);
    CHECK(run({"eta", "--kappa", "-1"}).code == 2);
    CHECK(run({"eta", "--kappa", "abc"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"spectrum", "--kappa", "1"}).code == 2);  // no truncation and no --n
    CHECK(run({"perturbation", "--delta-kappa", "0.5"}).code == 2);
    CHECK(run({"theorem1", "--eta1", "-1"}).code == 2);
    CHECK(run({"spectrum", "--uniform-rate", "600", "--variant", "bounded", "--m-max", "700", "--json"}).code == 0);
    CHECK(run({"beta2", "--uniform-rate", "600", "--variant", "bounded", "--m-max", "610"}).code == 0);
  }

  TEST_CASE("beta2") {
    auto r = run({"beta2", "--variant", "unbounded", "--kappa", "2"});
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["mode"] == "truncated");
    CHECK(j["N"] == 2);
    CHECK(j["beta2"].get<double>() == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(j["charpoly_max_root"].get<double>() == doctest::Approx(4.0).epsilon(1e-10));

    r = run({"beta2", "--variant", "bounded", "--uniform-rate", "1"});
    j = nlohmann::json::parse(r.out);
    CHECK(j["beta2"].get<double>() == doctest::Approx(0.1701).epsilon(1e-3));
    CHECK(j["descartes_sign_changes"] == 1);

    r = run({"beta2", "--variant", "bounded", "--uniform-rate", "1", "--m-max", "30"});
    j = nlohmann::json::parse(r.out);
    for (const auto& p : j["sequence"]) {
      if (p["M"].get<int>() >= 3) {
        CHECK(std::fabs(p["beta_max"].get<double>() - j["beta2"].get<double>()) < 1e-9);
      }
    }
  }

  TEST_CASE("spectrum") {
    auto r = run({"spectrum", "--kappa", "4/9"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("index,re,im,multiplicity\n", 0) == 0);
    std::istringstream lines(r.out);
    std::string line;
    int rows = 0, doubles = 0;
    std::getline(lines, line);
    while (std::getline(lines, line)) {
      ++rows;
      doubles += line.back() == '2';
    }
    CHECK(rows == 6);
    CHECK(doubles == 4);

    r = run({"spectrum", "--kappa", "3", "--n", "1", "--json"});
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["eigenvalues"].size() == 1);
    CHECK(j["eigenvalues"][0]["re"] == 3.0);

    r = run({"spectrum", "--kappa", "4/9-0.000001", "--n", "6"});
    CHECK(r.code == 2);
    r = run({"spectrum", "--kappa", "0.444443444444444", "--uniform-rate", "0.000018", "--n", "6",
             "--json"});
    REQUIRE(r.code == 0);
    j = nlohmann::json::parse(r.out);
    int complex_count = 0;
    for (const auto& e : j["eigenvalues"]) complex_count += e["im"].get<double>() != 0.0;
    CHECK(complex_count == 4);
  }

  TEST_CASE("sle-converge") {
    auto r = run({"sle-converge", "--kappa", "2", "--m-max", "12", "--json"});
    auto j = nlohmann::json::parse(r.out);
    for (const auto& p : j["sequence"]) {
      CHECK(p["beta_max"].get<double>() == doctest::Approx(4.0).epsilon(1e-10));
    }
    r = run({"sle-converge", "--kappa", "4/9", "--m-max", "20", "--json"});
    j = nlohmann::json::parse(r.out);
    for (const auto& p : j["sequence"]) {
      if (p["M"].get<int>() >= 6) {
        CHECK(p["beta_max"].get<double>() == doctest::Approx(14.0 / 3).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("sle kappa=1 gaps shrink until rounding noise") {
    auto r = run({"sle-converge", "--kappa", "1", "--m-max", "60", "--json"});
    auto j = nlohmann::json::parse(r.out);
    double prev = INFINITY;
    for (const auto& p : j["sequence"]) {
      if (p["gap"].is_null()) continue;
      const double gap = p["gap"].get<double>();
      if (prev > 1e-12) CHECK(gap < prev);
      prev = gap;
    }
  }

  TEST_CASE("fuchs and theorem1") {
    auto r = run({"fuchs", "--kappa", "2"});
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["beta_est"].get<double>() == doctest::Approx(4.0).epsilon(0.02));
    r = run({"fuchs", "--uniform-rate", "1", "--variant", "bounded"});
    j = nlohmann::json::parse(r.out);
    CHECK(j["beta_est"].get<double>() == doctest::Approx(0.1701).epsilon(0.02));
    r = run({"theorem1", "--eta1", "1", "--xi", "0,0.5"});
    j = nlohmann::json::parse(r.out);
    CHECK(j["beta"].get<double>() == doctest::Approx(4.0));
    CHECK(j["rows"].size() == 2);
  }

  TEST_CASE("ple-curve orders rows by lambda") {
    auto r = run({"ple-curve", "--lambda", "8,1", "--lambda", "3"});
    REQUIRE(r.code == 0);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    std::getline(lines, line);
    CHECK(line.rfind("8,", 0) == 0);
    std::getline(lines, line);
    CHECK(line.rfind("1,0.170086", 0) == 0);
  }

  TEST_CASE("perturbation") {
    auto r = run({"perturbation", "--delta-kappa", "1e-6", "--json"});
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["points"][0]["computed"].size() == 6);
    CHECK(j["points"][0]["predicted"].size() == 4);
  }

  TEST_CASE("output files are deterministic") {
    const auto a = temp_file("a.csv"), b = temp_file("b.csv");
    for (const auto& cmd : std::vector<std::vector<std::string>>{
             {"ple-curve", "--lambda", "1,3,8"},
             {"beta2", "--kappa", "1", "--m-max", "25", "--json"},
             {"fuchs", "--kappa", "4/9", "--csv"},
             {"perturbation"}}) {
      auto x = cmd, y = cmd;
      x.insert(x.end(), {"--out", a.string()});
      y.insert(y.end(), {"--out", b.string()});
      REQUIRE(run(x).code == 0);
      REQUIRE(run(y).code == 0);
      CHECK(slurp(a) == slurp(b));
      CHECK_FALSE(slurp(a).empty());
    }
    std::filesystem::remove(a);
    std::filesystem::remove(b);
    CHECK(run({"eta", "--kappa", "1", "--out", "/nonexistent/dir/x.csv"}).code == 2);
  }

  TEST_CASE("eta json round-trips through the formal path") {
    const auto file = temp_file("eta.json");
    REQUIRE(run({"eta", "--kappa", "1", "--atom", "pi/3:0.4", "--n-max", "30", "--json", "--out",
                 file.string()}).code == 0);
    const auto direct = run({"beta2", "--kappa", "1", "--atom", "pi/3:0.4", "--m-max", "30"});
    const auto via_file = run({"beta2", "--eta-file", file.string()});
    REQUIRE(direct.code == 0);
    REQUIRE(via_file.code == 0);
    auto jd = nlohmann::json::parse(direct.out), jf = nlohmann::json::parse(via_file.out);
    CHECK(jd["beta2"] == jf["beta2"]);
    CHECK(jd["sequence"] == jf["sequence"]);

    // Driver JSON is accepted as well.
    std::ofstream(file) << R"({"kappa": 2, "uniform_rate": 0, "atoms": []})";
    auto r = run({"beta2", "--eta-file", file.string()});
    CHECK(nlohmann::json::parse(r.out)["N"] == 2);
    std::ofstream(file) << R"({"eta": [1, -2]})";
    CHECK(run({"beta2", "--eta-file", file.string()}).code == 2);
    CHECK(run({"beta2", "--eta-file", file.string(), "--kappa", "1"}).code == 2);
    std::filesystem::remove(file);
  }
}
