#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "heiscr/cli.hpp"
#include "heiscr/error.hpp"
#include "test_support.hpp"

#include <json.hpp>

using namespace heiscr;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

const char* kFbeta = R"({"kind":"fbeta","n":1,"nu":2,"beta":4})";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("parse_point examples") {
    HPoint a = parse_point("1,0,0", 1);
    CHECK(a.z(0) == Complex(1, 0));
    CHECK(a.t() == 0.0);
    HPoint b = parse_point("1,0,0,1,3", 2);
    CHECK(b.z(0) == Complex(1, 0));
    CHECK(b.z(1) == Complex(0, 1));
    CHECK(b.t() == 3.0);
    CHECK(parse_point(" -1.5e-3 , 2 ,0.25", 1).z(0) == Complex(-1.5e-3, 2));
  }

  TEST_CASE("parse_point errors carry the position") {
    CHECK_THROWS_AS(parse_point("1,0", 1), ParseError);
    CHECK_THROWS_AS(parse_point("1,0,0,0", 1), ParseError);
    CHECK_THROWS_AS(parse_point("", 1), ParseError);
    try {
      parse_point("1,abc,0", 1);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      std::string m = e.what();
      CHECK(m.find("abc") != std::string::npos);
      CHECK(m.find("2") != std::string::npos);
    }
  }

  TEST_CASE("format_point round-trips exactly") {
    CounterRng rng(21, 1);
    for (int n = 1; n <= 3; ++n) {
      for (int k = 0; k < 1000; ++k) {
        HPoint a = heiscr::testing::random_point(rng, n, 1e3 * rng.uniform());
        CHECK(parse_point(format_point(a), n) == a);
      }
    }
  }

  TEST_CASE("eval prints f_beta at the origin") {
    auto r = run({"eval", "--field", kFbeta, "--point", "0,0,0"});
    CHECK(r.code == 0);
    CHECK(r.out == "0.25\n");
    auto j = run({"eval", "--field", kFbeta, "--point", "0,0,0", "--format", "json"});
    CHECK(nlohmann::json::parse(j.out)["value"] == 0.25);
  }

  TEST_CASE("kelvin at the symmetric radius reproduces the field") {
    // lambda(0) = sqrt(4) = 2
    auto a = run({"kelvin", "--field", kFbeta, "--point", "0.5,0.25,1", "--xi", "0,0,0",
                  "--lambda", "2", "--beta", "4"});
    auto b = run({"eval", "--field", kFbeta, "--point", "0.5,0.25,1"});
    REQUIRE(a.code == 0);
    CHECK(std::stod(a.out) == doctest::Approx(std::stod(b.out)).epsilon(1e-12));
  }

  TEST_CASE("field specs from a file") {
    auto path = std::filesystem::temp_directory_path() / "heiscr_cli_field.json";
    std::ofstream(path) << kFbeta;
    auto r = run({"eval", "--field", path.string(), "--point", "0,0,0"});
    CHECK(r.code == 0);
    CHECK(r.out == "0.25\n");
    std::filesystem::remove(path);
  }

  TEST_CASE("usage and input errors exit 2") {
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"eval", "--point", "0,0,0"}).code == 2);
    auto bad = run({"eval", "--field", R"({"kind":"fbeta","n":1,"nu":2})", "--point", "0,0,0"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("beta") != std::string::npos);
    auto arity = run({"eval", "--field", kFbeta, "--point", "0,0"});
    CHECK(arity.code == 2);
    CHECK(arity.err.find("error:") != std::string::npos);
    CHECK(run({"verify", "--checks", "nope"}).code == 2);
    CHECK(run({"--help"}).code == 0);
  }

  TEST_CASE("list-checks") {
    auto r = run({"list-checks"});
    CHECK(r.code == 0);
    CHECK(r.out.find("group_axioms") != std::string::npos);
    auto j = nlohmann::json::parse(run({"list-checks", "--format", "json"}).out);
    CHECK(j.size() >= 12);
    CHECK(run({"list-checks", "--format", "csv"}).out.rfind("name,paper_anchor\n", 0) == 0);
  }

  TEST_CASE("verify exit status follows the checks") {
    auto ok = run({"verify", "--checks", "group_axioms,involution", "--seed", "3"});
    CHECK(ok.code == 0);
    auto j = nlohmann::json::parse(ok.out);
    REQUIRE(j.size() == 2);
    CHECK(j[0]["name"] == "group_axioms");
    CHECK(j[0]["pass"] == true);
    auto fail = run({"verify", "--checks", "bubble_pde_residual", "--tol", "0"});
    CHECK(fail.code == 1);
    auto csv = run({"verify", "--checks", "group_axioms", "--format", "csv"});
    CHECK(csv.out.rfind("name,pass,max_err,worst_input,runtime_ms\n", 0) == 0);
  }

  TEST_CASE("verify output is reproducible and honours HEISCR_SEED") {
    std::vector<std::string> args{"verify", "--checks", "functional_equation,reflection_identity"};
    auto a = run(args), b = run(args);
    CHECK(a.out == b.out);
    setenv("HEISCR_SEED", "42", 1);
    CHECK(run(args).out == a.out);
    setenv("HEISCR_SEED", "7", 1);
    CHECK(run(args).out != a.out);
    setenv("HEISCR_SEED", "x7", 1);
    CHECK(run(args).code == 2);
    unsetenv("HEISCR_SEED");
  }

  TEST_CASE("--out writes the report to a file") {
    auto dir = std::filesystem::temp_directory_path() / "heiscr_cli_out";
    std::filesystem::create_directories(dir);
    auto path = dir / "report.json";
    auto r = run({"verify", "--checks", "group_axioms", "--out", path.string()});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(nlohmann::json::parse(buf.str())[0]["name"] == "group_axioms");
    // no temp files left behind
    int files = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir)) files += e.is_regular_file();
    CHECK(files == 1);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("movesphere emits csv rows") {
    auto r = run({"movesphere", "--field", R"({"kind":"fbeta","n":1,"nu":2,"beta":1})", "--beta", "1",
                  "--xi", "0,0,0.5", "--samples", "5000", "--format", "csv"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("xi_index,lambda,violation_measure,stderr,lhs,rhs_factor\n", 0) == 0);
    CHECK(r.err.empty());
    auto bad = run({"movesphere", "--field", R"({"kind":"fbeta","n":1,"nu":2,"beta":1})", "--beta", "1",
                    "--xi", "0,0,0.5", "--lambda-max", "0.1", "--samples", "5000", "--format", "csv"});
    CHECK(bad.code == 0);
    CHECK(bad.err.find("warning: xi[0]") != std::string::npos);
  }
}
