#include "heiscr/cli.hpp"

#include <unistd.h>

#include <CLI11.hpp>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "heiscr/error.hpp"
#include "heiscr/fields.hpp"
#include "heiscr/movesphere.hpp"
#include "heiscr/verify.hpp"

namespace heiscr {

namespace {

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_real(std::string_view tok, const std::string& what) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  while (first != last && std::isspace(static_cast<unsigned char>(*first))) ++first;
  while (last != first && std::isspace(static_cast<unsigned char>(last[-1]))) --last;
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) {
    throw ParseError(what + ": '" + std::string(tok) + "' is not a number");
  }
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ScalarField load_field(const std::string& spec) {
  const auto first = spec.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && spec[first] == '{') return parse_field_spec(spec);
  return parse_field_spec(read_file(spec));
}

// Writes to `path` through a temporary file in the same directory, or to `out`
// when no path is given.
void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write '" + tmp + "'");
    f << text;
    f.flush();
    if (!f) throw ConfigError("write to '" + tmp + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw ConfigError("cannot move report into '" + path + "': " + ec.message());
  }
}

std::uint64_t default_seed() {
  const char* env = std::getenv("HEISCR_SEED");
  if (!env || !*env) return 42;
  std::uint64_t v = 0;
  const std::string_view s(env);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("HEISCR_SEED='" + std::string(s) + "' is not an unsigned integer");
  }
  return v;
}

int field_dim(const ScalarField& f, int n_flag) {
  if (f.dim() > 0) {
    if (n_flag > 0 && n_flag != f.dim()) {
      throw ConfigError("--n " + std::to_string(n_flag) + " disagrees with the field dimension " +
                        std::to_string(f.dim()));
    }
    return f.dim();
  }
  if (n_flag <= 0) throw ConfigError("the field does not fix n; pass --n");
  return n_flag;
}

std::vector<HPoint> default_grid(int n) {
  std::vector<HPoint> grid;
  for (double x : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    for (double t : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
      std::vector<Complex> z(static_cast<std::size_t>(n));
      z[0] = Complex{x, 0.0};
      grid.emplace_back(std::move(z), t);
    }
  }
  return grid;
}

std::string verify_csv(const std::vector<CheckResult>& results, bool timings) {
  std::ostringstream os;
  os << "name,pass,max_err,worst_input,runtime_ms\n";
  for (const auto& r : results) {
    os << r.name << ',' << (r.pass ? "true" : "false") << ',' << fmt(r.max_err) << ",\""
       << r.worst_input << "\"," << (timings ? fmt(r.runtime_ms) : "") << '\n';
  }
  return os.str();
}

}  // namespace

HPoint parse_point(std::string_view s, int n) {
  if (n < 1) throw ContractError("parse_point: n must be at least 1");
  const std::size_t want = static_cast<std::size_t>(2 * n + 1);
  std::vector<double> vals;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = s.find(',', start);
    const std::string_view tok =
        s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    const std::size_t index = vals.size() + 1;
    if (index > want) {
      throw ParseError("point: expected " + std::to_string(want) + " coordinates, got more");
    }
    vals.push_back(parse_real(tok, "point coordinate " + std::to_string(index) + " (offset " +
                                       std::to_string(start) + ")"));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (vals.size() != want) {
    throw ParseError("point: expected " + std::to_string(want) + " coordinates for n = " +
                     std::to_string(n) + ", got " + std::to_string(vals.size()));
  }
  return HPoint::from_real(vals);
}

std::string format_point(const HPoint& a) {
  std::string s;
  for (double c : a.real_coords()) {
    if (!s.empty()) s += ',';
    s += fmt(c);
  }
  return s;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Heisenberg group CR maps, Kelvin transforms and identity checks", "heiscr"};
  app.require_subcommand(1, 1);

  std::uint64_t seed = 0;
  bool seed_given = false;
  std::optional<double> tol;
  std::string field_spec;
  std::string point_s;
  std::vector<std::string> xi_list;
  double lambda = 0.0;
  double beta = 0.0;
  std::string format;
  std::string out_path;
  bool timings = false;
  int n_flag = 0;
  std::vector<std::string> check_names;
  SphereConfig sphere;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out_path, "Output path (written atomically); stdout by default");
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));
  };

  auto* verify = app.add_subcommand("verify", "Run the identity checks");
  verify->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& v) { seed = v; seed_given = true; },
                                             "Seed (default: $HEISCR_SEED or 42)");
  verify->add_option_function<double>("--tol", [&](const double& v) { tol = v; },
                                       "Override every check's tolerance");
  verify->add_option("--checks", check_names, "Subset of checks to run")->delimiter(',');
  verify->add_flag("--timings", timings, "Include runtime_ms in the report");
  add_common(verify);

  auto* eval = app.add_subcommand("eval", "Evaluate a field at a point");
  eval->add_option("--field", field_spec, "Field spec: inline JSON or a file path")->required();
  eval->add_option("--point", point_s, "x_1,..,x_n,y_1,..,y_n,t")->required();
  eval->add_option("--n", n_flag, "Dimension when the field does not fix it");
  add_common(eval);

  auto* kel = app.add_subcommand("kelvin", "Evaluate the Kelvin transform of a field");
  kel->add_option("--field", field_spec, "Field spec: inline JSON or a file path")->required();
  kel->add_option("--point", point_s, "Evaluation point")->required();
  kel->add_option("--xi", xi_list, "Inversion center")->required()->expected(1);
  kel->add_option("--lambda", lambda, "Inversion radius")->required();
  kel->add_option("--beta", beta, "Rotation parameter")->required();
  kel->add_option("--n", n_flag, "Dimension when the field does not fix it");
  add_common(kel);

  auto* ms = app.add_subcommand("movesphere", "Critical radii and violation curves");
  ms->add_option("--field", field_spec, "Field spec: inline JSON or a file path")->required();
  ms->add_option("--beta", beta, "Rotation parameter")->required();
  ms->add_option("--xi", xi_list, "Centers (repeatable); default 5x5 grid in (x_1, t)");
  ms->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& v) { seed = v; seed_given = true; },
                                         "Seed (default: $HEISCR_SEED or 42)");
  ms->add_option("--samples", sphere.samples, "Samples per violation test");
  ms->add_option("--steps", sphere.bisection_steps, "Bisection steps");
  ms->add_option("--lambda-min", sphere.lambda_min, "Lower end of the search window");
  ms->add_option("--lambda-max", sphere.lambda_max, "Upper end of the search window");
  ms->add_option("--n", n_flag, "Dimension when the field does not fix it");
  add_common(ms);

  auto* list = app.add_subcommand("list-checks", "List registered checks");
  add_common(list);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!seed_given) seed = default_seed();
    if (verify->parsed()) {
      if (format == "text") throw ConfigError("verify supports --format json or csv");
      std::vector<CheckSpec> suite;
      if (check_names.empty()) {
        suite = default_suite(seed);
      } else {
        for (const auto& name : check_names) suite.push_back(default_check(name, seed));
      }
      if (tol) {
        for (auto& s : suite) s.tolerance = *tol;
      }
      const auto results = run_suite(suite);
      const std::string text = format == "csv" ? verify_csv(results, timings)
                                               : results_to_json(results, timings).dump(2) + "\n";
      emit(text, out_path, out);
      for (const auto& r : results) {
        if (!r.pass) return 1;
      }
      return 0;
    }
    if (eval->parsed() || kel->parsed()) {
      const ScalarField f = load_field(field_spec);
      const int n = field_dim(f, n_flag);
      const HPoint a = parse_point(point_s, n);
      const double v = eval->parsed() ? f(a) : kelvin(f, parse_point(xi_list.at(0), n), lambda, beta, a);
      std::string text;
      if (format == "json") {
        text = nlohmann::json{{"point", a.real_coords()}, {"value", v}}.dump() + "\n";
      } else if (format == "csv") {
        text = "value\n" + fmt(v) + "\n";
      } else {
        text = fmt(v) + "\n";
      }
      emit(text, out_path, out);
      return 0;
    }
    if (ms->parsed()) {
      if (format == "text") throw ConfigError("movesphere supports --format json or csv");
      const ScalarField f = load_field(field_spec);
      const int n = field_dim(f, n_flag);
      std::vector<HPoint> grid;
      for (const auto& s : xi_list) grid.push_back(parse_point(s, n));
      if (grid.empty()) grid = default_grid(n);
      sphere.seed = seed;
      const auto reports = moving_spheres_demo(f, beta, grid, sphere);
      // The CSV has no column for failures, so they always go to stderr as well.
      for (const auto& r : reports) {
        if (r.error) err << "warning: " << *r.error << "\n";
      }
      emit(format == "csv" ? sphere_reports_to_csv(reports)
                           : sphere_reports_to_json(reports).dump(2) + "\n",
           out_path, out);
      return 0;
    }
    // list-checks
    std::string text;
    if (format == "json") {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& c : registered_checks()) {
        arr.push_back({{"name", c.name}, {"paper_anchor", c.paper_anchor}, {"description", c.description}});
      }
      text = arr.dump(2) + "\n";
    } else if (format == "csv") {
      text = "name,paper_anchor\n";
      for (const auto& c : registered_checks()) text += c.name + ",\"" + c.paper_anchor + "\"\n";
    } else {
      std::size_t width = 0;
      for (const auto& c : registered_checks()) width = std::max(width, c.name.size());
      for (const auto& c : registered_checks()) {
        text += c.name + std::string(width + 2 - c.name.size(), ' ') + c.paper_anchor + "\n";
      }
    }
    emit(text, out_path, out);
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace heiscr
