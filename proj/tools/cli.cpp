#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "signtest/correlated_size.hpp"
#include "signtest/errors.hpp"
#include "signtest/exact_test.hpp"
#include "signtest/montecarlo.hpp"
#include "signtest/power.hpp"
#include "signtest/quadrature.hpp"
#include "svg.hpp"

namespace signtest::cli {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr int kSchemaVersion = 1;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raw flag values; list flags stay strings until the command parses them.
struct Options {
  std::string format = "csv";
  std::string output;
  double alpha = 0.05;
  std::string alpha_list;
  std::string side = "two";
  double mu0 = 0.0;
  std::string model = "equi";
  std::string q_list;
  std::string rho_list;
  std::string mu_list;
  std::string sigma_list;
  std::string prob_list;
  std::string nodes_list;
  int nodes = kDefaultQuadratureOrder;
  int q = 0;
  double rho = 0.0;
  double mu = 0.0;
  std::uint64_t reps = 100000;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> decision_seed;
  unsigned threads = 0;
  bool coin_flip = false;
  bool svg = false;
  int max_degree = 0;
  double tolerance = 1e-10;
  std::string input;
};

// One command's output: a flat table plus the configuration that produced
// it. CSV and JSON are two renderings of the same object.
struct Report {
  std::string schema;
  Json config = Json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;
};

std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_number()) return v.dump();
  return v.get<std::string>();
}

std::string render_csv(const Report& r) {
  std::string out = "# signtest " + r.schema + " v" +
                    std::to_string(kSchemaVersion) + "\n# config";
  for (const auto& [key, value] : r.config.items()) {
    out += " " + key + "=" + (value.is_string() ? value.get<std::string>()
                                                 : value.dump());
  }
  out += "\n";
  for (std::size_t i = 0; i < r.columns.size(); ++i) {
    out += (i ? "," : "") + r.columns[i];
  }
  out += "\n";
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out += (i ? "," : "") + csv_cell(row[i]);
    }
    out += "\n";
  }
  return out;
}

std::string render_json(const Report& r) {
  Json doc;
  doc["schema"] = "signtest " + r.schema + " v" + std::to_string(kSchemaVersion);
  doc["config"] = r.config;
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json obj = Json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[r.columns[i]] = row[i];
    rows.push_back(std::move(obj));
  }
  doc["results"] = std::move(rows);
  return doc.dump(2) + "\n";
}

// --output wins; otherwise $SIGNTEST_OUTPUT_DIR/<command>.<ext>; otherwise
// standard output (empty path).
fs::path output_path(const Options& o, const std::string& command) {
  if (!o.output.empty()) return o.output == "-" ? fs::path{} : fs::path{o.output};
  if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir) {
    return fs::path(dir) / (command + "." + o.format);
  }
  return {};
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << text;
  f.close();
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

void emit(const Report& r, const Options& o, const std::string& command,
          std::ostream& out, std::ostream& err) {
  const std::string text = o.format == "json" ? render_json(r) : render_csv(r);
  const fs::path path = output_path(o, command);
  if (path.empty()) {
    out << text;
    out.flush();
    if (!out) throw IoError("failed writing standard output");
    return;
  }
  write_file(path, text);
  err << "wrote " << path.string() << "\n";
}

Side parse_side(const std::string& s) {
  return s == "greater" ? Side::kOneSidedGreater : Side::kTwoSided;
}

template <class F>
auto flag_list(const std::string& flag, F&& parse) -> decltype(parse()) {
  try {
    return parse();
  } catch (const ParseError& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

std::vector<int> ints(const std::string& flag, const std::string& text) {
  return flag_list(flag, [&] { return parse_int_list(text); });
}

std::vector<double> reals(const std::string& flag, const std::string& text) {
  return flag_list(flag, [&] { return parse_real_list(text); });
}

Json json_list(const auto& values) {
  Json a = Json::array();
  for (const auto& v : values) a.push_back(v);
  return a;
}

// ---------------------------------------------------------------- test

int cmd_test(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.input.empty()) throw UsageError("test: --input is required");
  Observations obs;
  if (o.input == "-") {
    obs = parse_observations(std::cin, "<stdin>");
  } else {
    std::ifstream f(o.input);
    if (!f) throw IoError("cannot open input '" + o.input + "'");
    obs = parse_observations(f, o.input);
  }

  const TestSpec spec{o.mu0, o.alpha, parse_side(o.side)};
  TestOutcome outcome;
  try {
    outcome = run_test(obs.values, spec);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kZeroEntry && e.index()) {
      const std::size_t i = *e.index();
      throw Error(ErrorKind::kZeroEntry,
                  o.input + ":" + std::to_string(obs.lines[i]) +
                      ": observation " + format_number(obs.values[i]) +
                      " equals mu0; the sign test needs nonzero differences",
                  i);
    }
    throw;
  }
  if (o.decision_seed) {
    outcome.decision = randomized_decision(outcome, *o.decision_seed);
  }
  const CriticalConstants cc =
      critical_constants(static_cast<int>(obs.values.size()), o.alpha, spec.side);

  Report r;
  r.schema = "test";
  r.config = {{"command", "test"},   {"input", o.input}, {"mu0", o.mu0},
              {"alpha", o.alpha},    {"side", o.side},
              {"seed", o.decision_seed ? Json(*o.decision_seed) : Json()}};
  r.columns = {"q",   "statistic", "critical_t", "gamma",
               "phi", "p_value",   "decision"};
  r.rows.push_back({static_cast<int>(obs.values.size()), outcome.statistic,
                    outcome.critical_t, cc.gamma, outcome.phi, outcome.p_value,
                    outcome.decision ? Json(*outcome.decision) : Json()});
  emit(r, o, "test", out, err);
  return kExitOk;
}

// ---------------------------------------------------------------- power

int cmd_power(const Options& o, std::ostream& out, std::ostream& err) {
  const Side side = parse_side(o.side);
  Report r;
  r.config = {{"command", "power"}, {"alpha", o.alpha}, {"side", o.side}};
  if (!o.prob_list.empty()) {
    if (!o.sigma_list.empty()) {
      throw UsageError("power: give either --prob or --sigma, not both");
    }
    const auto p = reals("--prob", o.prob_list);
    r.schema = "power-marginal";
    r.config["prob"] = json_list(p);
    r.columns = {"q", "alpha", "side", "power"};
    r.rows.push_back({static_cast<int>(p.size()), o.alpha, o.side,
                      rejection_rate(MarginalProbabilities(p), o.alpha, side)});
  } else {
    if (o.sigma_list.empty()) {
      throw UsageError("power: --sigma (or --prob) is required");
    }
    const auto sigma = reals("--sigma", o.sigma_list);
    const auto grid = o.mu_list.empty() ? std::vector<double>{o.mu0}
                                        : reals("--mu", o.mu_list);
    r.schema = "power-curve";
    r.config["mu0"] = o.mu0;
    r.config["sigma"] = json_list(sigma);
    r.config["mu"] = json_list(grid);
    r.columns = {"alpha", "side", "mu", "power"};
    for (const PowerPoint& pt : power_curve(sigma, o.mu0, grid, o.alpha, side)) {
      r.rows.push_back({o.alpha, o.side, pt.mu, pt.power});
    }
  }
  emit(r, o, "power", out, err);
  return kExitOk;
}

// ---------------------------------------------------------------- size

Report size_report(const std::string& schema, const std::string& model,
                   const std::vector<double>& alphas, const std::vector<int>& qs,
                   const std::vector<double>& rhos, int nodes) {
  Report r;
  r.schema = schema;
  r.config = {{"command", schema},         {"model", model},
              {"alpha", json_list(alphas)}, {"q", json_list(qs)},
              {"rho", json_list(rhos)}};
  if (model == "equi") r.config["nodes"] = nodes;
  r.columns = {"alpha", "q", "rho", "size"};
  if (model == "equi") {
    const QuadratureRule rule = gauss_hermite(nodes);
    for (const double alpha : alphas) {
      for (const SizeRow& row : size_surface(qs, rhos, alpha, rule).rows) {
        r.rows.push_back({alpha, row.q, row.rho, row.size});
      }
    }
  } else {
    for (const double alpha : alphas) {
      for (const int q : qs) {
        for (const double rho : rhos) {
          r.rows.push_back({alpha, q, rho, minimal_pair_size({q, rho}, alpha)});
        }
      }
    }
  }
  return r;
}

int cmd_size(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.model == "indep") {
    throw UsageError(
        "size: --model indep has size alpha by construction; use equi or "
        "minimal");
  }
  if (o.q_list.empty() || o.rho_list.empty()) {
    throw UsageError("size: --q and --rho are required");
  }
  const auto alphas = o.alpha_list.empty() ? std::vector<double>{o.alpha}
                                           : reals("--alpha", o.alpha_list);
  const Report r = size_report("size", o.model, alphas, ints("--q", o.q_list),
                               reals("--rho", o.rho_list), o.nodes);
  emit(r, o, "size", out, err);
  return kExitOk;
}

// ---------------------------------------------------------------- figure

int cmd_figure(const Options& o, std::ostream& out, std::ostream& err) {
  const auto alphas =
      reals("--alpha", o.alpha_list.empty() ? "0.05,0.1" : o.alpha_list);
  const auto qs = ints("--q", o.q_list.empty() ? "1..30" : o.q_list);
  const auto rhos = reals(
      "--rho", o.rho_list.empty() ? "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9"
                                  : o.rho_list);
  const Report r = size_report("figure", "equi", alphas, qs, rhos, o.nodes);
  emit(r, o, "figure", out, err);

  if (o.svg) {
    fs::path dir = output_path(o, "figure").parent_path();
    if (dir.empty()) dir = ".";
    for (const double alpha : alphas) {
      std::vector<Series> series;
      for (const double rho : rhos) {
        Series s{"rho = " + format_number(rho), {}, {}};
        for (const auto& row : r.rows) {
          if (row[0].get<double>() == alpha && row[2].get<double>() == rho) {
            s.x.push_back(row[1].get<int>());
            s.y.push_back(row[3].get<double>());
          }
        }
        series.push_back(std::move(s));
      }
      const fs::path path = dir / ("figure_alpha_" + format_number(alpha) + ".svg");
      write_file(path,
                 line_chart_svg("Size of the " + format_number(alpha) +
                                    "-level sign test, equicorrelated normals",
                                "number of clusters q", "rejection rate",
                                series));
      err << "wrote " << path.string() << "\n";
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------- mc

int cmd_mc(const Options& o, std::ostream& out, std::ostream& err) {
  SamplerSpec sampler;
  std::optional<double> analytic;
  const Side side = parse_side(o.side);
  Report r;
  r.schema = "mc";
  r.config = {{"command", "mc"}, {"model", o.model}};

  if (o.model == "indep") {
    if (o.sigma_list.empty()) throw UsageError("mc: --model indep needs --sigma");
    const auto sigma = reals("--sigma", o.sigma_list);
    sampler = IndependentNormalSampler{o.mu, sigma};
    r.config["sigma"] = json_list(sigma);
    validate(sampler);
    analytic = power_curve(sigma, o.mu0, std::vector<double>{o.mu}, o.alpha,
                           side)[0].power;
  } else {
    if (o.q < 1) throw UsageError("mc: --q is required for " + o.model);
    r.config["q"] = o.q;
    r.config["rho"] = o.rho;
    const bool null_two_sided = o.mu == o.mu0 && side == Side::kTwoSided;
    if (o.model == "equi") {
      sampler = EquicorrelatedSampler{o.q, o.rho, o.mu};
      validate(sampler);
      if (null_two_sided && o.rho <= kMaxEquicorrelation) {
        analytic = equicorrelated_size({o.q, o.rho}, o.alpha,
                                       gauss_hermite(o.nodes));
      }
    } else {
      sampler = MinimalPairSampler{o.q, o.rho, o.mu};
      validate(sampler);
      if (null_two_sided) analytic = minimal_pair_size({o.q, o.rho}, o.alpha);
    }
  }
  r.config["mu"] = o.mu;
  r.config["mu0"] = o.mu0;
  r.config["alpha"] = o.alpha;
  r.config["side"] = o.side;
  r.config["reps"] = o.reps;
  r.config["seed"] = o.seed;
  r.config["estimator"] = o.coin_flip ? "coin-flip" : "expected-phi";

  SimulationOptions sim;
  sim.estimator = o.coin_flip ? Estimator::kCoinFlip : Estimator::kExpectedPhi;
  sim.threads = o.threads;
  const SimulationReport rep =
      estimate_rejection(sampler, {o.mu0, o.alpha, side}, o.reps, o.seed, sim);

  r.columns = {"q",         "mean_phi",    "std_error", "ci95_low",
               "ci95_high", "tie_redraws", "analytic",  "analytic_in_ci95"};
  Json in_ci;
  if (analytic) in_ci = *analytic >= rep.ci95.first && *analytic <= rep.ci95.second;
  r.rows.push_back({dimension(sampler), rep.mean_phi, rep.std_error,
                    rep.ci95.first, rep.ci95.second, rep.tie_redraws,
                    analytic ? Json(*analytic) : Json(), in_ci});
  emit(r, o, "mc", out, err);
  return kExitOk;
}

// ---------------------------------------------------------------- checks

int cmd_quadcheck(const Options& o, std::ostream& out, std::ostream& err) {
  const auto orders = ints("--nodes", o.nodes_list.empty()
                                          ? std::to_string(o.nodes)
                                          : o.nodes_list);
  Report r;
  r.schema = "quadcheck";
  r.config = {{"command", "quadcheck"},
              {"nodes", json_list(orders)},
              {"max_degree", o.max_degree > 0 ? Json(o.max_degree) : Json("auto")},
              {"tolerance", o.tolerance}};
  r.columns = {"order",     "max_degree",     "max_relative_error",
               "weight_sum_error", "symmetric", "increasing", "positive",
               "passed"};
  bool all = true;
  for (const int n : orders) {
    const int degree = o.max_degree > 0 ? o.max_degree : std::min(2 * n - 1, 127);
    const QuadratureCheck c = check_rule(gauss_hermite(n), degree, o.tolerance);
    all = all && c.passed;
    r.rows.push_back({c.order, c.max_degree, c.max_relative_error,
                      c.weight_sum_error, c.symmetric, c.increasing, c.positive,
                      c.passed});
  }
  emit(r, o, "quadcheck", out, err);
  if (!all) err << "quadcheck: at least one rule failed\n";
  return all ? kExitOk : kExitCheckFailed;
}

int cmd_identities(const Options& o, std::ostream& out, std::ostream& err) {
  const auto qs = ints("--q", o.q_list.empty() ? "1..20" : o.q_list);
  Report r;
  r.schema = "identities";
  r.config = {{"command", "identities"},
              {"q", json_list(qs)},
              {"derivative_step", kDerivativeStep},
              {"derivative_tolerance", kDerivativeTolerance}};
  r.columns = {"q",
               "m",
               "derivative_max_error",
               "derivative_ok",
               "alternating_max_deviation",
               "alternating_ok",
               "telescoping_sum",
               "telescoping_closed",
               "telescoping_ok",
               "passed"};
  bool all = true;
  for (const int q : qs) {
    if (q < 1) throw UsageError("--q: identities need q >= 1");
    for (int m = 0; 2 * m <= q; ++m) {
      const IdentityReport rep = identity_suite(q, m);
      all = all && rep.passed;
      const Json tel_sum = rep.telescoping_checked ? Json(rep.telescoping_sum) : Json();
      const Json tel_closed =
          rep.telescoping_checked ? Json(rep.telescoping_closed) : Json();
      const Json tel_ok = rep.telescoping_checked ? Json(rep.telescoping_ok) : Json();
      r.rows.push_back({q, m, rep.derivative_max_error, rep.derivative_ok,
                        rep.alternating_max_deviation, rep.alternating_ok,
                        tel_sum, tel_closed, tel_ok, rep.passed});
    }
  }
  emit(r, o, "identities", out, err);
  if (!all) err << "identities: at least one identity failed\n";
  return all ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------- wiring

void add_output_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--output", o.output,
                  std::string("Output file ('-' for stdout); default $") +
                      kOutputDirEnv + "/<command>.<format> or stdout");
}

void add_alpha(CLI::App* cmd, Options& o) {
  cmd->add_option("--alpha", o.alpha, "Nominal level in (0, 1)")
      ->capture_default_str();
}

void add_side(CLI::App* cmd, Options& o) {
  cmd->add_option("--side", o.side, "Alternative")
      ->check(CLI::IsMember({"two", "greater"}))
      ->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{
      "Exact randomized sign test: test data, compute power and size under "
      "independence and correlation, simulate, and reproduce size figures.",
      "signtest"};
  app.require_subcommand(1);
  Options o;

  auto* test = app.add_subcommand("test", "Run the randomized sign test on data");
  test->add_option("--input", o.input,
                   "Observations file (whitespace-separated or one-column CSV; "
                   "'-' for stdin)")
      ->required();
  test->add_option("--mu0", o.mu0, "Hypothesized median")->capture_default_str();
  test->add_option("--seed", o.decision_seed,
                   "Also draw the randomized accept/reject decision");
  add_alpha(test, o);
  add_side(test, o);
  add_output_flags(test, o);

  auto* power = app.add_subcommand("power", "Analytic power");
  power->add_option("--prob", o.prob_list,
                    "Comma list of P(Y_i > mu0) for each coordinate");
  power->add_option("--sigma", o.sigma_list,
                    "Comma list of normal scales, one per coordinate");
  power->add_option("--mu", o.mu_list, "Comma list of true medians (default mu0)");
  power->add_option("--mu0", o.mu0, "Hypothesized median")->capture_default_str();
  add_alpha(power, o);
  add_side(power, o);
  add_output_flags(power, o);

  auto* size = app.add_subcommand("size", "Null rejection rate under correlation");
  size->add_option("--model", o.model, "Correlation model")
      ->check(CLI::IsMember({"equi", "minimal", "indep"}))
      ->capture_default_str();
  size->add_option("--q", o.q_list, "Comma list / ranges (lo..hi) of cluster counts");
  size->add_option("--rho", o.rho_list, "Comma list of correlations");
  size->add_option("--alpha", o.alpha_list, "Comma list of levels (default 0.05)");
  size->add_option("--nodes", o.nodes, "Gauss-Hermite nodes")->capture_default_str();
  add_output_flags(size, o);

  auto* mc = app.add_subcommand("mc", "Monte Carlo rejection rate");
  mc->add_option("--model", o.model, "Sampling model")
      ->check(CLI::IsMember({"equi", "minimal", "indep"}))
      ->capture_default_str();
  mc->add_option("--q", o.q, "Number of coordinates (equi, minimal)");
  mc->add_option("--rho", o.rho, "Correlation (equi, minimal)")->capture_default_str();
  mc->add_option("--sigma", o.sigma_list, "Comma list of scales (indep)");
  mc->add_option("--mu", o.mu, "True median of every coordinate")->capture_default_str();
  mc->add_option("--mu0", o.mu0, "Hypothesized median")->capture_default_str();
  mc->add_option("--reps", o.reps, "Replications")->capture_default_str();
  mc->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  mc->add_option("--threads", o.threads, "Worker threads (0: all cores)")
      ->capture_default_str();
  mc->add_flag("--coin-flip", o.coin_flip,
               "Average seeded accept/reject draws instead of phi");
  mc->add_option("--nodes", o.nodes, "Gauss-Hermite nodes for the analytic value")
      ->capture_default_str();
  add_alpha(mc, o);
  add_side(mc, o);
  add_output_flags(mc, o);

  auto* figure = app.add_subcommand(
      "figure", "Equicorrelated size over a (q, rho) grid for each alpha");
  figure->add_option("--q", o.q_list, "Cluster counts (default 1..30)");
  figure->add_option("--rho", o.rho_list, "Correlations (default 0.1,...,0.9)");
  figure->add_option("--alpha", o.alpha_list, "Levels (default 0.05,0.1)");
  figure->add_option("--nodes", o.nodes, "Gauss-Hermite nodes")->capture_default_str();
  figure->add_flag("--svg", o.svg,
                   "Also write figure_alpha_<alpha>.svg next to the output");
  add_output_flags(figure, o);

  auto* quad = app.add_subcommand("quadcheck", "Validate Gauss-Hermite rules");
  quad->add_option("--nodes", o.nodes_list, "Orders to check (default 1000)");
  quad->add_option("--max-degree", o.max_degree,
                   "Highest moment degree (default min(2n-1, 127))");
  quad->add_option("--tolerance", o.tolerance, "Relative moment tolerance")
      ->capture_default_str();
  add_output_flags(quad, o);

  auto* ident = app.add_subcommand("identities",
                                   "Check the algebraic identities behind the "
                                   "size results");
  ident->add_option("--q", o.q_list, "Cluster counts (default 1..20)");
  add_output_flags(ident, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*test) return cmd_test(o, out, err);
    if (*power) return cmd_power(o, out, err);
    if (*size) return cmd_size(o, out, err);
    if (*mc) return cmd_mc(o, out, err);
    if (*figure) return cmd_figure(o, out, err);
    if (*quad) return cmd_quadcheck(o, out, err);
    if (*ident) return cmd_identities(o, out, err);
    throw UsageError("no command given");
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const Error& e) {
    err << to_string(e.kind()) << ": " << e.what() << "\n";
    return e.kind() == ErrorKind::kZeroEntry ? kExitZeroEntry : kExitDomain;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace signtest::cli
