// mngap: solve, verify, scan and evaluate the Maskawa-Nakajima gap equation.
//
// Exit codes: 0 success, 1 usage or domain error, 2 non-convergence, 3 verification failure.

#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mngap/mngap.hpp"

namespace {

using namespace mngap;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kNotConverged = 2;
constexpr int kVerifyFailed = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Model and solver options shared by every subcommand; flags override the config file.
struct CommonOptions {
  std::string config_path;
  std::optional<double> lambda;
  std::optional<double> eps;
  std::optional<std::string> big_lambda;
  std::optional<double> gauge_coupling;
  std::optional<std::size_t> n;
  std::optional<double> tol;
  std::optional<std::size_t> max_iter;
  std::optional<double> damping;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> rule;

  void attach(CLI::App& app, bool solver_flags = true) {
    app.add_option("--config", config_path, "Flat key-value config file");
    app.add_option("--lambda", lambda, "Coupling lambda > 0");
    app.add_option("--eps", eps, "Infrared cutoff eps > 0");
    app.add_option("--big-lambda", big_lambda, "Ultraviolet cutoff Lambda (number or 'inf')");
    app.add_option("--gauge-coupling", gauge_coupling, "Gauge coupling a (lambda = 3a^2/(4 pi^2))");
    if (!solver_flags) return;
    app.add_option("--n", n, "Grid node count");
    app.add_option("--tol", tol, "Convergence tolerance (sup norm)");
    app.add_option("--max-iter", max_iter, "Iteration cap");
    app.add_option("--damping", damping, "Damping in (0, 1]");
    app.add_option("--seed", seed, "Random seed");
    app.add_option("--rule", rule, "Quadrature rule: end_corrected | trapezoid");
  }

  KeyValues file_values() const { return config_path.empty() ? KeyValues{} : read_key_values(config_path); }

  /// Params from file then flags. `default_big_lambda` applies when neither supplies one.
  ModelParams params(bool need_cutoff = true) const {
    KeyValues kv = file_values();
    if (lambda) kv["lambda"] = format_full(*lambda);
    if (eps) kv["eps"] = format_full(*eps);
    if (big_lambda) kv["big_lambda"] = *big_lambda;
    if (gauge_coupling) kv["gauge_coupling"] = format_full(*gauge_coupling);
    if (!kv.count("lambda") && !kv.count("gauge_coupling")) throw UsageError("--lambda is required");
    if (!kv.count("eps")) kv["eps"] = "1";
    if (need_cutoff && !kv.count("big_lambda")) throw UsageError("--big-lambda is required");
    if (!kv.count("big_lambda")) kv["big_lambda"] = "inf";
    return params_from_key_values(kv);
  }

  SolveConfig solve_config() const {
    const KeyValues kv = file_values();
    SolveConfig c;
    auto get = [&](const char* key) -> std::optional<std::string> {
      auto it = kv.find(key);
      return it == kv.end() ? std::nullopt : std::optional<std::string>(it->second);
    };
    if (auto v = get("n")) c.grid_n = static_cast<std::size_t>(parse_real(*v));
    if (auto v = get("tol")) c.tol = parse_real(*v);
    if (auto v = get("max_iter")) c.max_iter = static_cast<std::size_t>(parse_real(*v));
    if (auto v = get("damping")) c.damping = parse_real(*v);
    if (auto v = get("seed")) c.seed = static_cast<std::uint64_t>(parse_real(*v));
    if (auto v = get("rule")) c.rule = rule_from_string(*v);
    if (n) c.grid_n = *n;
    if (tol) c.tol = *tol;
    if (max_iter) c.max_iter = *max_iter;
    if (damping) c.damping = *damping;
    if (seed) c.seed = *seed;
    if (rule) c.rule = rule_from_string(*rule);
    c.validate();
    return c;
  }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

OperatorId pick_operator(const std::string& name, const ModelParams& p) {
  if (name != "auto") return operator_from_string(name);
  if (p.lambda < 1.0) return p.finite_cutoff() ? OperatorId::C : OperatorId::B;
  return OperatorId::A;
}

/// Runs the selected solver; B and C start from the constant psi0.
SolveReport run_solve(OperatorId op, const ModelParams& p, const SolveConfig& cfg, double psi0) {
  switch (op) {
    case OperatorId::A:
      return solve_A(p, cfg);
    case OperatorId::B: {
      const GridPtr grid = make_B_grid(p, psi0, cfg.tol, cfg.grid_n);
      return solve_B_to_zero(p, GridFn::constant(grid, psi0), cfg);
    }
    default: {
      const GridPtr grid = make_grid(p.eps, p.big_lambda, cfg.grid_n, cfg.kind);
      return solve_C_to_zero(p, GridFn::constant(grid, psi0), cfg);
    }
  }
}

/// CSV-ready mass function for a report.
GridFn mass_function(const SolveReport& r) {
  return r.op == OperatorId::A ? r.final : mass_from_psi(r.final, r.params);
}

void write_solution_svg(const std::string& path, const SolveReport& r) {
  const GridFn u = mass_function(r);
  Series su{"u(x)", {u.grid().nodes().begin(), u.grid().nodes().end()}, {u.values().begin(), u.values().end()}};
  std::vector<Series> series{su};
  if (r.params.finite_cutoff() && r.op == OperatorId::A) {
    const GridFn w = sample_w(u.grid_ptr(), r.params);
    series.push_back(Series{"w(x)", su.x, {w.values().begin(), w.values().end()}, "#d62728"});
  }
  ChartOptions opt{.title = "mass function, lambda = " + format_15(r.params.lambda), .x_label = "x", .y_label = "u(x)"};
  std::ofstream out(path);
  write_svg_chart(out, series, opt);
}

// ---------------------------------------------------------------------------

int cmd_solve(const CommonOptions& common, const std::string& op_name, const std::string& out_prefix,
              const std::string& plot, double psi0) {
  const ModelParams p = common.params(false);
  const SolveConfig cfg = common.solve_config();
  const OperatorId op = pick_operator(op_name, p);
  const SolveReport rep = run_solve(op, p, cfg, psi0);

  write_file(out_prefix + ".json", to_json(rep).dump(2) + "\n");
  std::ostringstream csv;
  csv.precision(17);
  write_solution_csv(csv, mass_function(rep), p);
  write_file(out_prefix + ".csv", csv.str());
  if (plot == "svg") write_solution_svg(out_prefix + ".svg", rep);

  std::cerr << "operator " << to_string(op) << ", regime " << to_string(rep.regime) << ", "
            << (rep.converged ? "converged" : "NOT converged") << " after " << rep.iterations << " iterations\n";
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& a : rep.anomalies) std::cerr << "anomaly: " << a << '\n';
  return rep.converged ? kOk : kNotConverged;
}

int cmd_verify(const CommonOptions& common, const std::string& input, const std::vector<std::string>& only,
               const std::string& report_path, double fp_tol) {
  SuiteOptions opt;
  opt.only = std::set<std::string>(only.begin(), only.end());
  opt.fixed_point_tol = fp_tol;

  SuiteReport suite;
  if (!input.empty()) {
    Json meta;
    try {
      meta = Json::parse(read_text(input + ".json"));
    } catch (const std::exception& e) {
      std::cerr << "error: unreadable input '" << input << ".json': " << e.what() << '\n';
      return kUsage;
    }
    const ModelParams p = params_from_json(meta.at("params"));
    const SolveConfig cfg = config_from_json(meta.at("config"));
    opt.rule = cfg.rule;
    opt.seed = cfg.seed;
    const OperatorId op = operator_from_string(meta.at("operator").get<std::string>());
    if (op == OperatorId::A) {
      std::ifstream in(input + ".csv");
      if (!in) {
        std::cerr << "error: unreadable input '" << input << ".csv'\n";
        return kUsage;
      }
      const GridFn u = table_to_gridfn(read_solution_csv(in), cfg.kind);
      suite = run_suite_A(u, p, opt);
    } else {
      suite = run_suite_symmetric(gridfn_from_json(meta.at("final")), op, p, cfg.tol, opt);
    }
  } else {
    const ModelParams p = common.params(false);
    const SolveConfig cfg = common.solve_config();
    opt.rule = cfg.rule;
    opt.seed = cfg.seed;
    const bool needs_solution = opt.only.empty() || !(opt.only.size() == 1 && opt.only.count("xepsilon"));
    if (!needs_solution) {
      suite.checks.push_back(check_xepsilon(p.eps, opt.xepsilon_points));
    } else {
      const OperatorId op = pick_operator("auto", p);
      const SolveReport rep = run_solve(op, p, cfg, 1.0);
      suite = op == OperatorId::A ? run_suite_A(rep.final, p, opt)
                                  : run_suite_symmetric(rep.final, op, p, cfg.tol, opt);
    }
  }

  const std::string text = to_json(suite).dump(2) + "\n";
  if (report_path.empty() || report_path == "-") {
    std::cout << text;
  } else {
    write_file(report_path, text);
  }
  for (const auto& c : suite.checks)
    std::cerr << (c.passed ? "PASS " : (c.informational ? "INFO " : "FAIL ")) << c.name << "  margin "
              << format_15(c.margin) << '\n';
  return suite.passed() ? kOk : kVerifyFailed;
}

std::vector<double> parse_lambda_range(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw UsageError("--lambda-range must be start:stop:step");
  const double a = parse_real(parts[0]), b = parse_real(parts[1]), step = parse_real(parts[2]);
  std::vector<double> out;
  if (!(step > 0.0) || !(b >= a) || !(a > 0.0)) return out;
  const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
  for (std::size_t k = 0; k < count; ++k) out.push_back(a + step * static_cast<double>(k));
  return out;
}

int cmd_scan(const CommonOptions& common, const std::string& range, double ratio, const std::string& out_path,
             const std::string& plot) {
  const std::vector<double> lambdas = parse_lambda_range(range);
  if (lambdas.empty()) throw UsageError("empty lambda range '" + range + "'");
  const SolveConfig cfg = common.solve_config();
  const double eps = common.eps.value_or(1.0);
  const auto rows = sweep(lambdas, ratio, cfg, eps);

  std::ostringstream csv;
  write_phase_csv(csv, rows);
  write_file(out_path, csv.str());
  if (plot == "svg") {
    std::string svg = out_path;
    const auto dot = svg.rfind('.');
    svg = (dot == std::string::npos ? svg : svg.substr(0, dot)) + ".svg";
    Series s{"sup of fixed point", {}, {}};
    for (const auto& r : rows) {
      s.x.push_back(r.lambda);
      s.y.push_back(r.fixed_norm);
    }
    ChartOptions opt{.title = "phase table, eps/Lambda = " + format_15(ratio), .x_label = "lambda",
                     .y_label = "fixed_norm", .log_x = true, .log_y = true};
    std::ofstream out(svg);
    write_svg_chart(out, {s}, opt);
  }
  const auto bad = phase_contradictions(rows);
  for (const auto& b : bad) std::cerr << "contradiction: " << b << '\n';
  std::cerr << rows.size() << " rows written to " << out_path << '\n';
  return bad.empty() ? kOk : kVerifyFailed;
}

int cmd_eval(const CommonOptions& common, const std::string& what, std::optional<double> x, std::optional<double> y,
             std::optional<double> c, const std::string& input) {
  auto need = [](const std::optional<double>& v, const char* flag) {
    if (!v) throw UsageError(std::string(flag) + " is required");
    return *v;
  };
  auto print = [](double v) { std::cout << format_15(v) << '\n'; };
  if (what == "cutoff") {
    const double lambda = common.lambda ? *common.lambda : common.params(false).lambda;
    print(cutoff_max_ratio(lambda));
  } else if (what == "w") {
    print(eval_w(need(x, "--x"), common.params()));
  } else if (what == "upper") {
    print(upper_bound_V(common.params()));
  } else if (what == "kernel") {
    print(kernel(need(x, "--x"), need(y, "--y")));
  } else if (what == "oracle") {
    print(apply_A_const_oracle(need(c, "--c"), need(x, "--x"), common.params()));
  } else if (what == "xepsilon") {
    print(xepsilon_expression(need(x, "--x"), common.eps.value_or(1.0)));
  } else if (what == "A") {
    if (input.empty()) throw UsageError("eval A needs --input CSV");
    std::ifstream in(input);
    if (!in) throw UsageError("cannot read '" + input + "'");
    const SolveConfig cfg = common.solve_config();
    const GridFn u = table_to_gridfn(read_solution_csv(in));
    const GridFn Au = apply_A(u, common.params(), cfg.rule);
    for (double v : Au.values()) print(v);
  } else {
    throw UsageError("unknown eval target '" + what + "'");
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solver and verification suite for the Maskawa-Nakajima gap equation"};
  app.require_subcommand(1);

  CommonOptions solve_opts, verify_opts, scan_opts, eval_opts;

  auto* solve = app.add_subcommand("solve", "Compute a fixed point and write <out>.json / <out>.csv");
  solve_opts.attach(*solve);
  std::string op_name = "auto", out_prefix = "run", solve_plot;
  double psi0 = 1.0;
  solve->add_option("--operator", op_name, "auto | A | B | C")->check(CLI::IsMember({"auto", "A", "B", "C"}));
  solve->add_option("--out", out_prefix, "Output prefix");
  solve->add_option("--plot", solve_plot, "Emit <out>.svg when 'svg'")->check(CLI::IsMember({"svg"}));
  solve->add_option("--psi0", psi0, "Constant start for B/C iterations");

  auto* verify = app.add_subcommand("verify", "Run the verification suite on a solve output or inline params");
  verify_opts.attach(*verify);
  std::string input, report_path;
  std::vector<std::string> only;
  double fp_tol = 1e-8;
  verify->add_option("--input", input, "Prefix of a previous solve (<prefix>.json, <prefix>.csv)");
  verify->add_option("--only", only, "Run only the named check(s)");
  verify->add_option("--report", report_path, "Write the JSON report here (default: stdout)");
  verify->add_option("--fp-tol", fp_tol, "Tolerance for sup|Au - u|");

  auto* scan = app.add_subcommand("scan", "Phase table over a range of couplings");
  scan_opts.attach(*scan);
  std::string range, scan_out = "scan.csv", scan_plot;
  double ratio = 0.01;
  scan->add_option("--lambda-range", range, "start:stop:step (inclusive)")->required();
  scan->add_option("--ratio", ratio, "eps / Lambda");
  scan->add_option("--out", scan_out, "CSV path");
  scan->add_option("--plot", scan_plot, "Emit an SVG next to the CSV when 'svg'")->check(CLI::IsMember({"svg"}));

  auto* eval = app.add_subcommand("eval", "Print closed-form quantities (w, cutoff, upper, kernel, oracle, xepsilon, A)");
  eval_opts.attach(*eval);
  std::string what, eval_input;
  std::optional<double> ex, ey, ec;
  eval->add_option("what", what, "Quantity to evaluate")->required();
  eval->add_option("--x", ex, "Abscissa");
  eval->add_option("--y", ey, "Second abscissa (kernel)");
  eval->add_option("--c", ec, "Constant input (oracle)");
  eval->add_option("--input", eval_input, "CSV with x,u columns (eval A)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (*solve) return cmd_solve(solve_opts, op_name, out_prefix, solve_plot, psi0);
    if (*verify) return cmd_verify(verify_opts, input, only, report_path, fp_tol);
    if (*scan) return cmd_scan(scan_opts, range, ratio, scan_out, scan_plot);
    if (*eval) return cmd_eval(eval_opts, what, ex, ey, ec, eval_input);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
