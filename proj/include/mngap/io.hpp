#pragma once

// Serialization: flat key-value config, CSV sample tables, JSON records
// (schema "mn-gap/1") and static SVG line charts.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mngap/errors.hpp"
#include "mngap/model.hpp"
#include "mngap/scan.hpp"
#include "mngap/solver.hpp"
#include "mngap/verify.hpp"

namespace mngap {

inline constexpr const char* kSchema = "mn-gap/1";

/// Shortest-safe round-trip decimal ("%.17g"); "inf" for +infinity.
inline std::string format_full(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// 15 significant digits, as printed by the eval command.
inline std::string format_15(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

inline double parse_real(const std::string& text) {
  std::string s = text;
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  if (s == "inf" || s == "+inf" || s == "infinity") return kInfinity;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw ArgumentError("not a number: '" + text + "'");
  return v;
}

// ---------------------------------------------------------------------------
// Flat key-value config

using KeyValues = std::map<std::string, std::string>;

/// Lines of `key = value`; '#' and ';' start comments, `[section]` headers are ignored.
inline KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string{};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ArgumentError("config line " + std::to_string(lineno) + ": expected key = value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

inline KeyValues read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open config file '" + path + "'");
  return parse_key_values(in);
}

inline ModelParams params_from_key_values(const KeyValues& kv) {
  ModelParams p;
  auto get = [&](const char* key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };
  if (auto v = get("lambda")) p.lambda = parse_real(*v);
  if (auto v = get("eps")) p.eps = parse_real(*v);
  if (auto v = get("big_lambda")) p.big_lambda = parse_real(*v);
  if (auto v = get("gauge_coupling")) p.gauge_coupling = parse_real(*v);
  if (!get("lambda") && p.gauge_coupling) p.lambda = lambda_from_gauge_coupling(*p.gauge_coupling);
  p.validate();
  return p;
}

inline KeyValues params_to_key_values(const ModelParams& p) {
  KeyValues kv{{"lambda", format_full(p.lambda)}, {"eps", format_full(p.eps)}, {"big_lambda", format_full(p.big_lambda)}};
  if (p.gauge_coupling) kv["gauge_coupling"] = format_full(*p.gauge_coupling);
  return kv;
}

inline void write_key_values(std::ostream& out, const KeyValues& kv) {
  for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
}

// ---------------------------------------------------------------------------
// CSV of sampled solutions: x, u, w, upper_bound

struct SolutionTable {
  std::vector<double> x;
  std::vector<double> u;
};

inline void write_solution_csv(std::ostream& out, const GridFn& u, const ModelParams& p) {
  out << "x,u,w,upper_bound\n";
  const bool finite = p.finite_cutoff();
  const std::string ceiling = finite ? format_full(upper_bound_V(p)) : "nan";
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = u.grid()[i];
    out << format_full(x) << ',' << format_full(u[i]) << ',' << (finite ? format_full(eval_w(x, p)) : "nan") << ','
        << ceiling << '\n';
  }
}

inline SolutionTable read_solution_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ArgumentError("empty CSV");
  if (line.rfind("x,u", 0) != 0) throw ArgumentError("CSV header must start with x,u");
  SolutionTable t;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string xs, us;
    if (!std::getline(ss, xs, ',') || !std::getline(ss, us, ',')) throw ArgumentError("malformed CSV row: " + line);
    t.x.push_back(parse_real(xs));
    t.u.push_back(parse_real(us));
  }
  return t;
}

inline GridFn table_to_gridfn(const SolutionTable& t, GridKind kind = GridKind::log) {
  return GridFn(std::make_shared<const Grid>(t.x, kind), t.u);
}

// ---------------------------------------------------------------------------
// JSON

using Json = nlohmann::json;

inline Json real_to_json(double v) {
  if (std::isfinite(v)) return v;
  return format_full(v);
}

inline double real_from_json(const Json& j) {
  return j.is_string() ? parse_real(j.get<std::string>()) : j.get<double>();
}

inline Json to_json(const ModelParams& p) {
  Json j{{"lambda", p.lambda}, {"eps", p.eps}, {"big_lambda", real_to_json(p.big_lambda)}};
  if (p.gauge_coupling) j["gauge_coupling"] = *p.gauge_coupling;
  return j;
}

inline ModelParams params_from_json(const Json& j) {
  ModelParams p;
  p.lambda = j.at("lambda").get<double>();
  p.eps = j.at("eps").get<double>();
  p.big_lambda = real_from_json(j.at("big_lambda"));
  if (j.contains("gauge_coupling")) p.gauge_coupling = j.at("gauge_coupling").get<double>();
  p.validate();
  return p;
}

inline Json to_json(const SolveConfig& c) {
  return Json{{"tol", c.tol},       {"max_iter", c.max_iter}, {"damping", c.damping},
              {"grid_n", c.grid_n}, {"seed", c.seed},         {"rule", to_string(c.rule)},
              {"grid_kind", to_string(c.kind)}};
}

inline SolveConfig config_from_json(const Json& j) {
  SolveConfig c;
  c.tol = j.at("tol").get<double>();
  c.max_iter = j.at("max_iter").get<std::size_t>();
  c.damping = j.at("damping").get<double>();
  c.grid_n = j.at("grid_n").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.rule = rule_from_string(j.at("rule").get<std::string>());
  c.kind = j.value("grid_kind", std::string("log")) == "linear" ? GridKind::linear : GridKind::log;
  return c;
}

inline Json to_json(const GridFn& f) {
  return Json{{"grid_kind", to_string(f.grid().kind())},
              {"x", std::vector<double>(f.grid().nodes().begin(), f.grid().nodes().end())},
              {"values", std::vector<double>(f.values().begin(), f.values().end())}};
}

inline GridFn gridfn_from_json(const Json& j) {
  const GridKind kind = j.value("grid_kind", std::string("log")) == "linear" ? GridKind::linear : GridKind::log;
  return GridFn(std::make_shared<const Grid>(j.at("x").get<std::vector<double>>(), kind),
                j.at("values").get<std::vector<double>>());
}

inline Json to_json(const SolveReport& r) {
  Json j{{"schema", kSchema},
         {"kind", "solve"},
         {"operator", to_string(r.op)},
         {"params", to_json(r.params)},
         {"config", to_json(r.config)},
         {"converged", r.converged},
         {"iterations", r.iterations},
         {"residuals", r.residuals},
         {"empirical_ratio", r.empirical_ratio},
         {"regime", to_string(r.regime)},
         {"anomalies", r.anomalies},
         {"warnings", r.warnings},
         {"final", to_json(r.final)}};
  if (r.op == OperatorId::A) {
    j["max_band_violation"] = r.max_band_violation;
  } else {
    j["norms"] = r.norms;
    j["max_norm_ratio"] = r.max_norm_ratio;
  }
  if (r.certificate) {
    const auto& c = *r.certificate;
    j["certificate"] = Json{{"y_max", c.y_max}, {"psi_sup", c.psi_sup}, {"x_certified", c.x_certified},
                            {"bound", c.bound}, {"tol", c.tol},         {"x_certifiable", real_to_json(c.x_certifiable)}};
  }
  return j;
}

inline Json to_json(const CheckReport& c) {
  Json metrics = Json::object();
  for (const auto& [k, v] : c.metrics) metrics[k] = real_to_json(v);
  return Json{{"name", c.name},
              {"pass", c.passed},
              {"margin", real_to_json(c.margin)},
              {"tolerance", c.tolerance},
              {"informational", c.informational},
              {"detail", c.detail},
              {"metrics", metrics}};
}

inline Json to_json(const SuiteReport& s) {
  Json checks = Json::array();
  for (const auto& c : s.checks) checks.push_back(to_json(c));
  return Json{{"schema", kSchema}, {"kind", "verify"}, {"pass", s.passed()}, {"checks", checks}};
}

// ---------------------------------------------------------------------------
// Phase table CSV

inline void write_phase_csv(std::ostream& out, const std::vector<PhaseRecord>& rows) {
  out << "lambda,ratio,regime,fixed_norm,broken,iterations,converged,half_start_norm,symmetric_norm,note\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_full(*v) : std::string{}; };
  for (const auto& r : rows) {
    out << format_full(r.lambda) << ',' << format_full(r.ratio) << ',' << to_string(r.regime) << ','
        << format_full(r.fixed_norm) << ',' << (r.broken ? "true" : "false") << ',' << r.iterations << ','
        << (r.converged ? "true" : "false") << ',' << opt(r.half_start_norm) << ',' << opt(r.symmetric_norm) << ','
        << r.note << '\n';
  }
}

// ---------------------------------------------------------------------------
// SVG line charts

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
};

struct ChartOptions {
  std::string title;
  std::string x_label = "x";
  std::string y_label = "y";
  bool log_x = true;
  bool log_y = false;
  /// Values below this are drawn at the floor on a log y axis.
  double log_floor = 1e-16;
  int width = 720;
  int height = 480;
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace detail

/// Static SVG 1.1 line chart.
inline void write_svg_chart(std::ostream& out, const std::vector<Series>& series, const ChartOptions& opt) {
  const double left = 80, right = 20, top = 40, bottom = 60;
  const double pw = opt.width - left - right;
  const double ph = opt.height - top - bottom;
  auto tx = [&](double v) { return opt.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return opt.log_y ? std::log10(std::max(v, opt.log_floor)) : v; };

  double x0 = kInfinity, x1 = -kInfinity, y0 = kInfinity, y1 = -kInfinity;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) y1 = y0 + 1;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double v) { return left + (tx(v) - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return top + (1.0 - (ty(v) - y0) / (y1 - y0)) * ph; };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << opt.width << "\" height=\""
      << opt.height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << opt.width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << detail::xml_escape(opt.title) << "</text>\n"
      << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  // Ticks: decades on log axes, five even steps otherwise.
  auto ticks = [](double a, double b, bool logscale) {
    std::vector<double> t;
    if (logscale) {
      for (double e = std::ceil(a); e <= std::floor(b) && t.size() < 40; e += 1.0) t.push_back(e);
    } else {
      for (int k = 0; k <= 5; ++k) t.push_back(a + (b - a) * k / 5.0);
    }
    return t;
  };
  for (double t : ticks(x0, x1, opt.log_x)) {
    const double v = opt.log_x ? std::pow(10.0, t) : t;
    const double X = px(v);
    out << "<line x1=\"" << X << "\" y1=\"" << top + ph << "\" x2=\"" << X << "\" y2=\"" << top + ph + 5
        << "\" stroke=\"black\"/>\n<text x=\"" << X << "\" y=\"" << top + ph + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << detail::fmt_tick(v) << "</text>\n";
  }
  for (double t : ticks(y0, y1, opt.log_y)) {
    const double v = opt.log_y ? std::pow(10.0, t) : t;
    const double Y = top + (1.0 - (t - y0) / (y1 - y0)) * ph;
    out << "<line x1=\"" << left - 5 << "\" y1=\"" << Y << "\" x2=\"" << left << "\" y2=\"" << Y
        << "\" stroke=\"black\"/>\n<text x=\"" << left - 8 << "\" y=\"" << Y + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << detail::fmt_tick(v) << "</text>\n";
  }
  out << "<text x=\"" << left + pw / 2 << "\" y=\"" << opt.height - 15
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << detail::xml_escape(opt.x_label)
      << "</text>\n<text x=\"18\" y=\"" << top + ph / 2 << "\" transform=\"rotate(-90 18 " << top + ph / 2
      << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << detail::xml_escape(opt.y_label)
      << "</text>\n";

  double ly = top + 16;
  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    out << "\"/>\n<text x=\"" << left + pw - 10 << "\" y=\"" << ly << "\" text-anchor=\"end\" fill=\"" << s.color
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << detail::xml_escape(s.label) << "</text>\n";
    ly += 16;
  }
  out << "</svg>\n";
}

}  // namespace mngap
