#include "lrdecon/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lrdecon/error.hpp"

namespace lrdecon {
namespace {

std::string json_num(double v) { return std::isfinite(v) ? format_double(v) : "null"; }
std::string csv_num(double v) { return std::isfinite(v) ? format_double(v) : ""; }

std::string json_str(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (static_cast<unsigned char>(c) < 0x20) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\u%04x", c);
      out += buf;
      continue;
    }
    out += c;
  }
  return out + "\"";
}

// Minimal ordered JSON object writer.
class Obj {
 public:
  explicit Obj(int indent = 0) : indent_(indent) {}
  Obj& raw(const std::string& key, const std::string& value) {
    fields_.emplace_back(key, value);
    return *this;
  }
  Obj& num(const std::string& key, double v) { return raw(key, json_num(v)); }
  Obj& integer(const std::string& key, unsigned long long v) { return raw(key, std::to_string(v)); }
  Obj& str(const std::string& key, const std::string& v) { return raw(key, json_str(v)); }
  Obj& boolean(const std::string& key, bool v) { return raw(key, v ? "true" : "false"); }
  std::string dump() const {
    const std::string pad(static_cast<std::size_t>(indent_ + 2), ' ');
    std::string out = "{\n";
    for (std::size_t i = 0; i < fields_.size(); ++i) {
      out += pad + json_str(fields_[i].first) + ": " + fields_[i].second;
      out += i + 1 < fields_.size() ? ",\n" : "\n";
    }
    return out + std::string(static_cast<std::size_t>(indent_), ' ') + "}";
  }

 private:
  int indent_;
  std::vector<std::pair<std::string, std::string>> fields_;
};

std::string num_array(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + json_num(v[i]);
  return out + "]";
}

std::string fit_json(const RateFit& f, int indent) {
  return Obj(indent)
      .num("slope", f.slope)
      .num("intercept", f.intercept)
      .num("r2", f.r2)
      .integer("points", f.points)
      .num("target", f.target)
      .num("slope_vs_theory", f.slope_vs_theory)
      .dump();
}

std::string exponent_obj(const ExponentResult& r, int indent) {
  return Obj(indent)
      .num("s", r.s)
      .num("p", r.p)
      .num("s_star", r.s_star)
      .integer("l1", r.l1)
      .integer("l2", r.l2)
      .num("nu1", r.nu1)
      .num("nu2", r.nu2)
      .num("alpha1", r.alpha1)
      .num("alpha2", r.alpha2)
      .num("s1", r.s1)
      .num("s2", r.s2)
      .boolean("dense1", r.dense1)
      .boolean("dense2", r.dense2)
      .boolean("xi1", r.xi1)
      .boolean("xi2", r.xi2)
      .num("exponent_eps", r.exponent_eps)
      .num("exponent_delta", r.exponent_delta)
      .str("regime", r.regime)
      .dump();
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string risk_csv(const RiskReport& report) {
  std::string out = "eps,delta,risk_mean,risk_se,reps,oracle_risk_mean,oracle_risk_se\n";
  for (const auto& gp : report.points) {
    out += format_double(gp.eps) + "," + format_double(gp.delta) + "," + csv_num(gp.blind.mean) + "," +
           csv_num(gp.blind.se) + "," + std::to_string(gp.blind.count) + ",";
    if (gp.oracle) out += csv_num(gp.oracle->mean) + "," + csv_num(gp.oracle->se);
    else out += ",";
    out += "\n";
  }
  return out;
}

std::string summary_json(const RiskReport& report) {
  Obj o;
  o.str("scenario", report.scenario)
      .integer("n", report.n)
      .integer("channels", report.M)
      .integer("reps", report.reps)
      .integer("seed", report.seed);
  std::size_t failures = 0, oracle_failures = 0;
  for (const auto& gp : report.points) {
    failures += gp.blind.failures;
    if (gp.oracle) oracle_failures += gp.oracle->failures;
  }
  o.integer("failures", failures).integer("oracle_failures", oracle_failures);
  o.raw("fit", report.fit ? fit_json(*report.fit, 2) : "null");
  o.raw("oracle_fit", report.oracle_fit ? fit_json(*report.oracle_fit, 2) : "null");
  o.num("target_slope", report.theory ? report.target_slope : std::nan(""));
  o.raw("theory", report.theory ? exponent_obj(*report.theory, 2) : "null");
  o.str("regime", report.theory ? report.theory->regime : "");
  return o.dump() + "\n";
}

std::string loglog_svg(const RiskReport& report) {
  const double W = 640, H = 420, L = 70, R = 20, T = 30, B = 50;
  std::vector<std::pair<double, double>> blind, oracle;
  for (const auto& gp : report.points) {
    if (gp.eps > 0 && gp.blind.mean > 0) blind.emplace_back(std::log10(gp.eps), std::log10(gp.blind.mean));
    if (gp.oracle && gp.eps > 0 && gp.oracle->mean > 0) {
      oracle.emplace_back(std::log10(gp.eps), std::log10(gp.oracle->mean));
    }
  }
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (blind.empty()) return svg.str() + "</svg>\n";
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto* series : {&blind, &oracle}) {
    for (const auto& [x, y] : *series) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (x1 - x0 < 1e-12) x1 = x0 + 1;
  if (y1 - y0 < 1e-12) y1 = y0 + 1;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
  svg << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">log10 eps</text>\n";
  svg << "<text x=\"16\" y=\"" << H / 2 << "\" transform=\"rotate(-90 16 " << H / 2
      << ")\" text-anchor=\"middle\">log10 risk</text>\n";
  auto polyline = [&](const std::vector<std::pair<double, double>>& pts, const char* color) {
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    for (const auto& [x, y] : pts) svg << format_double(px(x)) << "," << format_double(py(y)) << " ";
    svg << "\"/>\n";
    for (const auto& [x, y] : pts) {
      svg << "<circle cx=\"" << format_double(px(x)) << "\" cy=\"" << format_double(py(y)) << "\" r=\"3\" fill=\""
          << color << "\"/>\n";
    }
  };
  polyline(blind, "crimson");
  if (!oracle.empty()) polyline(oracle, "steelblue");
  svg << "<text x=\"" << L + 10 << "\" y=\"" << T << "\" fill=\"crimson\">blind</text>\n";
  if (!oracle.empty()) svg << "<text x=\"" << L + 60 << "\" y=\"" << T << "\" fill=\"steelblue\">oracle</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

std::string exponent_json(const ExponentResult& result) { return exponent_obj(result, 0) + "\n"; }

std::string hurst_json(const HurstEstimate& est) {
  return Obj()
             .num("H_hat", est.H_hat)
             .num("alpha_hat", alpha_from_hurst(est.H_hat))
             .num("stderr", est.std_error)
             .integer("bandwidth", est.bandwidth)
             .dump() +
         "\n";
}

std::string fgn_report_json(const FourierCovarianceReport& r) {
  return Obj()
             .num("hurst", r.hurst)
             .integer("n", r.n)
             .integer("reps", r.reps)
             .integer("max_freq", r.max_freq)
             .raw("variance", num_array(r.variance))
             .num("variance_slope", r.variance_slope)
             .num("expected_slope", 1.0 - 2.0 * r.hurst)
             .num("variance_slope_r2", r.variance_slope_r2)
             .num("max_ratio", r.max_ratio)
             .integer("max_ratio_m", static_cast<unsigned long long>(r.max_ratio_m))
             .integer("max_ratio_mp", static_cast<unsigned long long>(r.max_ratio_mp))
             .num("relative_se", r.relative_se)
             .boolean("wide_error_bars", r.wide_error_bars)
             .dump() +
         "\n";
}

std::string trace_json(const EstimateTrace& t) {
  std::string levels = "[";
  for (std::size_t i = 0; i < t.levels.size(); ++i) {
    const auto& lt = t.levels[i];
    levels += (i ? ", " : "") + Obj(4)
                                    .integer("j", static_cast<unsigned long long>(lt.j))
                                    .raw("S", num_array(lt.S))
                                    .integer("l1", lt.l1)
                                    .integer("l2", lt.l2)
                                    .num("lambda", lt.lambda)
                                    .integer("kept", lt.kept)
                                    .integer("killed", lt.killed)
                                    .boolean("dead", lt.dead)
                                    .dump();
  }
  levels += "]";
  std::size_t survived = 0;
  for (auto s : t.survived) survived += s;
  return Obj()
             .integer("n", t.n)
             .integer("m0", static_cast<unsigned long long>(t.m0))
             .integer("J", static_cast<unsigned long long>(t.J))
             .integer("J1", static_cast<unsigned long long>(t.J1))
             .integer("J2", static_cast<unsigned long long>(t.J2))
             .integer("J_cap", static_cast<unsigned long long>(t.J_cap))
             .boolean("J_capped", t.J_capped)
             .boolean("noise_free", t.noise_free)
             .boolean("uniform_weights", t.uniform_weights)
             .integer("surviving_frequencies", survived)
             .integer("scaling_coeffs", t.scaling_coeffs)
             .integer("kept_total", t.kept_total)
             .integer("killed_total", t.killed_total)
             .integer("coefficient_total", t.coefficient_total)
             .raw("levels", levels)
             .dump() +
         "\n";
}

std::string plugin_json(const PluginComparison& c) {
  return Obj()
             .num("eps", c.eps)
             .num("delta", c.delta)
             .integer("seeds", c.ratios.size() + c.failures)
             .integer("failures", c.failures)
             .num("median_ratio", c.median_ratio)
             .raw("alpha1_hat_mean", num_array(c.alpha1_hat_mean))
             .raw("alpha2_hat_mean", num_array(c.alpha2_hat_mean))
             .raw("ratios", num_array(c.ratios))
             .dump() +
         "\n";
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "rho1,rho2,A,eps,delta,risk_mean,risk_se,reps,slope\n";
  for (const auto& row : rows) {
    const std::string slope = row.report.fit ? format_double(row.report.fit->slope) : "";
    for (const auto& gp : row.report.points) {
      out += format_double(row.rho1) + "," + format_double(row.rho2) + "," + format_double(row.A) + "," +
             format_double(gp.eps) + "," + format_double(gp.delta) + "," + csv_num(gp.blind.mean) + "," +
             csv_num(gp.blind.se) + "," + std::to_string(gp.blind.count) + "," + slope + "\n";
    }
  }
  return out;
}

std::string samples_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size()) throw InvalidInput("samples_csv: header and column counts differ");
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
  out += "\n";
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& col : columns) {
    if (col.size() != rows) throw InvalidInput("samples_csv: columns differ in length");
  }
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + format_double(columns[c][r]);
    out += "\n";
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << content;
  if (!out) throw InvalidInput("write to '" + path + "' failed");
}

}  // namespace lrdecon
