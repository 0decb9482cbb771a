#pragma once

// File outputs. Every floating-point value is printed with 17 significant digits.

#include <string>

#include "lrdecon/estimator.hpp"
#include "lrdecon/experiment.hpp"
#include "lrdecon/fgn.hpp"
#include "lrdecon/lrd.hpp"

namespace lrdecon {

/// "%.17g"; non-finite values print as null in JSON and empty in CSV.
std::string format_double(double v);

/// eps,delta,risk_mean,risk_se,reps,oracle_risk_mean,oracle_risk_se
std::string risk_csv(const RiskReport& report);
std::string summary_json(const RiskReport& report);
/// Log-log plot of blind (and oracle) mean risk against eps.
std::string loglog_svg(const RiskReport& report);

std::string exponent_json(const ExponentResult& result);
std::string hurst_json(const HurstEstimate& est);
std::string fgn_report_json(const FourierCovarianceReport& report);
std::string trace_json(const EstimateTrace& trace);
std::string plugin_json(const PluginComparison& cmp);
/// rho1,rho2,A,eps,delta,risk_mean,risk_se,reps,slope
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Column CSV of grid samples: header then one row per sample.
std::string samples_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns);

/// Writes or throws InvalidInput.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace lrdecon
