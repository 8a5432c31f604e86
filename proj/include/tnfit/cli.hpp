#ifndef TNFIT_CLI_HPP
#define TNFIT_CLI_HPP

// Front-end logic behind the tnfit command: reading data files, the lognormal
// log transform, bound selection, running a fit and serialising the result.
// Kept apart from main() so it can be tested without spawning processes.

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tnfit/error.hpp"
#include "tnfit/estimator.hpp"
#include "tnfit/model.hpp"
#include "tnfit/sample_moments.hpp"
#include "tnfit/synth.hpp"

namespace tnfit::cli {

enum class Distribution { Normal, Lognormal };
enum class OutputFormat { Json, Text };

/// |psi| below this gets a power-law / exponential note in the report.
inline constexpr double kPowerLawNoteThreshold = 1e-3;

struct RunRequest {
  std::string input_path;
  Distribution distribution = Distribution::Normal;
  std::optional<std::pair<double, double>> bounds;  // data units (x for lognormal)
  bool constrain_psi_zero = false;
  FitConfig fit;
  QuadratureConfig quadrature;
  OutputFormat output_format = OutputFormat::Json;
};

struct Report {
  double alpha = 0.0;
  double psi = 0.0;
  double beta = 0.0;
  std::optional<double> mu;
  std::optional<double> sigma;
  double y_min = 0.0;
  double y_max = 0.0;
  std::optional<double> x_min;
  std::optional<double> x_max;
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
  double eta_used = 0.0;
  std::size_t n = 0;
  std::string power_law_note;
};

/// One value per line. Blank lines and lines whose first non-blank character
/// is '#' are skipped.
inline std::vector<double> ingest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::FileNotFound, "cannot open '" + path + "'");
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string token = line.substr(first, last - first + 1);
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size() || errno == ERANGE || !std::isfinite(v)) {
      throw ParseError(line_no, token);
    }
    values.push_back(v);
  }
  if (values.empty()) throw Error(Errc::EmptyDataset, "'" + path + "' contains no values");
  return values;
}

/// Fits already-loaded data. For lognormal input the fit runs on y = ln x.
inline Report run_on_data(std::vector<double> data, const RunRequest& req) {
  if (data.empty()) throw Error(Errc::EmptyDataset, "no values to fit");
  const bool lognormal = req.distribution == Distribution::Lognormal;
  double log_jacobian = 0.0;  // sum of -ln x, converts the y-likelihood to x units
  if (lognormal) {
    for (double& x : data) {
      if (!(x > 0.0)) {
        throw Error(Errc::NonPositiveData, "lognormal data must be > 0, found " + std::to_string(x));
      }
      x = std::log(x);
      log_jacobian -= x;
    }
  }

  const auto [lo_it, hi_it] = std::minmax_element(data.begin(), data.end());
  double y_lo = *lo_it;
  double y_hi = *hi_it;
  if (req.bounds) {
    auto [b_lo, b_hi] = *req.bounds;
    if (lognormal) {
      if (!(b_lo > 0.0) || !(b_hi > 0.0)) {
        throw Error(Errc::NonPositiveData, "lognormal bounds must be > 0");
      }
      b_lo = std::log(b_lo);
      b_hi = std::log(b_hi);
    }
    if (b_lo > y_lo || b_hi < y_hi) {
      throw Error(Errc::BoundsDoNotBracketData, "bounds must contain every observation");
    }
    y_lo = b_lo;
    y_hi = b_hi;
  }
  const Interval support{y_lo, y_hi};
  const SampleMoments s = compute_moments(data);

  const FitReport fit_report = req.constrain_psi_zero
                                   ? fit_exponential(s, support, req.fit, req.quadrature)
                                   : fit(s, support, req.fit, req.quadrature);

  Report r;
  r.alpha = fit_report.model.alpha();
  r.psi = fit_report.model.psi();
  r.beta = r.alpha + 1.0;
  if (fit_report.standard) {
    r.mu = fit_report.standard->mu;
    r.sigma = fit_report.standard->sigma;
  }
  r.y_min = support.lo;
  r.y_max = support.hi;
  if (lognormal) {
    const LognormalView view = lognormal_view(fit_report.model);
    r.x_min = view.x_bounds.lo;
    r.x_max = view.x_bounds.hi;
  }
  r.log_likelihood = fit_report.log_likelihood + log_jacobian;
  r.iterations = fit_report.iterations;
  r.converged = fit_report.converged;
  r.eta_used = fit_report.eta_used;
  r.n = s.n;

  const char* limit = lognormal ? "power law" : "exponential";
  char buf[256];
  if (req.constrain_psi_zero) {
    std::snprintf(buf, sizeof buf,
                  "psi constrained to 0: %s fit with beta = %.12g (alpha = %.12g)", limit, r.beta,
                  r.alpha);
    r.power_law_note = buf;
  } else if (std::abs(r.psi) < kPowerLawNoteThreshold) {
    std::snprintf(buf, sizeof buf,
                  "|psi| < %.0e: close to the %s limit with beta = %.12g; reporting threshold "
                  "only, not a statistical test",
                  kPowerLawNoteThreshold, limit, r.beta);
    r.power_law_note = buf;
  }
  return r;
}

inline Report run(const RunRequest& req) { return run_on_data(ingest(req.input_path), req); }

/// 0 when converged, 2 otherwise. Errors (exit 1) are reported by throwing.
inline int exit_code(const Report& r) noexcept { return r.converged ? 0 : 2; }

namespace detail {

inline std::string format_number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string format_optional(const std::optional<double>& v) {
  return v ? format_number(*v) : "null";
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (const char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace detail

/// Flat JSON object, keys in a fixed order, numbers with 12 significant
/// digits. Identical reports serialise to identical bytes.
inline std::string to_json(const Report& r) {
  using detail::format_number;
  using detail::format_optional;
  std::ostringstream os;
  os << "{\n"
     << "  \"alpha\": " << format_number(r.alpha) << ",\n"
     << "  \"psi\": " << format_number(r.psi) << ",\n"
     << "  \"beta\": " << format_number(r.beta) << ",\n"
     << "  \"mu\": " << format_optional(r.mu) << ",\n"
     << "  \"sigma\": " << format_optional(r.sigma) << ",\n"
     << "  \"y_min\": " << format_number(r.y_min) << ",\n"
     << "  \"y_max\": " << format_number(r.y_max) << ",\n"
     << "  \"x_min\": " << format_optional(r.x_min) << ",\n"
     << "  \"x_max\": " << format_optional(r.x_max) << ",\n"
     << "  \"log_likelihood\": " << format_number(r.log_likelihood) << ",\n"
     << "  \"iterations\": " << r.iterations << ",\n"
     << "  \"converged\": " << (r.converged ? "true" : "false") << ",\n"
     << "  \"eta_used\": " << format_number(r.eta_used) << ",\n"
     << "  \"n\": " << r.n << ",\n"
     << "  \"power_law_note\": \"" << detail::json_escape(r.power_law_note) << "\"\n"
     << "}\n";
  return os.str();
}

inline std::string to_text(const Report& r) {
  using detail::format_number;
  using detail::format_optional;
  std::ostringstream os;
  os << "alpha           " << format_number(r.alpha) << '\n'
     << "psi             " << format_number(r.psi) << '\n'
     << "beta            " << format_number(r.beta) << '\n'
     << "mu              " << format_optional(r.mu) << '\n'
     << "sigma           " << format_optional(r.sigma) << '\n'
     << "y_min           " << format_number(r.y_min) << '\n'
     << "y_max           " << format_number(r.y_max) << '\n';
  if (r.x_min) os << "x_min           " << format_number(*r.x_min) << '\n';
  if (r.x_max) os << "x_max           " << format_number(*r.x_max) << '\n';
  os << "log_likelihood  " << format_number(r.log_likelihood) << '\n'
     << "iterations      " << r.iterations << '\n'
     << "converged       " << (r.converged ? "yes" : "no") << '\n'
     << "eta_used        " << format_number(r.eta_used) << '\n'
     << "n               " << r.n << '\n';
  if (!r.power_law_note.empty()) os << "note            " << r.power_law_note << '\n';
  return os.str();
}

/// Writes n draws from the model in the ingest format, 17 significant digits
/// so the file reads back to the same doubles.
inline void synth_command(const TruncatedModel& m, std::size_t n, std::uint64_t seed,
                          const std::string& out_path) {
  if (n == 0) throw Error(Errc::InvalidArgument, "-n must be at least 1");
  SamplerConfig cfg;
  cfg.seed = seed;
  const std::vector<double> values = sample(m, n, cfg);
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::WriteFailure, "cannot open '" + out_path + "' for writing");
  char buf[40];
  for (const double v : values) {
    const int len = std::snprintf(buf, sizeof buf, "%.17g\n", v);
    out.write(buf, len);
  }
  out.flush();
  if (!out) throw Error(Errc::WriteFailure, "write to '" + out_path + "' failed");
}

}  // namespace tnfit::cli

#endif  // TNFIT_CLI_HPP
