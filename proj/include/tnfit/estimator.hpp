#ifndef TNFIT_ESTIMATOR_HPP
#define TNFIT_ESTIMATOR_HPP

// Maximum likelihood for the truncated normal in (alpha, psi) form.
//
// The likelihood equations are the moment conditions
//     E(y | alpha, psi) = m1,   E(y^2 | alpha, psi) = m2.
// Each iteration moves (alpha, psi) by eta times the solution of the linear
// system whose matrix is the Jacobian of (E(y), E(y^2)) with model moments
// replaced by sample moments:
//     [ -(m2 - m1^2)      -(m3 - m1*m2) ] [da]   [ eta * r1 ]
//     [ -(m3 - m1*m2)     -(m4 - m2^2)  ] [dp] = [ eta * r2 ]
// with r = (m1 - E(y), m2 - E(y^2)). The inverse of that matrix is fixed by
// the data, so its entries (a, b, c) are computed once per fit.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "tnfit/error.hpp"
#include "tnfit/model.hpp"
#include "tnfit/quadrature.hpp"
#include "tnfit/sample_moments.hpp"

namespace tnfit {

/// Entries of the inverse sample-moment Jacobian: [[a, b], [b, c]].
struct UpdateCoefficients {
  double a;
  double b;
  double c;
  double h;
};

struct StartingPoint {
  double alpha;
  double psi;
};

struct FitConfig {
  double eta = 0.33;
  double tol_alpha = 1e-8;
  double tol_psi = 1e-8;
  int max_iterations = 10000;
  double eta_backoff_factor = 0.5;
  std::optional<StartingPoint> init_override;

  void validate() const {
    if (!(eta > 0.0 && eta < 1.0)) throw Error(Errc::InvalidArgument, "eta must lie in (0, 1)");
    if (!(tol_alpha > 0.0) || !(tol_psi > 0.0)) {
      throw Error(Errc::InvalidArgument, "tolerances must be positive");
    }
    if (max_iterations < 1) throw Error(Errc::InvalidArgument, "max_iterations must be >= 1");
    if (!(eta_backoff_factor > 0.0 && eta_backoff_factor < 1.0)) {
      throw Error(Errc::InvalidArgument, "eta_backoff_factor must lie in (0, 1)");
    }
  }
};

struct StepResult {
  double delta_alpha;
  double delta_psi;
  double r1;  // m1 - E(y)
  double r2;  // m2 - E(y^2)
};

struct FitReport {
  TruncatedModel model;
  std::optional<StandardParams> standard;
  bool converged = false;
  int iterations = 0;  // in the attempt that produced the report
  int restarts = 0;    // eta reductions after overflow
  double final_delta_alpha = 0.0;
  double final_delta_psi = 0.0;
  double log_likelihood = 0.0;
  double residual_m1 = 0.0;
  double residual_m2 = 0.0;
  double eta_used = 0.0;
};

/// Below this eta the overflow backoff gives up.
inline constexpr double kMinEta = 1e-6;

namespace detail {

/// Iterates are abandoned (and eta reduced) once a parameter leaves this
/// magnitude; the exponent peak would no longer be representable.
inline constexpr double kParameterCeiling = 1e150;

inline void require_support_consistent(const SampleMoments& s, const Interval& support) {
  const double lo2 = support.lo * support.lo;
  const double hi2 = support.hi * support.hi;
  const double max_sq = std::max(lo2, hi2);
  const double min_sq = (support.lo <= 0.0 && support.hi >= 0.0) ? 0.0 : std::min(lo2, hi2);
  const double slack = 1e-12 * std::max(1.0, max_sq);
  if (s.m1 < support.lo - 1e-12 * std::max(1.0, std::abs(support.lo)) ||
      s.m1 > support.hi + 1e-12 * std::max(1.0, std::abs(support.hi)) ||
      s.m2 > max_sq + slack || s.m2 < min_sq - slack) {
    throw Error(Errc::PreconditionViolation, "sample moments are impossible for the given support");
  }
}

inline bool finite_all(double a, double b, double c, double d) {
  return std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d);
}

}  // namespace detail

inline UpdateCoefficients update_coefficients(const SampleMoments& s) {
  s.validate();
  const double m1 = s.m1, m2 = s.m2, m3 = s.m3, m4 = s.m4;
  // h = m4 (m1^2 - m2) + m3 (m3 - 2 m1 m2) + m2^3, evaluated as the negated
  // determinant of the (y, y^2) covariance, which is the same polynomial.
  const double var_y = m2 - m1 * m1;
  const double cov = m3 - m1 * m2;
  const double var_y2 = m4 - m2 * m2;
  const double h = -(var_y * var_y2 - cov * cov);
  if (!(std::abs(h) > 1e-12 * std::max(1.0, m2 * m2 * m2))) {
    throw Error(Errc::DegenerateSample,
                "covariance of (y, y^2) is singular; at least 3 distinct values are needed");
  }
  return {var_y2 / h, -cov / h, var_y / h, h};
}

/// Untruncated-normal moment inversion: psi0 = 1/(2v), alpha0 = -m1/v.
inline StartingPoint initialize(const SampleMoments& s) {
  const double v = s.variance();
  if (!(v > 1e-14)) throw Error(Errc::DegenerateSample, "sample variance is zero");
  return {-s.m1 / v, 1.0 / (2.0 * v)};
}

inline StepResult step(double alpha, double psi, const SampleMoments& s,
                       const UpdateCoefficients& coef, double eta, const Interval& support,
                       const QuadratureConfig& cfg = {}) {
  if (!(eta > 0.0 && eta < 1.0)) throw Error(Errc::InvalidArgument, "eta must lie in (0, 1)");
  ModelMoments e;
  try {
    e = model_moments(TruncatedModel{alpha, psi, support}, cfg);
  } catch (const Error& err) {
    throw Error(Errc::StepOverflow, err.what());
  }
  StepResult r;
  r.r1 = s.m1 - e.e1;
  r.r2 = s.m2 - e.e2;
  r.delta_alpha = eta * (coef.a * r.r1 + coef.b * r.r2);
  r.delta_psi = eta * (coef.b * r.r1 + coef.c * r.r2);
  if (!detail::finite_all(r.r1, r.r2, r.delta_alpha, r.delta_psi)) {
    throw Error(Errc::StepOverflow, "non-finite moment residuals or step");
  }
  return r;
}

namespace detail {

/// Shared driver: `advance` maps (alpha, psi, eta) to a StepResult and
/// throws StepOverflow on numeric trouble. Restarts from `start` with a
/// reduced eta after each overflow.
template <typename Advance>
FitReport run_iteration(const SampleMoments& s, const Interval& support, const FitConfig& fit_cfg,
                        const QuadratureConfig& quad_cfg, StartingPoint start, bool psi_fixed,
                        Advance&& advance) {
  double eta = fit_cfg.eta;
  int restarts = 0;
  for (;;) {
    double alpha = start.alpha;
    double psi = start.psi;
    StepResult last{};
    int iterations = 0;
    bool converged = false;
    bool overflow = false;
    try {
      while (iterations < fit_cfg.max_iterations) {
        last = advance(alpha, psi, eta);
        alpha += last.delta_alpha;
        psi += last.delta_psi;
        ++iterations;
        if (!std::isfinite(alpha) || !std::isfinite(psi) ||
            std::abs(alpha) > kParameterCeiling || std::abs(psi) > kParameterCeiling) {
          throw Error(Errc::StepOverflow, "parameters left the representable range");
        }
        if (std::abs(last.delta_alpha) < fit_cfg.tol_alpha &&
            std::abs(last.delta_psi) < fit_cfg.tol_psi) {
          converged = true;
          break;
        }
      }
    } catch (const Error& err) {
      if (err.code() != Errc::StepOverflow) throw;
      overflow = true;
    }

    if (overflow) {
      eta *= fit_cfg.eta_backoff_factor;
      ++restarts;
      if (eta < kMinEta) {
        throw Error(Errc::EtaExhausted, "eta fell below " + std::to_string(kMinEta) +
                                            " after repeated overflow");
      }
      continue;
    }

    FitReport report{TruncatedModel{alpha, psi, support}};
    report.converged = converged;
    report.iterations = iterations;
    report.restarts = restarts;
    report.final_delta_alpha = last.delta_alpha;
    report.final_delta_psi = last.delta_psi;
    report.eta_used = eta;
    try {
      const ModelMoments e = model_moments(report.model, quad_cfg);
      report.residual_m1 = s.m1 - e.e1;
      report.residual_m2 = s.m2 - e.e2;
      report.log_likelihood = log_likelihood(report.model, s, quad_cfg);
    } catch (const Error& err) {
      if (err.code() != Errc::ToleranceNotReached && err.code() != Errc::NonFiniteInput) throw;
      eta *= fit_cfg.eta_backoff_factor;
      ++restarts;
      if (eta < kMinEta) throw Error(Errc::EtaExhausted, "eta fell below minimum");
      continue;
    }
    if (!psi_fixed && psi > 0.0) report.standard = to_standard(report.model);
    return report;
  }
}

}  // namespace detail

/// Full two-parameter fit. A non-converged report (converged == false) is
/// returned rather than thrown when max_iterations runs out.
inline FitReport fit(const SampleMoments& s, const Interval& support, const FitConfig& fit_cfg = {},
                     const QuadratureConfig& quad_cfg = {}) {
  fit_cfg.validate();
  quad_cfg.validate();
  s.validate();
  if (s.n < 3) throw Error(Errc::DegenerateSample, "at least 3 observations are needed");
  detail::require_support_consistent(s, support);
  const UpdateCoefficients coef = update_coefficients(s);
  const StartingPoint start = fit_cfg.init_override.value_or(initialize(s));
  return detail::run_iteration(s, support, fit_cfg, quad_cfg, start, false,
                               [&](double alpha, double psi, double eta) {
                                 return step(alpha, psi, s, coef, eta, support, quad_cfg);
                               });
}

/// psi held at 0: a truncated exponential in y (a power law in x = e^y).
/// One-dimensional version of the same scheme,
///     delta_alpha = eta * (m1 - E(y | alpha, 0)) / (-(m2 - m1^2)).
inline FitReport fit_exponential(const SampleMoments& s, const Interval& support,
                                 const FitConfig& fit_cfg = {},
                                 const QuadratureConfig& quad_cfg = {}) {
  fit_cfg.validate();
  quad_cfg.validate();
  s.validate();
  if (s.n < 2) throw Error(Errc::DegenerateSample, "at least 2 observations are needed");
  if (!(s.m1 > support.lo && s.m1 < support.hi)) {
    throw Error(Errc::PreconditionViolation,
                "sample mean must lie strictly inside the support for an exponential fit");
  }
  detail::require_support_consistent(s, support);
  const double v = s.variance();
  if (!(v > 1e-14)) throw Error(Errc::DegenerateSample, "sample variance is zero");
  const StartingPoint start{fit_cfg.init_override ? fit_cfg.init_override->alpha : 0.0, 0.0};
  return detail::run_iteration(
      s, support, fit_cfg, quad_cfg, start, true, [&](double alpha, double, double eta) {
        ModelMoments e;
        try {
          e = model_moments(TruncatedModel{alpha, 0.0, support}, quad_cfg);
        } catch (const Error& err) {
          throw Error(Errc::StepOverflow, err.what());
        }
        StepResult r;
        r.r1 = s.m1 - e.e1;
        r.r2 = s.m2 - e.e2;
        r.delta_alpha = eta * r.r1 / (-v);
        r.delta_psi = 0.0;
        if (!detail::finite_all(r.r1, r.r2, r.delta_alpha, 0.0)) {
          throw Error(Errc::StepOverflow, "non-finite moment residual or step");
        }
        return r;
      });
}

}  // namespace tnfit

#endif  // TNFIT_ESTIMATOR_HPP
