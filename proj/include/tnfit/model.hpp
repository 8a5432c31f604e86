#ifndef TNFIT_MODEL_HPP
#define TNFIT_MODEL_HPP

// The truncated normal written as ln f(y) = -alpha*y - psi*y^2 - log_Z on a
// finite support. psi <= 0 is allowed: the density still exists on a bounded
// interval and is what the data asks for near the exponential limit.
//
// Lognormal data x enter through y = ln x, so the same model serves both; the
// lognormal exponent is beta = alpha + 1.

#include <cmath>
#include <limits>

#include "tnfit/error.hpp"
#include "tnfit/quadrature.hpp"
#include "tnfit/sample_moments.hpp"

namespace tnfit {

class TruncatedModel {
 public:
  TruncatedModel(double alpha, double psi, Interval support)
      : alpha_(alpha), psi_(psi), support_(support) {
    if (!std::isfinite(alpha_) || !std::isfinite(psi_)) {
      throw Error(Errc::NonFiniteInput, "alpha and psi must be finite");
    }
  }

  double alpha() const noexcept { return alpha_; }
  double psi() const noexcept { return psi_; }
  const Interval& support() const noexcept { return support_; }

  /// Same support, new parameters.
  TruncatedModel with_params(double alpha, double psi) const { return {alpha, psi, support_}; }

  friend bool operator==(const TruncatedModel&, const TruncatedModel&) = default;

 private:
  double alpha_;
  double psi_;
  Interval support_;
};

struct StandardParams {
  double mu;
  double sigma;
  double beta;
};

/// E(y^k | model) for k = 1..4.
struct ModelMoments {
  double e1;
  double e2;
  double e3;
  double e4;
};

struct LognormalView {
  double beta;
  double psi;
  Interval x_bounds;
};

inline double log_normalizer(const TruncatedModel& m, const QuadratureConfig& cfg = {}) {
  return shifted_log_normalizer(m.alpha(), m.psi(), m.support(), cfg).log_z;
}

inline double log_density(const TruncatedModel& m, double y, const QuadratureConfig& cfg = {}) {
  if (!m.support().contains(y)) {
    throw Error(Errc::OutOfSupport, "y = " + std::to_string(y) + " lies outside the support");
  }
  return -m.alpha() * y - m.psi() * y * y - log_normalizer(m, cfg);
}

/// Lambda = N * (-alpha*m1 - psi*m2 - log_Z). Only n, m1 and m2 enter.
inline double log_likelihood(const TruncatedModel& m, const SampleMoments& s,
                             const QuadratureConfig& cfg = {}) {
  const double n = static_cast<double>(s.n);
  return n * (-m.alpha() * s.m1 - m.psi() * s.m2 - log_normalizer(m, cfg));
}

inline ModelMoments model_moments(const TruncatedModel& m, const QuadratureConfig& cfg = {}) {
  const auto r = exp_poly_integrals<4>(m.alpha(), m.psi(), m.support(), cfg);
  const double z = r.value[0];
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw Error(Errc::ToleranceNotReached, "normalizing integral is not positive and finite");
  }
  return {r.value[1] / z, r.value[2] / z, r.value[3] / z, r.value[4] / z};
}

/// mu = -alpha/(2 psi), sigma = 1/sqrt(2 psi), beta = alpha + 1.
/// Throws PowerLawLimitError (carrying beta) when psi <= 0.
inline StandardParams to_standard(const TruncatedModel& m) {
  const double beta = m.alpha() + 1.0;
  if (!(m.psi() > 0.0)) throw PowerLawLimitError(beta);
  return {-m.alpha() / (2.0 * m.psi()), 1.0 / std::sqrt(2.0 * m.psi()), beta};
}

inline TruncatedModel from_standard(double mu, double sigma, Interval support) {
  if (!std::isfinite(mu) || !std::isfinite(sigma)) {
    throw Error(Errc::NonFiniteInput, "mu and sigma must be finite");
  }
  if (!(sigma > 0.0)) throw Error(Errc::InvalidSigma, "sigma must be positive");
  const double psi = 1.0 / (2.0 * sigma * sigma);
  return {-2.0 * psi * mu, psi, support};
}

inline LognormalView lognormal_view(const TruncatedModel& m) {
  const double x_lo = std::exp(m.support().lo);
  const double x_hi = std::exp(m.support().hi);
  if (!std::isfinite(x_hi) || !(x_lo > 0.0) || !(x_lo < x_hi)) {
    throw Error(Errc::OverflowBounds, "exp of the support bounds is not representable");
  }
  return {m.alpha() + 1.0, m.psi(), Interval{x_lo, x_hi}};
}

}  // namespace tnfit

#endif  // TNFIT_MODEL_HPP
