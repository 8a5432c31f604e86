#ifndef TNFIT_SAMPLE_MOMENTS_HPP
#define TNFIT_SAMPLE_MOMENTS_HPP

#include <cmath>
#include <cstddef>
#include <ranges>
#include <string>
#include <type_traits>

#include "tnfit/error.hpp"

namespace tnfit {

/// Raw sampling means of y, y^2, y^3, y^4 and the sample size. These are the
/// sufficient statistics for everything the estimator does.
struct SampleMoments {
  std::size_t n = 0;
  double m1 = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;

  double variance() const noexcept { return m2 - m1 * m1; }

  /// Throws unless the moments are finite and consistent with some data set.
  /// The inequalities are checked with a small relative slack so constant
  /// samples survive rounding.
  void validate() const {
    if (n == 0) throw Error(Errc::EmptySample, "sample moments describe zero observations");
    if (!std::isfinite(m1) || !std::isfinite(m2) || !std::isfinite(m3) || !std::isfinite(m4)) {
      throw Error(Errc::NonFiniteValue, "sample moments must be finite");
    }
    constexpr double slack = 1e-12;
    if (m2 < 0.0 || m4 < 0.0 || m2 < m1 * m1 - slack * (m1 * m1) ||
        m4 < m2 * m2 - slack * (m2 * m2)) {
      throw Error(Errc::PreconditionViolation,
                  "sample moments violate m2 >= m1^2 or m4 >= m2^2");
    }
  }
};

template <std::ranges::input_range R>
  requires std::is_arithmetic_v<std::ranges::range_value_t<R>>
SampleMoments compute_moments(R&& sample) {
  SampleMoments s;
  double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
  for (const auto raw : sample) {
    const double y = static_cast<double>(raw);
    if (!std::isfinite(y)) {
      throw Error(Errc::NonFiniteValue,
                  "observation " + std::to_string(s.n + 1) + " is not finite");
    }
    const double y2 = y * y;
    s1 += y;
    s2 += y2;
    s3 += y2 * y;
    s4 += y2 * y2;
    ++s.n;
  }
  if (s.n == 0) throw Error(Errc::EmptySample, "sample is empty");
  const double inv_n = 1.0 / static_cast<double>(s.n);
  s.m1 = s1 * inv_n;
  s.m2 = s2 * inv_n;
  s.m3 = s3 * inv_n;
  s.m4 = s4 * inv_n;
  return s;
}

}  // namespace tnfit

#endif  // TNFIT_SAMPLE_MOMENTS_HPP
