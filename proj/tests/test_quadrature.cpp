#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "tnfit/quadrature.hpp"

using tnfit::Errc;
using tnfit::Error;
using tnfit::Interval;
using tnfit::QuadratureConfig;

namespace {

double true_value(const tnfit::ShiftedIntegral& r) { return r.value * std::exp(r.shift); }

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no tnfit::Error thrown";
  return Errc::InvalidArgument;
}

}  // namespace

TEST(Interval, RejectsEmptyOrNonFinite) {
  EXPECT_EQ(code_of([] { Interval{1.0, 1.0}; }), Errc::InvalidInterval);
  EXPECT_EQ(code_of([] { Interval{2.0, 1.0}; }), Errc::InvalidInterval);
  EXPECT_EQ(code_of([] { Interval{0.0, INFINITY}; }), Errc::NonFiniteInput);
}

TEST(GaussLegendre, WeightsSumToTwoAndIntegrateHighDegree) {
  for (int n : {2, 3, 7, 32, 64}) {
    const auto& rule = tnfit::detail::gauss_legendre(n);
    double sum = 0.0;
    double x_pow = 0.0;
    const int degree = 2 * n - 2;  // even and < 2n
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      sum += rule.weights[i];
      x_pow += rule.weights[i] * std::pow(rule.nodes[i], degree);
    }
    EXPECT_NEAR(sum, 2.0, 1e-14) << n;
    EXPECT_NEAR(x_pow, 2.0 / (degree + 1), 1e-14) << n;
  }
}

TEST(ExpPolyIntegral, ConstantIntegrandOnUnitInterval) {
  const auto r = tnfit::exp_poly_integral(0, 0.0, 0.0, {0.0, 1.0});
  EXPECT_DOUBLE_EQ(r.shift, 0.0);
  EXPECT_NEAR(r.value, 1.0, 1e-14);
}

TEST(ExpPolyIntegral, OddMomentVanishesOnSymmetricInterval) {
  const auto r1 = tnfit::exp_poly_integral(1, 0.0, 0.5, {-2.0, 2.0});
  const auto r0 = tnfit::exp_poly_integral(0, 0.0, 0.5, {-2.0, 2.0});
  EXPECT_NEAR(r1.value, 0.0, 1e-12 * r0.value);
}

TEST(ExpPolyIntegral, GaussianMatchesErrorFunction) {
  const auto r = tnfit::exp_poly_integral(0, 0.0, 0.5, {-1.0, 1.0});
  EXPECT_DOUBLE_EQ(r.shift, 0.0);
  // sqrt(2 pi) (Phi(1) - Phi(-1)), evaluated with mpmath at 30 digits.
  EXPECT_NEAR(r.value, 1.71124878378429760634660924056, 1e-14);
  EXPECT_NEAR(r.value, oracle::gaussian_integral(0.5, -1.0, 1.0), 1e-14);
}

TEST(ExpPolyIntegral, MatchesSimpsonOnGenericParameters) {
  const Interval iv{-1.5, 2.5};
  for (int k = 0; k <= 4; ++k) {
    const auto r = tnfit::exp_poly_integral(k, 0.7, -0.3, iv);
    const double ref = oracle::simpson_moment(k, 0.7, -0.3, iv.lo, iv.hi);
    EXPECT_NEAR(true_value(r), ref, 1e-10 * std::abs(ref) + 1e-13) << "k=" << k;
  }
}

TEST(ExpPolyIntegral, PolynomialExactness) {
  const Interval iv{-0.7, 2.3};
  for (int k = 0; k <= 4; ++k) {
    const auto r = tnfit::exp_poly_integral(k, 0.0, 0.0, iv);
    const double exact = (std::pow(iv.hi, k + 1) - std::pow(iv.lo, k + 1)) / (k + 1);
    EXPECT_NEAR(r.value, exact, 1e-12 * std::abs(exact)) << "k=" << k;
  }
}

TEST(ExpPolyIntegral, SymmetryForAllOddPowers) {
  for (double psi : {-0.8, 0.0, 0.3, 4.0}) {
    const Interval iv{-3.0, 3.0};
    const double base = tnfit::exp_poly_integral(0, 0.0, psi, iv).value;
    for (int k : {1, 3}) {
      EXPECT_NEAR(tnfit::exp_poly_integral(k, 0.0, psi, iv).value, 0.0, 1e-12 * base)
          << "psi=" << psi << " k=" << k;
    }
  }
}

TEST(ExpPolyIntegral, SplittingTheIntervalIsAdditive) {
  const QuadratureConfig cfg;
  const double alpha = 1.3, psi = 0.4;
  const Interval whole{-2.0, 3.0};
  for (double cut : {-1.2, 0.0, 0.77, 2.9}) {
    const auto w = tnfit::exp_poly_integrals<4>(alpha, psi, whole, cfg);
    const auto left = tnfit::exp_poly_integrals<4>(alpha, psi, {whole.lo, cut}, cfg);
    const auto right = tnfit::exp_poly_integrals<4>(alpha, psi, {cut, whole.hi}, cfg);
    for (std::size_t k = 0; k <= 4; ++k) {
      const double total = w.value[k] * std::exp(w.shift);
      const double parts =
          left.value[k] * std::exp(left.shift) + right.value[k] * std::exp(right.shift);
      const double scale = oracle::simpson_moment(static_cast<int>(k) % 2 == 0 ? static_cast<int>(k) : 0,
                                                  alpha, psi, whole.lo, whole.hi, 2000);
      EXPECT_NEAR(parts, total, 2.0 * cfg.rel_tolerance * std::max(1.0, std::abs(scale)))
          << "cut=" << cut << " k=" << k;
    }
  }
}

TEST(ExpPolyIntegral, RefinementDoesNotWorsenAgainstFineReference) {
  const double alpha = -2.0, psi = 1.7;
  const Interval iv{-4.0, 5.0};
  QuadratureConfig fine;
  fine.node_count = 64;
  fine.panel_count = 80;
  fine.rel_tolerance = 1e-13;
  const auto ref = tnfit::exp_poly_integrals<4>(alpha, psi, iv, fine);

  QuadratureConfig cfg;
  cfg.rel_tolerance = 1e-6;
  double previous = INFINITY;
  for (int panels : {1, 2, 4, 8, 16}) {
    cfg.panel_count = panels;
    const auto r = tnfit::exp_poly_integrals<4>(alpha, psi, iv, cfg);
    const double err = std::abs(r.value[2] - ref.value[2]) / ref.value[2];
    EXPECT_LE(err, previous + cfg.rel_tolerance);
    previous = err;
  }
}

TEST(ShiftedLogNormalizer, ClosedForms) {
  EXPECT_NEAR(tnfit::shifted_log_normalizer(0.0, 0.0, {0.0, 1.0}).log_z, 0.0, 1e-14);
  EXPECT_NEAR(tnfit::shifted_log_normalizer(0.0, 0.0, {0.0, std::exp(1.0)}).log_z, 1.0, 1e-14);
  // ln(1 - e^{-10}), mpmath.
  EXPECT_NEAR(tnfit::shifted_log_normalizer(1.0, 0.0, {0.0, 10.0}).log_z,
              -0.0000454009603704892095044463598752, 1e-13);
}

TEST(ShiftedLogNormalizer, AbsorbsHugeExponents) {
  const auto r = tnfit::shifted_log_normalizer(-1000.0, 0.0, {0.0, 1.0});
  ASSERT_TRUE(std::isfinite(r.log_z));
  EXPECT_DOUBLE_EQ(r.shift, 1000.0);
  // ln((e^{1000} - 1)/1000) = 1000 - ln(1000) + ln(1 - e^{-1000})
  EXPECT_NEAR(r.log_z, 1000.0 - std::log(1000.0), 1e-10);
}

TEST(ShiftedLogNormalizer, FiniteAcrossExtremeParameters) {
  for (double alpha : {-1e6, -3.0, 0.0, 5.0, 1e6}) {
    for (double psi : {-1e6, -1.0, 0.0, 1e-3, 1e6}) {
      for (auto [lo, hi] : {std::pair{-1e6, 1e6}, std::pair{-1.0, 2.0}, std::pair{1e5, 1e6}}) {
        const auto r = tnfit::shifted_log_normalizer(alpha, psi, {lo, hi});
        EXPECT_TRUE(std::isfinite(r.log_z)) << alpha << ' ' << psi << ' ' << lo << ' ' << hi;
      }
    }
  }
}

TEST(ShiftedLogNormalizer, NarrowPeakOnWideSupportMatchesGaussian) {
  // psi = 1e6 on [-1e6, 1e6]: essentially the full Gaussian integral sqrt(pi/psi).
  const auto r = tnfit::shifted_log_normalizer(0.0, 1e6, {-1e6, 1e6});
  EXPECT_NEAR(r.log_z, 0.5 * std::log(std::numbers::pi / 1e6), 1e-10);
}

TEST(ExpPolyIntegral, ErrorContracts) {
  EXPECT_EQ(code_of([] { tnfit::exp_poly_integral(5, 0.0, 0.0, {0.0, 1.0}); }),
            Errc::InvalidArgument);
  EXPECT_EQ(code_of([] { tnfit::exp_poly_integral(0, NAN, 0.0, {0.0, 1.0}); }),
            Errc::NonFiniteInput);
  EXPECT_EQ(code_of([] { tnfit::exp_poly_integral(0, 0.0, INFINITY, {0.0, 1.0}); }),
            Errc::NonFiniteInput);
  QuadratureConfig bad;
  bad.node_count = 1;
  EXPECT_EQ(code_of([&] { tnfit::exp_poly_integral(0, 0.0, 0.0, {0.0, 1.0}, bad); }),
            Errc::InvalidArgument);
  // An unreachable tolerance (below double rounding) must stall, not loop.
  QuadratureConfig tight;
  tight.rel_tolerance = 1e-300;
  tight.node_count = 2;
  tight.panel_count = 1;
  EXPECT_EQ(code_of([&] { tnfit::exp_poly_integral(0, 0.3, 0.9, {-5.0, 7.0}, tight); }),
            Errc::ToleranceNotReached);
}
