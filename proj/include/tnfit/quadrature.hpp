#ifndef TNFIT_QUADRATURE_HPP
#define TNFIT_QUADRATURE_HPP

// Integrals of u^k * exp(-alpha*u - psi*u^2) over a finite interval.
//
// Every result is reported relative to a shift S, the maximum of the exponent
// over the interval, so the integrand handed to the quadrature rule never
// exceeds 1. The true integral is value * exp(shift).
//
// The rule is composite Gauss-Legendre on uniform panels. The panel count is
// doubled until two successive levels agree to rel_tolerance, measured
// against the integral of |u|^k so odd moments near zero still terminate.
// Before any panel is laid down the interval is clipped to the region where
// the shifted exponent exceeds -kNegligibleExponent; outside of it the
// integrand is below exp(-200) and contributes nothing representable relative
// to the peak. This keeps narrow peaks on very wide supports resolvable.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "tnfit/error.hpp"

namespace tnfit {

/// Closed interval [lo, hi] with finite bounds and lo < hi.
struct Interval {
  double lo;
  double hi;

  Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
      throw Error(Errc::NonFiniteInput, "interval bounds must be finite");
    }
    if (!(lo < hi)) {
      throw Error(Errc::InvalidInterval,
                  "interval requires lo < hi, got [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
    }
  }

  double width() const noexcept { return hi - lo; }
  double midpoint() const noexcept { return lo + 0.5 * (hi - lo); }
  bool contains(double y) const noexcept { return y >= lo && y <= hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

struct QuadratureConfig {
  int node_count = 32;  // per panel
  int panel_count = 8;
  double rel_tolerance = 1e-10;

  void validate() const {
    if (node_count < 2) throw Error(Errc::InvalidArgument, "node_count must be >= 2");
    if (panel_count < 1) throw Error(Errc::InvalidArgument, "panel_count must be >= 1");
    if (!(rel_tolerance > 0.0 && rel_tolerance < 1.0)) {
      throw Error(Errc::InvalidArgument, "rel_tolerance must lie in (0, 1)");
    }
  }
};

/// value * exp(shift) is the integral.
struct ShiftedIntegral {
  double value;
  double shift;

  double log() const { return shift + std::log(value); }
};

/// Integrals for every power 0..MaxOrder, sharing one shift.
template <int MaxOrder>
struct ShiftedMoments {
  std::array<double, MaxOrder + 1> value;
  double shift;
};

struct LogNormalizer {
  double log_z;
  double shift;
};

namespace detail {

/// Beyond this depth below the peak the integrand is dropped.
inline constexpr double kNegligibleExponent = 200.0;
inline constexpr int kMaxDoublings = 16;

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

inline GaussLegendreRule compute_gauss_legendre(int n) {
  GaussLegendreRule rule;
  rule.nodes.assign(static_cast<std::size_t>(n), 0.0);
  rule.weights.assign(static_cast<std::size_t>(n), 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z_prev = z;
      z = z_prev - p1 / dp;
      if (std::abs(z - z_prev) <= 1e-16) break;
    }
    // Recompute the derivative at the converged root for the weight.
    {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -z;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = z;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

/// Rules are memoized per node count; the cache is shared and locked.
inline const GaussLegendreRule& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<const GaussLegendreRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<const GaussLegendreRule>(compute_gauss_legendre(n));
  return *slot;
}

/// Maximiser of g(u) = -alpha*u - psi*u^2 on an interval.
struct PeakedExponent {
  double alpha;
  double psi;
  double peak;    // argmax of g on the interval
  double shift;   // g(peak)
  bool interior;  // peak is the stationary point -alpha/(2 psi)

  /// g(u) - g(peak), in factored form so no large terms cancel.
  double shifted(double u) const noexcept {
    const double d = u - peak;
    return interior ? -psi * d * d : -d * (alpha + psi * (u + peak));
  }
};

/// A stretch [lo, hi] of the support, integrated in the local offset
/// t = u - anchor so the exponent stays accurate when |u| is large and the
/// stretch is narrow:
///     g(anchor + t) - g(peak) = base - t * (slope + psi*t).
struct Segment {
  double lo;
  double hi;
  double anchor;
  double base;
  double slope;  // alpha + 2 psi anchor
};

inline PeakedExponent locate_peak(double alpha, double psi, const Interval& iv) {
  if (!std::isfinite(alpha) || !std::isfinite(psi)) {
    throw Error(Errc::NonFiniteInput, "alpha and psi must be finite");
  }
  auto g = [&](double u) { return -alpha * u - psi * u * u; };
  PeakedExponent e{alpha, psi, iv.lo, g(iv.lo), false};
  if (const double g_hi = g(iv.hi); g_hi > e.shift) {
    e.peak = iv.hi;
    e.shift = g_hi;
  }
  if (psi > 0.0) {
    const double stationary = -alpha / (2.0 * psi);
    if (stationary > iv.lo && stationary < iv.hi) {
      e.peak = stationary;
      e.shift = alpha * alpha / (4.0 * psi);
      e.interior = true;
    }
  }
  if (!std::isfinite(e.shift)) {
    throw Error(Errc::NonFiniteInput, "exponent peak is not representable");
  }
  return e;
}

inline Segment make_segment(const PeakedExponent& e, double lo, double hi) {
  double anchor;
  if (e.interior && e.peak >= lo && e.peak <= hi) {
    anchor = e.peak;
  } else {
    anchor = e.shifted(lo) >= e.shifted(hi) ? lo : hi;
  }
  const double base = anchor == e.peak ? 0.0 : e.shifted(anchor);
  return {lo, hi, anchor, base, e.alpha + 2.0 * e.psi * anchor};
}

/// Parts of iv where g(u) - g(peak) >= -depth. At most two pieces, since the
/// region is a sublevel set of a quadratic.
inline std::vector<Segment> effective_segments(const PeakedExponent& e, const Interval& iv,
                                               double depth) {
  // In d = u - peak: psi*d^2 + slope*d - depth <= 0, slope = alpha + 2 psi peak.
  const double slope = e.interior ? 0.0 : e.alpha + 2.0 * e.psi * e.peak;
  std::vector<double> cuts{iv.lo};
  auto add_root = [&](double d) {
    const double u = e.peak + d;
    if (std::isfinite(u) && u > iv.lo && u < iv.hi) cuts.push_back(u);
  };
  if (e.psi == 0.0) {
    if (slope != 0.0) add_root(depth / slope);
  } else {
    const double disc = slope * slope + 4.0 * e.psi * depth;
    if (disc >= 0.0) {
      const double q = -0.5 * (slope + std::copysign(std::sqrt(disc), slope));
      if (q != 0.0) {
        add_root(q / e.psi);
        add_root(-depth / q);
      }
    }
  }
  cuts.push_back(iv.hi);
  std::sort(cuts.begin(), cuts.end());

  std::vector<std::array<double, 2>> kept;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    if (!(b > a)) continue;
    if (e.shifted(a + 0.5 * (b - a)) < -depth) continue;
    if (!kept.empty() && kept.back()[1] == a) {
      kept.back()[1] = b;
    } else {
      kept.push_back({a, b});
    }
  }
  std::vector<Segment> segments;
  for (const auto& [a, b] : kept) segments.push_back(make_segment(e, a, b));
  return segments;
}

template <int MaxOrder>
struct PanelSums {
  std::array<double, MaxOrder + 1> signed_sum{};
  std::array<double, MaxOrder + 1> abs_sum{};
};

template <int MaxOrder>
void accumulate_panels(const Segment& seg, double psi, int panels, const GaussLegendreRule& rule,
                       PanelSums<MaxOrder>& out) {
  const double t0 = seg.lo - seg.anchor;
  const double t1 = seg.hi - seg.anchor;
  if (!(t1 > t0)) return;
  const double panel_width = (t1 - t0) / panels;
  const double half = 0.5 * panel_width;
  const std::size_t n = rule.nodes.size();
  for (int p = 0; p < panels; ++p) {
    const double mid = t0 + (p + 0.5) * panel_width;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = mid + half * rule.nodes[i];
      const double u = seg.anchor + t;
      double term = half * rule.weights[i] * std::exp(seg.base - t * (seg.slope + psi * t));
      const double abs_u = std::abs(u);
      double abs_term = term;
      for (int k = 0; k <= MaxOrder; ++k) {
        out.signed_sum[static_cast<std::size_t>(k)] += term;
        out.abs_sum[static_cast<std::size_t>(k)] += abs_term;
        term *= u;
        abs_term *= abs_u;
      }
    }
  }
}

template <int MaxOrder>
PanelSums<MaxOrder> integrate_level(const std::vector<Segment>& segments, double psi, int panels,
                                    const GaussLegendreRule& rule) {
  PanelSums<MaxOrder> sums;
  for (const auto& seg : segments) accumulate_panels<MaxOrder>(seg, psi, panels, rule, sums);
  return sums;
}

template <int MaxOrder>
ShiftedMoments<MaxOrder> integrate(double alpha, double psi, const Interval& iv,
                                   const QuadratureConfig& cfg) {
  cfg.validate();
  const PeakedExponent e = locate_peak(alpha, psi, iv);
  const auto segments = effective_segments(e, iv, kNegligibleExponent);
  const GaussLegendreRule& rule = gauss_legendre(cfg.node_count);

  int panels = cfg.panel_count;
  PanelSums<MaxOrder> coarse = integrate_level<MaxOrder>(segments, psi, panels, rule);
  for (int level = 0; level < kMaxDoublings; ++level) {
    panels *= 2;
    PanelSums<MaxOrder> fine = integrate_level<MaxOrder>(segments, psi, panels, rule);
    bool converged = true;
    for (int k = 0; k <= MaxOrder; ++k) {
      const auto ks = static_cast<std::size_t>(k);
      const double diff = std::abs(fine.signed_sum[ks] - coarse.signed_sum[ks]);
      if (!std::isfinite(fine.signed_sum[ks]) ||
          diff > cfg.rel_tolerance * fine.abs_sum[ks]) {
        converged = false;
        break;
      }
    }
    if (converged) return {fine.signed_sum, e.shift};
    coarse = fine;
  }
  throw Error(Errc::ToleranceNotReached,
              "quadrature did not reach rel_tolerance after " + std::to_string(kMaxDoublings) +
                  " panel doublings");
}

}  // namespace detail

/// All integrals of u^k * exp(-alpha*u - psi*u^2 - shift) for k = 0..MaxOrder.
template <int MaxOrder>
ShiftedMoments<MaxOrder> exp_poly_integrals(double alpha, double psi, const Interval& iv,
                                            const QuadratureConfig& cfg = {}) {
  static_assert(MaxOrder >= 0 && MaxOrder <= 4, "orders above 4 are not needed");
  return detail::integrate<MaxOrder>(alpha, psi, iv, cfg);
}

inline ShiftedIntegral exp_poly_integral(int k, double alpha, double psi, const Interval& iv,
                                         const QuadratureConfig& cfg = {}) {
  switch (k) {
    case 0: { auto r = exp_poly_integrals<0>(alpha, psi, iv, cfg); return {r.value[0], r.shift}; }
    case 1: { auto r = exp_poly_integrals<1>(alpha, psi, iv, cfg); return {r.value[1], r.shift}; }
    case 2: { auto r = exp_poly_integrals<2>(alpha, psi, iv, cfg); return {r.value[2], r.shift}; }
    case 3: { auto r = exp_poly_integrals<3>(alpha, psi, iv, cfg); return {r.value[3], r.shift}; }
    case 4: { auto r = exp_poly_integrals<4>(alpha, psi, iv, cfg); return {r.value[4], r.shift}; }
    default:
      throw Error(Errc::InvalidArgument, "power k must be in {0,1,2,3,4}");
  }
}

/// log of the integral of exp(-alpha*u - psi*u^2) over iv.
inline LogNormalizer shifted_log_normalizer(double alpha, double psi, const Interval& iv,
                                            const QuadratureConfig& cfg = {}) {
  const auto r = exp_poly_integrals<0>(alpha, psi, iv, cfg);
  return {r.shift + std::log(r.value[0]), r.shift};
}

/// Hull of the part of iv that carries non-negligible mass.
inline Interval effective_support(double alpha, double psi, const Interval& iv) {
  const auto e = detail::locate_peak(alpha, psi, iv);
  const auto segments = detail::effective_segments(e, iv, detail::kNegligibleExponent);
  if (segments.empty()) return iv;
  return {segments.front().lo, segments.back().hi};
}

}  // namespace tnfit

#endif  // TNFIT_QUADRATURE_HPP
