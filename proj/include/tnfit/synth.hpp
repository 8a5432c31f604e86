#ifndef TNFIT_SYNTH_HPP
#define TNFIT_SYNTH_HPP

// Seeded synthetic data from a TruncatedModel, and a brute-force maximiser of
// the log-likelihood used to cross-check the estimator.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "tnfit/error.hpp"
#include "tnfit/model.hpp"
#include "tnfit/quadrature.hpp"

namespace tnfit {

/// splitmix64. The update and output mix are fixed so sequences are
/// reproducible bit for bit in any language.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on the open interval (0, 1), 53 bits.
  double uniform() noexcept {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

enum class SamplerMethod { InverseCdfTable, Rejection };

struct SamplerConfig {
  std::uint64_t seed = 0;
  SamplerMethod method = SamplerMethod::InverseCdfTable;
  int table_resolution = 4096;

  void validate() const {
    if (table_resolution < 1) throw Error(Errc::InvalidArgument, "table_resolution must be positive");
    if (method == SamplerMethod::InverseCdfTable && table_resolution < 256) {
      throw Error(Errc::InvalidArgument, "table_resolution must be >= 256 for the inverse-CDF method");
    }
  }
};

/// Piecewise-linear CDF tabulated on equally spaced knots over the part of
/// the support that carries mass. Cell masses come from Gauss-Legendre on
/// each cell; the table is normalised so it runs exactly from 0 to 1.
class CdfTable {
 public:
  CdfTable(const TruncatedModel& m, int resolution, const QuadratureConfig& cfg = {}) {
    if (resolution < 1) throw Error(Errc::InvalidArgument, "resolution must be positive");
    cfg.validate();
    const auto peak = detail::locate_peak(m.alpha(), m.psi(), m.support());
    const Interval span = effective_support(m.alpha(), m.psi(), m.support());
    const auto& rule = detail::gauss_legendre(cfg.node_count);

    const auto cells = static_cast<std::size_t>(resolution);
    knots_.resize(cells + 1);
    cdf_.resize(cells + 1);
    const double dy = span.width() / static_cast<double>(resolution);
    for (std::size_t i = 0; i <= cells; ++i) knots_[i] = span.lo + dy * static_cast<double>(i);
    knots_.back() = span.hi;

    cdf_[0] = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
      const double a = knots_[i];
      const double b = knots_[i + 1];
      const double half = 0.5 * (b - a);
      const double mid = a + half;
      double mass = 0.0;
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        mass += rule.weights[j] * std::exp(peak.shifted(mid + half * rule.nodes[j]));
      }
      cdf_[i + 1] = cdf_[i] + half * mass;
    }
    const double total = cdf_.back();
    if (!(total > 0.0) || !std::isfinite(total)) {
      throw Error(Errc::ToleranceNotReached, "CDF table has no mass");
    }
    for (double& c : cdf_) c /= total;
    cdf_.back() = 1.0;
  }

  std::span<const double> knots() const noexcept { return knots_; }
  std::span<const double> cdf() const noexcept { return cdf_; }

  /// Linear interpolation of the inverse CDF; p in [0, 1].
  double quantile(double p) const noexcept {
    if (p <= 0.0) return knots_.front();
    if (p >= 1.0) return knots_.back();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), p);
    const auto hi = static_cast<std::size_t>(it - cdf_.begin());
    const std::size_t lo = hi - 1;
    const double width = cdf_[hi] - cdf_[lo];
    const double frac = width > 0.0 ? (p - cdf_[lo]) / width : 0.5;
    const double y = knots_[lo] + frac * (knots_[hi] - knots_[lo]);
    return std::clamp(y, knots_[lo], knots_[hi]);
  }

 private:
  std::vector<double> knots_;
  std::vector<double> cdf_;
};

inline std::vector<double> sample(const TruncatedModel& m, std::size_t n, const SamplerConfig& cfg,
                                  const QuadratureConfig& quad_cfg = {}) {
  cfg.validate();
  if (n == 0) throw Error(Errc::InvalidArgument, "sample size must be positive");
  SplitMix64 rng(cfg.seed);
  std::vector<double> out;
  out.reserve(n);
  const Interval& support = m.support();

  if (cfg.method == SamplerMethod::InverseCdfTable) {
    const CdfTable table(m, cfg.table_resolution, quad_cfg);
    for (std::size_t i = 0; i < n; ++i) out.push_back(table.quantile(rng.uniform()));
  } else {
    // Uniform proposal over the massive region, accepted with probability
    // exp(g(y) - max g) <= 1.
    const auto peak = detail::locate_peak(m.alpha(), m.psi(), support);
    const Interval span = effective_support(m.alpha(), m.psi(), support);
    while (out.size() < n) {
      const double y = span.lo + span.width() * rng.uniform();
      if (rng.uniform() < std::exp(peak.shifted(y))) out.push_back(y);
    }
  }
  for (const double y : out) {
    if (!support.contains(y)) throw Error(Errc::OutOfSupport, "sampler left the support");
  }
  return out;
}

struct GridOptimum {
  double alpha;
  double psi;
  double loglik;
};

/// Exhaustive search of the log-likelihood over an alpha x psi grid, then two
/// rounds of 10x zoom centred on the best point so far. The log-likelihood is
/// summed over the raw observations and does not go through SampleMoments.
inline GridOptimum grid_mle_oracle(std::span<const double> data, const Interval& support,
                                   const Interval& alpha_range, const Interval& psi_range,
                                   int grid_size, const QuadratureConfig& cfg = {}) {
  if (grid_size < 11) throw Error(Errc::InvalidArgument, "grid_size must be >= 11");
  if (data.empty()) throw Error(Errc::EmptySample, "sample is empty");
  for (const double y : data) {
    if (!support.contains(y)) throw Error(Errc::OutOfSupport, "observation outside the support");
  }
  const double n = static_cast<double>(data.size());
  auto loglik = [&](double alpha, double psi) {
    double sum = 0.0;
    for (const double y : data) sum += -alpha * y - psi * y * y;
    return sum - n * shifted_log_normalizer(alpha, psi, support, cfg).log_z;
  };

  GridOptimum best{0.0, 0.0, -std::numeric_limits<double>::infinity()};
  double a_lo = alpha_range.lo, a_hi = alpha_range.hi;
  double p_lo = psi_range.lo, p_hi = psi_range.hi;
  for (int stage = 0; stage < 3; ++stage) {
    const double da = (a_hi - a_lo) / (grid_size - 1);
    const double dp = (p_hi - p_lo) / (grid_size - 1);
    for (int i = 0; i < grid_size; ++i) {
      const double alpha = a_lo + da * i;
      for (int j = 0; j < grid_size; ++j) {
        const double psi = p_lo + dp * j;
        const double value = loglik(alpha, psi);
        if (value > best.loglik) best = {alpha, psi, value};
      }
    }
    const double a_half = (a_hi - a_lo) / 20.0;
    const double p_half = (p_hi - p_lo) / 20.0;
    a_lo = best.alpha - a_half;
    a_hi = best.alpha + a_half;
    p_lo = best.psi - p_half;
    p_hi = best.psi + p_half;
  }
  return best;
}

}  // namespace tnfit

#endif  // TNFIT_SYNTH_HPP
