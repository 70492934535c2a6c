// Copyright 2026 The paritysim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "paritysim/algebra.hpp"
#include "paritysim/pointer_fields.hpp"
#include "paritysim/rng.hpp"
#include "paritysim/sme.hpp"

namespace paritysim {

enum class Outcome { kEven, kOdd, kInconclusive };

struct ClassificationOutcome {
  Outcome label = Outcome::kInconclusive;
  double s = 0.0;
  double s_th = 0.0;
};

/// Thresholded outcome of one integrated signal.  sign_cal fixes which sign
/// of s means even parity; it comes from sign_calibration(), not from a
/// hard-coded convention.
inline ClassificationOutcome classify(double s, double s_th, int sign_cal) {
  if (s_th < 0) throw std::invalid_argument("classify: s_th must be >= 0");
  if (sign_cal != 1 && sign_cal != -1)
    throw std::invalid_argument("classify: sign_cal must be +1 or -1");
  ClassificationOutcome out;
  out.s = s;
  out.s_th = s_th;
  const double v = sign_cal * s;
  out.label = v > s_th ? Outcome::kEven
                       : (v < -s_th ? Outcome::kOdd : Outcome::kInconclusive);
  return out;
}

/// Dominant parity of a state: +1 if the even-subspace population wins.
inline int dominant_parity(const DensityMatrix& rho) {
  double p_even = 0;
  for (int l : kEvenLabels) p_even += rho(l, l).real();
  return p_even >= 0.5 ? 1 : -1;
}

/// Signal means/variances by true (final-state) parity:
/// (mean_+ - mean_-)/sqrt(var_+ + var_-), variances estimated from the
/// samples with the unbiased denominator.
inline double empirical_snr(const std::vector<double>& s_even,
                            const std::vector<double>& s_odd) {
  if (s_even.size() < 2 || s_odd.size() < 2)
    throw std::invalid_argument("empirical_snr: need >= 2 samples per group");
  auto stats = [](const std::vector<double>& v) {
    double mean = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= static_cast<double>(v.size() - 1);
    return std::pair<double, double>(mean, var);
  };
  const auto [m_even, v_even] = stats(s_even);
  const auto [m_odd, v_odd] = stats(s_odd);
  return (m_even - m_odd) / std::sqrt(v_even + v_odd);
}

namespace detail {

// Trapezoid of f(step index) over [0, tau] on the table grid.
template <typename F>
double trapezoid_over(const PointerTable& table, double tau, F&& f) {
  const auto n = static_cast<std::size_t>(std::llround(tau / table.dt));
  if (n > table.steps())
    throw std::invalid_argument("analysis: tau exceeds the table span");
  double sum = 0;
  for (std::size_t k = 0; k < n; ++k)
    sum += 0.5 * (f(k) + f(k + 1)) * table.dt;
  return sum;
}

}  // namespace detail

/// Expected SNR from the pointer table: the quadrature split between the
/// parity subspaces, weighted by the initial-state populations (normalized
/// within each subspace), against the sqrt(2 tau) shot noise.
inline double predicted_snr(const PointerTable& table,
                            const std::array<double, 8>& weights, double tau,
                            double eta) {
  double w_even = 0, w_odd = 0;
  for (int l : kEvenLabels) w_even += weights[l];
  for (int l : kOddLabels) w_odd += weights[l];
  if (!(w_even > 0) || !(w_odd > 0))
    throw std::invalid_argument(
        "predicted_snr: both parity subspaces need nonzero weight");
  const double integral = detail::trapezoid_over(table, tau, [&](std::size_t k) {
    double v = 0;
    for (int l : kEvenLabels)
      v += weights[l] / w_even *
           measured_quadrature(table.sigma_out[l][k], table.phi_lo);
    for (int l : kOddLabels)
      v -= weights[l] / w_odd *
           measured_quadrature(table.sigma_out[l][k], table.phi_lo);
    return v;
  });
  return std::sqrt(2.0 * eta / tau) * integral;
}

/// Steady-state SNR limit 2 sqrt(2 eta) |q_111| eps sqrt(tau), with q_111
/// the measured-quadrature coefficient per unit drive.
inline double ideal_snr(const SystemParams& params, double eps_ss, double tau,
                        double eta) {
  const auto sigma = steady_state_sigma(params, 1.0);
  const double q111 = measured_quadrature(sigma[7], params.phi_lo);
  return 2.0 * std::sqrt(2.0) * std::sqrt(eta) * std::abs(q111) * eps_ss *
         std::sqrt(tau);
}

struct GaussianModel {
  double mean_plus = 0.0;
  double mean_minus = 0.0;
  double stddev = 0.0;
};

/// Two-Gaussian signal model for a uniformly weighted initial state: the
/// within-parity field values enter with weights 1/4 and 3/4; the noise is
/// the Wiener integral, std = sqrt(tau).
inline GaussianModel gaussian_model(const PointerTable& table, double tau,
                                    double eta) {
  const double integral = detail::trapezoid_over(table, tau, [&](std::size_t k) {
    return 0.25 * measured_quadrature(table.sigma_out[0][k], table.phi_lo) +
           0.75 * measured_quadrature(table.sigma_out[3][k], table.phi_lo);
  });
  GaussianModel m;
  m.mean_plus = 2.0 * std::sqrt(eta) * integral;
  m.mean_minus = -m.mean_plus;
  m.stddev = std::sqrt(tau);
  return m;
}

/// Sign convention for classify(): the sign of the predicted even-parity
/// signal mean.  Fails if the model predicts no parity signal.
inline int sign_calibration(const PointerTable& table, double tau,
                            double eta = 1.0) {
  const double mean_plus = gaussian_model(table, tau, eta).mean_plus;
  if (!std::isfinite(mean_plus) || std::abs(mean_plus) < 1e-12)
    throw std::runtime_error(
        "sign_calibration: no predicted parity signal at these settings");
  return mean_plus > 0 ? 1 : -1;
}

/// s values grouped by the dominant parity of the final state.
inline std::pair<std::vector<double>, std::vector<double>> split_by_true_parity(
    const std::vector<TrajectoryRecord>& records) {
  std::pair<std::vector<double>, std::vector<double>> out;
  for (const auto& rec : records)
    (dominant_parity(rec.final_state) == 1 ? out.first : out.second)
        .push_back(rec.s);
  return out;
}

struct FidelityReport {
  std::optional<double> f_plus, f_minus;  // empty conditional set -> nullopt
  double accepted_fraction = 0.0;
  std::size_t n_even = 0, n_odd = 0, n_inconclusive = 0;
  DensityMatrix mean_even = DensityMatrix::Zero();
  DensityMatrix mean_odd = DensityMatrix::Zero();
};

/// Overlap fidelities of the outcome-conditioned mean states against the
/// post-measurement targets.
inline FidelityReport conditional_fidelity(
    const std::vector<TrajectoryRecord>& records, const PureState& psi_plus,
    const PureState& psi_minus, double s_th, int sign_cal) {
  FidelityReport rep;
  for (const auto& rec : records) {
    switch (classify(rec.s, s_th, sign_cal).label) {
      case Outcome::kEven:
        rep.n_even++;
        rep.mean_even += rec.final_state;
        break;
      case Outcome::kOdd:
        rep.n_odd++;
        rep.mean_odd += rec.final_state;
        break;
      case Outcome::kInconclusive:
        rep.n_inconclusive++;
        break;
    }
  }
  const std::size_t n = records.size();
  rep.accepted_fraction =
      n == 0 ? 0.0 : static_cast<double>(rep.n_even + rep.n_odd) / n;
  if (rep.n_even > 0) {
    rep.mean_even /= static_cast<double>(rep.n_even);
    rep.f_plus = overlap_fidelity(psi_plus, rep.mean_even);
  }
  if (rep.n_odd > 0) {
    rep.mean_odd /= static_cast<double>(rep.n_odd);
    rep.f_minus = overlap_fidelity(psi_minus, rep.mean_odd);
  }
  return rep;
}

struct ThresholdPoint {
  double s_th = 0.0;
  double f_plus = std::numeric_limits<double>::quiet_NaN();
  double f_minus = std::numeric_limits<double>::quiet_NaN();
  double f_plus_err = std::numeric_limits<double>::quiet_NaN();
  double f_minus_err = std::numeric_limits<double>::quiet_NaN();
  double accepted_fraction = 0.0;
  std::size_t n_even = 0, n_odd = 0;
};

/// Fidelity and accepted fraction versus threshold, with bootstrap error
/// bars (common resamples across the grid, own seeded stream).
inline std::vector<ThresholdPoint> threshold_sweep(
    const std::vector<TrajectoryRecord>& records, const PureState& psi_plus,
    const PureState& psi_minus, const std::vector<double>& thresholds,
    int sign_cal, std::uint64_t bootstrap_seed = 2026,
    int n_bootstrap = 200) {
  const std::size_t n = records.size();
  // Per-record target overlaps; conditional fidelity is
  // sqrt(mean of overlaps) by linearity of the mean state.
  std::vector<double> p_plus(n), p_minus(n), s(n);
  for (std::size_t k = 0; k < n; ++k) {
    p_plus[k] = std::clamp(
        (psi_plus.adjoint() * records[k].final_state * psi_plus)(0, 0).real(),
        0.0, 1.0);
    p_minus[k] = std::clamp(
        (psi_minus.adjoint() * records[k].final_state * psi_minus)(0, 0).real(),
        0.0, 1.0);
    s[k] = records[k].s;
  }

  auto evaluate = [&](const std::vector<std::size_t>& idx, double s_th,
                      ThresholdPoint& pt) {
    double sum_plus = 0, sum_minus = 0;
    std::size_t n_even = 0, n_odd = 0;
    for (std::size_t k : idx) {
      switch (classify(s[k], s_th, sign_cal).label) {
        case Outcome::kEven:
          n_even++;
          sum_plus += p_plus[k];
          break;
        case Outcome::kOdd:
          n_odd++;
          sum_minus += p_minus[k];
          break;
        default:
          break;
      }
    }
    pt.n_even = n_even;
    pt.n_odd = n_odd;
    pt.accepted_fraction =
        idx.empty() ? 0.0 : static_cast<double>(n_even + n_odd) / idx.size();
    pt.f_plus = n_even > 0 ? std::sqrt(sum_plus / n_even)
                           : std::numeric_limits<double>::quiet_NaN();
    pt.f_minus = n_odd > 0 ? std::sqrt(sum_minus / n_odd)
                           : std::numeric_limits<double>::quiet_NaN();
  };

  std::vector<std::size_t> all(n);
  for (std::size_t k = 0; k < n; ++k) all[k] = k;
  std::vector<ThresholdPoint> curve(thresholds.size());
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    curve[i].s_th = thresholds[i];
    evaluate(all, thresholds[i], curve[i]);
  }
  if (n == 0 || n_bootstrap < 2) return curve;

  Xoshiro256pp gen(bootstrap_seed);
  std::vector<std::vector<double>> boot_plus(thresholds.size()),
      boot_minus(thresholds.size());
  std::vector<std::size_t> idx(n);
  for (int b = 0; b < n_bootstrap; ++b) {
    for (std::size_t k = 0; k < n; ++k)
      idx[k] = static_cast<std::size_t>(gen.uniform() * n);
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
      ThresholdPoint pt;
      evaluate(idx, thresholds[i], pt);
      if (pt.n_even > 0) boot_plus[i].push_back(pt.f_plus);
      if (pt.n_odd > 0) boot_minus[i].push_back(pt.f_minus);
    }
  }
  auto sample_std = [](const std::vector<double>& v) {
    if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double mean = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0;
    for (double x : v) var += (x - mean) * (x - mean);
    return std::sqrt(var / static_cast<double>(v.size() - 1));
  };
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    curve[i].f_plus_err = sample_std(boot_plus[i]);
    curve[i].f_minus_err = sample_std(boot_minus[i]);
  }
  return curve;
}

struct HistogramBins {
  std::vector<double> edges;  // n_bins + 1
  std::vector<std::size_t> count_even, count_odd;  // by true parity
};

/// Histogram of integrated signals, grouped by the final-state parity.
/// Freedman-Diaconis bin width unless n_bins is forced.
inline HistogramBins histogram(const std::vector<TrajectoryRecord>& records,
                               int n_bins = 0) {
  HistogramBins h;
  if (records.empty()) return h;
  std::vector<double> s(records.size());
  for (std::size_t k = 0; k < records.size(); ++k) s[k] = records[k].s;
  auto sorted = s;
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front(), hi = sorted.back();

  int bins = n_bins;
  if (bins <= 0) {
    auto quantile = [&sorted](double q) {
      const double pos = q * (sorted.size() - 1);
      const auto i = static_cast<std::size_t>(pos);
      const double frac = pos - i;
      return i + 1 < sorted.size()
                 ? sorted[i] * (1 - frac) + sorted[i + 1] * frac
                 : sorted[i];
    };
    const double iqr = quantile(0.75) - quantile(0.25);
    const double width =
        2.0 * iqr / std::cbrt(static_cast<double>(sorted.size()));
    bins = (width > 0 && hi > lo)
               ? static_cast<int>(std::ceil((hi - lo) / width))
               : 1;
    bins = std::clamp(bins, 1, 10000);
  }

  const double span = hi > lo ? hi - lo : 1.0;
  h.edges.resize(bins + 1);
  for (int i = 0; i <= bins; ++i)
    h.edges[i] = lo + span * static_cast<double>(i) / bins;
  h.count_even.assign(bins, 0);
  h.count_odd.assign(bins, 0);
  for (const auto& rec : records) {
    int bin = static_cast<int>((rec.s - lo) / span * bins);
    bin = std::clamp(bin, 0, bins - 1);
    (dominant_parity(rec.final_state) == 1 ? h.count_even : h.count_odd)[bin]++;
  }
  return h;
}

struct EnsembleAnalysis {
  std::size_t n_even = 0, n_odd = 0, n_inconclusive = 0;
  double fraction_even = 0, fraction_odd = 0, fraction_inconclusive = 0;
  FidelityReport fidelity;
  double snr_empirical = std::numeric_limits<double>::quiet_NaN();
  HistogramBins histogram_bins;
};

/// One-stop post-processing of an ensemble at a fixed threshold.
inline EnsembleAnalysis analyze_ensemble(
    const std::vector<TrajectoryRecord>& records, const PureState& psi_plus,
    const PureState& psi_minus, double s_th, int sign_cal, int n_bins = 0) {
  EnsembleAnalysis a;
  a.fidelity =
      conditional_fidelity(records, psi_plus, psi_minus, s_th, sign_cal);
  a.n_even = a.fidelity.n_even;
  a.n_odd = a.fidelity.n_odd;
  a.n_inconclusive = a.fidelity.n_inconclusive;
  const double n = records.empty() ? 1.0 : static_cast<double>(records.size());
  a.fraction_even = a.n_even / n;
  a.fraction_odd = a.n_odd / n;
  a.fraction_inconclusive = a.n_inconclusive / n;
  const auto [s_even, s_odd] = split_by_true_parity(records);
  if (s_even.size() >= 2 && s_odd.size() >= 2)
    a.snr_empirical = empirical_snr(s_even, s_odd);
  a.histogram_bins = histogram(records, n_bins);
  return a;
}

}  // namespace paritysim
