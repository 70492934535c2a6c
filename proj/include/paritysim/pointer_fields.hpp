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
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "paritysim/params.hpp"

namespace paritysim {

// The homodyne setup measures the quadrature selected by the LO phase:
// q = Re(z e^{-i phi}).  The companion quadrature is Im(z e^{-i phi}).
inline double measured_quadrature(Complex z, double phi) {
  return std::real(z * std::exp(Complex(0.0, -phi)));
}

inline double orthogonal_quadrature(Complex z, double phi) {
  return std::imag(z * std::exp(Complex(0.0, -phi)));
}

/// Time-gridded coherent amplitudes of both cavities for all eight qubit
/// labels, plus the derived output combination Sigma = sqrt(kappa_a) alpha +
/// sqrt(kappa_b) beta and the even-subspace sum/difference fields.
struct PointerTable {
  double dt = 0.0;
  double phi_lo = 0.0;  // LO phase the table was built with
  std::vector<double> t;
  std::array<std::vector<Complex>, 8> alpha, beta, sigma_out;
  // Amplitudes at grid midpoints t_k + dt/2, for Runge-Kutta stage reuse.
  std::array<std::vector<Complex>, 8> alpha_mid, beta_mid;
  std::vector<Complex> xi;     // Sigma_000 + Sigma_011
  std::vector<Complex> delta;  // Sigma_000 - Sigma_011

  std::size_t steps() const { return t.empty() ? 0 : t.size() - 1; }
  double span() const { return t.empty() ? 0.0 : t.back(); }
};

namespace detail {

struct ModeCoeffs {
  Complex decay_a, decay_b;  // i(Delta + chi_label) + kappa/2
  double drive_a, drive_b;   // -sqrt(kappa) multiplying i*eps(t)
  double cross;              // sqrt(kappa_a kappa_b)/2
};

inline std::array<ModeCoeffs, 8> mode_coeffs(const SystemParams& p) {
  std::array<ModeCoeffs, 8> c;
  for (int l = 0; l < 8; ++l) {
    c[l].decay_a = Complex(0.5 * p.kappa_a, p.delta_a + p.chi_shift_a(l));
    c[l].decay_b = Complex(0.5 * p.kappa_b, p.delta_b + p.chi_shift_b(l));
    c[l].drive_a = std::sqrt(p.kappa_a);
    c[l].drive_b = std::sqrt(p.kappa_b);
    c[l].cross = p.cross_damping();
  }
  return c;
}

}  // namespace detail

/// RK4 integration of the 8 independent 2x2 linear cavity ODE systems from
/// vacuum, storing grid and midpoint values.  dt must resolve the fastest
/// rate: dt <= 0.01 min(1/kappa_a, 1/kappa_b, 1/|chi|).
inline PointerTable integrate_pointer_fields(const SystemParams& params,
                                             const DrivePulse& pulse,
                                             double t_end, double dt) {
  params.validate();
  pulse.validate();
  const double dt_max =
      0.01 * std::min({1.0 / params.kappa_a, 1.0 / params.kappa_b,
                       1.0 / std::abs(params.chi)});
  if (!(dt > 0) || dt > dt_max * (1.0 + 1e-12))
    throw std::invalid_argument(
        "integrate_pointer_fields: dt exceeds 0.01/max(kappa_a,kappa_b,|chi|)");
  if (!(t_end > 0) || !std::isfinite(t_end))
    throw std::invalid_argument("integrate_pointer_fields: t_end must be > 0");

  const auto n_steps =
      static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  const auto coeffs = detail::mode_coeffs(params);

  PointerTable table;
  table.dt = dt;
  table.phi_lo = params.phi_lo;
  table.t.resize(n_steps + 1);
  for (std::size_t k = 0; k <= n_steps; ++k) table.t[k] = k * dt;
  for (int l = 0; l < 8; ++l) {
    table.alpha[l].assign(n_steps + 1, Complex(0));
    table.beta[l].assign(n_steps + 1, Complex(0));
    table.alpha_mid[l].assign(n_steps, Complex(0));
    table.beta_mid[l].assign(n_steps, Complex(0));
  }

  // March at half the grid step: odd fine-steps land on grid midpoints.
  const double h = 0.5 * dt;
  std::array<Complex, 8> a{}, b{};
  for (std::size_t fine = 0; fine < 2 * n_steps; ++fine) {
    const double t0 = fine * h;
    const double e0 = drive_amplitude(pulse, t0);
    const double e1 = drive_amplitude(pulse, t0 + 0.5 * h);
    const double e2 = drive_amplitude(pulse, t0 + h);
    for (int l = 0; l < 8; ++l) {
      const auto& c = coeffs[l];
      auto deriv = [&c](double eps, Complex av, Complex bv) {
        return std::pair<Complex, Complex>(
            Complex(0.0, -eps * c.drive_a) - c.decay_a * av - c.cross * bv,
            Complex(0.0, -eps * c.drive_b) - c.decay_b * bv - c.cross * av);
      };
      const auto [k1a, k1b] = deriv(e0, a[l], b[l]);
      const auto [k2a, k2b] = deriv(e1, a[l] + 0.5 * h * k1a, b[l] + 0.5 * h * k1b);
      const auto [k3a, k3b] = deriv(e1, a[l] + 0.5 * h * k2a, b[l] + 0.5 * h * k2b);
      const auto [k4a, k4b] = deriv(e2, a[l] + h * k3a, b[l] + h * k3b);
      a[l] += h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
      b[l] += h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
      if (fine % 2 == 0) {
        table.alpha_mid[l][fine / 2] = a[l];
        table.beta_mid[l][fine / 2] = b[l];
      } else {
        table.alpha[l][(fine + 1) / 2] = a[l];
        table.beta[l][(fine + 1) / 2] = b[l];
      }
    }
  }

  const double sa = std::sqrt(params.kappa_a), sb = std::sqrt(params.kappa_b);
  table.xi.resize(n_steps + 1);
  table.delta.resize(n_steps + 1);
  for (int l = 0; l < 8; ++l) {
    table.sigma_out[l].resize(n_steps + 1);
    for (std::size_t k = 0; k <= n_steps; ++k)
      table.sigma_out[l][k] = sa * table.alpha[l][k] + sb * table.beta[l][k];
  }
  for (std::size_t k = 0; k <= n_steps; ++k) {
    table.xi[k] = table.sigma_out[0][k] + table.sigma_out[3][k];
    table.delta[k] = table.sigma_out[0][k] - table.sigma_out[3][k];
  }
  return table;
}

/// Steady-state cavity amplitudes per label from the zeroed field ODEs.
inline std::pair<std::array<Complex, 8>, std::array<Complex, 8>>
steady_state_amplitudes(const SystemParams& params, double eps_ss) {
  params.validate();
  const auto coeffs = detail::mode_coeffs(params);
  std::array<Complex, 8> alpha, beta;
  for (int l = 0; l < 8; ++l) {
    const auto& c = coeffs[l];
    const Complex ra(0.0, -eps_ss * c.drive_a);
    const Complex rb(0.0, -eps_ss * c.drive_b);
    const Complex det = c.decay_a * c.decay_b - c.cross * c.cross;
    const double scale =
        std::abs(c.decay_a) * std::abs(c.decay_b) + c.cross * c.cross;
    if (std::abs(det) < 1e-14 * scale)
      throw std::runtime_error(
          "steady_state_amplitudes: singular field system for label " +
          std::to_string(l));
    alpha[l] = (ra * c.decay_b - c.cross * rb) / det;
    beta[l] = (c.decay_a * rb - c.cross * ra) / det;
  }
  return {alpha, beta};
}

/// Steady-state output combinations Sigma = sqrt(kappa_a) alpha +
/// sqrt(kappa_b) beta per label.
inline std::array<Complex, 8> steady_state_sigma(const SystemParams& params,
                                                 double eps_ss) {
  const auto [alpha, beta] = steady_state_amplitudes(params, eps_ss);
  const double sa = std::sqrt(params.kappa_a), sb = std::sqrt(params.kappa_b);
  std::array<Complex, 8> sigma;
  for (int l = 0; l < 8; ++l) sigma[l] = sa * alpha[l] + sb * beta[l];
  return sigma;
}

namespace detail {

inline std::array<Complex, 8> scan_sigma(double chi, double kappa,
                                         double delta, double eps) {
  SystemParams p;
  p.chi = chi;
  p.kappa_a = p.kappa_b = kappa;
  p.delta_a = delta;
  p.delta_b = -delta;
  p.chi_a = p.chi_b = {chi, chi, chi};
  return steady_state_sigma(p, eps);
}

// LO phase solving the mirror condition Re((mean_even + mean_odd) e^{-i phi})
// = 0, reduced to [0, pi).
inline double mirror_phase(const std::array<Complex, 8>& sigma) {
  Complex zeta(0);
  for (int l : kEvenLabels) zeta += 0.25 * sigma[l];
  for (int l : kOddLabels) zeta += 0.25 * sigma[l];
  double phi = std::arg(zeta) + M_PI / 2;
  while (phi < 0) phi += M_PI;
  while (phi >= M_PI) phi -= M_PI;
  return phi;
}

}  // namespace detail

struct ScanConfig {
  double chi = 1.0;
  double kappa_min = 0.5, kappa_max = 5.0;
  int n_kappa = 10;
  double delta_min = 0.1, delta_max = 3.0;
  int n_delta = 121;
  double eps = 1.0;
  double tol = 1e-9;  // absolute on quadrature differences, times |eps|
};

struct ScanSurfacePoint {
  double kappa, delta;
  std::array<Complex, 8> sigma;
};

struct ScanLocusPoint {
  double kappa, delta;
  bool full_coincidence;  // orthogonal quadrature coincides as well
};

struct ScanReport {
  ScanConfig config;
  std::vector<ScanSurfacePoint> surface;
  std::vector<ScanLocusPoint> locus;
  bool reference_on_locus = false;
};

/// Grid scan over (kappa, delta) in the symmetric configuration.  Reports
/// the measured-quadrature within-parity coincidence locus (bisection along
/// the delta axis, including tangential zeros), flagging points where the
/// orthogonal quadrature coincides too.
inline ScanReport parity_condition_scan(const ScanConfig& cfg) {
  if (!(cfg.chi > 0) || !(cfg.kappa_min > 0) || cfg.kappa_min > cfg.kappa_max ||
      cfg.delta_min > cfg.delta_max || cfg.n_kappa < 0 || cfg.n_delta < 0 ||
      cfg.n_delta == 1)
    throw std::invalid_argument("parity_condition_scan: bad grid");
  ScanReport report;
  report.config = cfg;
  const double abs_tol = cfg.tol * std::abs(cfg.eps);

  {
    const auto sigma = detail::scan_sigma(cfg.chi, 2.0 * cfg.chi,
                                          std::sqrt(3.0) * cfg.chi, cfg.eps);
    report.reference_on_locus = std::abs(sigma[0] - sigma[3]) <= abs_tol;
  }
  // An empty grid on either axis is a valid request for no data.
  if (cfg.n_kappa == 0 || cfg.n_delta == 0) return report;

  // Within-parity difference of the measured quadrature at the per-point
  // mirror phase; zero on the coincidence locus.
  auto coincidence_gap = [&cfg](double kappa, double delta) {
    const auto sigma = detail::scan_sigma(cfg.chi, kappa, delta, cfg.eps);
    const double phi = detail::mirror_phase(sigma);
    return measured_quadrature(sigma[0] - sigma[3], phi);
  };

  const double dk = cfg.n_kappa > 1
                        ? (cfg.kappa_max - cfg.kappa_min) / (cfg.n_kappa - 1)
                        : 0.0;
  const double dd = (cfg.delta_max - cfg.delta_min) / (cfg.n_delta - 1);

  for (int ik = 0; ik < cfg.n_kappa; ++ik) {
    const double kappa = cfg.kappa_min + ik * dk;
    std::vector<double> f(cfg.n_delta);
    for (int id = 0; id < cfg.n_delta; ++id) {
      const double delta = cfg.delta_min + id * dd;
      auto& pt = report.surface.emplace_back();
      pt.kappa = kappa;
      pt.delta = delta;
      pt.sigma = detail::scan_sigma(cfg.chi, kappa, delta, cfg.eps);
      f[id] = measured_quadrature(pt.sigma[0] - pt.sigma[3],
                                  detail::mirror_phase(pt.sigma));
    }

    std::vector<double> roots;
    auto add_root = [&roots, dd](double r) {
      for (double seen : roots)
        if (std::abs(seen - r) < 1e-6 * dd) return;
      roots.push_back(r);
    };

    // Simple sign-change roots.
    for (int id = 0; id + 1 < cfg.n_delta; ++id) {
      if (f[id] == 0.0) {
        add_root(cfg.delta_min + id * dd);
        continue;
      }
      if (f[id] * f[id + 1] < 0) {
        double lo = cfg.delta_min + id * dd, hi = lo + dd;
        double flo = f[id];
        for (int it = 0; it < 100; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double fm = coincidence_gap(kappa, mid);
          if (fm == 0.0 || (flo < 0) == (fm < 0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        add_root(0.5 * (lo + hi));
      }
    }
    if (std::abs(f[cfg.n_delta - 1]) == 0.0) add_root(cfg.delta_max);

    // Tangential roots: bisect on the sign of the numerical derivative and
    // keep extrema whose |f| lies within tolerance.
    const double h = 1e-3 * dd;
    auto dfd = [&](double x) {
      return (coincidence_gap(kappa, x + h) - coincidence_gap(kappa, x - h)) /
             (2 * h);
    };
    for (int id = 0; id + 1 < cfg.n_delta; ++id) {
      double lo = cfg.delta_min + id * dd, hi = lo + dd;
      double glo = dfd(lo), ghi = dfd(hi);
      if (glo == 0.0 || glo * ghi >= 0) continue;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = dfd(mid);
        if (gm == 0.0 || (glo < 0) == (gm < 0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      const double ext = 0.5 * (lo + hi);
      if (std::abs(coincidence_gap(kappa, ext)) <= abs_tol) add_root(ext);
    }

    std::sort(roots.begin(), roots.end());
    for (double r : roots) {
      const auto sigma = detail::scan_sigma(cfg.chi, kappa, r, cfg.eps);
      const double phi = detail::mirror_phase(sigma);
      auto& lp = report.locus.emplace_back();
      lp.kappa = kappa;
      lp.delta = r;
      lp.full_coincidence =
          std::abs(orthogonal_quadrature(sigma[0] - sigma[3], phi)) <= abs_tol;
    }
  }

  return report;
}

/// Smallest LO phase in [0, 2 pi) for which the steady-state measured
/// quadratures q = Re(Sigma e^{-i phi}) coincide within each parity subspace
/// and satisfy q_even = -q_odd with a nonzero split.  Throws off the locus.
inline double calibrate_lo_phase(const SystemParams& params,
                                 double eps_ss = 1.0, double tol = 1e-9) {
  const auto sigma = steady_state_sigma(params, eps_ss);
  double scale = 0;
  for (const auto& s : sigma) scale = std::max(scale, std::abs(s));
  if (!(scale > 0))
    throw std::runtime_error(
        "calibrate_lo_phase: zero steady-state fields, nothing to calibrate");

  Complex mean_even(0), mean_odd(0);
  for (int l : kEvenLabels) mean_even += 0.25 * sigma[l];
  for (int l : kOddLabels) mean_odd += 0.25 * sigma[l];
  const Complex zeta = mean_even + mean_odd;    // mirror constraint
  const Complex split = mean_even - mean_odd;   // must stay nonzero

  std::vector<Complex> constraints{zeta};
  auto add_pairs = [&](const std::array<int, 4>& labels) {
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        constraints.push_back(sigma[labels[i]] - sigma[labels[j]]);
  };
  add_pairs(kEvenLabels);
  add_pairs(kOddLabels);

  auto wrap = [](double phi) {
    phi = std::fmod(phi, 2 * M_PI);
    if (phi < 0) phi += 2 * M_PI;
    return phi;
  };
  std::vector<double> candidates{0.0};
  for (const auto& w : constraints) {
    if (std::abs(w) <= tol * scale) continue;
    candidates.push_back(wrap(std::arg(w) - M_PI / 2));
    candidates.push_back(wrap(std::arg(w) + M_PI / 2));
  }
  if (std::abs(split) > tol * scale) {
    candidates.push_back(wrap(std::arg(split)));
    candidates.push_back(wrap(std::arg(split) + M_PI));
  }
  std::sort(candidates.begin(), candidates.end());

  double last = -1;
  for (double phi : candidates) {
    if (phi - last < 1e-12) continue;
    last = phi;
    bool ok = true;
    for (const auto& w : constraints)
      if (std::abs(measured_quadrature(w, phi)) > tol * scale) {
        ok = false;
        break;
      }
    if (ok && std::abs(measured_quadrature(split, phi)) > tol * scale)
      return phi;
  }
  throw std::runtime_error(
      "calibrate_lo_phase: no LO phase separates the parity subspaces; "
      "parameters sit off the coincidence locus");
}

struct MeasurementRates {
  std::vector<double> parity;  // eta q(xi)^2 in the calibrated quadrature
  std::vector<double> intra;   // eta q(delta)^2
};

/// Parity and intra-parity measurement rates along the table, in the
/// calibrated quadrature the table was built with.
inline MeasurementRates measurement_rates(const PointerTable& table,
                                          double eta) {
  MeasurementRates r;
  r.parity.resize(table.xi.size());
  r.intra.resize(table.delta.size());
  for (std::size_t k = 0; k < table.xi.size(); ++k) {
    const double qx = measured_quadrature(table.xi[k], table.phi_lo);
    const double qd = measured_quadrature(table.delta[k], table.phi_lo);
    r.parity[k] = eta * qx * qx;
    r.intra[k] = eta * qd * qd;
  }
  return r;
}

struct LeakagePoint {
  double sigma;                 // inverse rise time of the pulse
  double quadrature_integral;   // integral of |q(delta)| dt, measured quadrature
  double orthogonal_integral;   // same for the companion quadrature
};

/// Integrated absolute intra-parity field difference for a family of arctan
/// rise times, trapezoidal rule on the table grid.
inline std::vector<LeakagePoint> intra_parity_leakage(
    const SystemParams& params, double eps_ss,
    const std::vector<double>& sigmas, double dt = 1e-3) {
  std::vector<LeakagePoint> out;
  out.reserve(sigmas.size());
  for (double sigma : sigmas) {
    const auto pulse = DrivePulse::arctan(eps_ss, sigma);
    const double t_end = pulse.t_on + 30.0 / params.chi;
    const auto table = integrate_pointer_fields(params, pulse, t_end, dt);
    double qsum = 0, osum = 0;
    for (std::size_t k = 0; k + 1 < table.delta.size(); ++k) {
      auto q = [&](std::size_t i) {
        return std::abs(measured_quadrature(table.delta[i], table.phi_lo));
      };
      auto o = [&](std::size_t i) {
        return std::abs(orthogonal_quadrature(table.delta[i], table.phi_lo));
      };
      qsum += 0.5 * (q(k) + q(k + 1)) * dt;
      osum += 0.5 * (o(k) + o(k + 1)) * dt;
    }
    out.push_back({sigma, qsum, osum});
  }
  return out;
}

struct PhysicalParams {
  double delta;  // qubit-cavity detuning
  double g;      // qubit-cavity coupling
};

/// Dispersive-relation back-out: detuning and coupling reproducing the given
/// chi and Purcell rate.  Units follow the unit chi is supplied in.
inline PhysicalParams physical_backout(double chi, double gamma_p) {
  if (!(gamma_p > 0))
    throw std::invalid_argument("physical_backout: gamma_p must be positive");
  return {4.0 * chi * chi / gamma_p,
          std::sqrt(4.0 * chi * chi * chi / gamma_p)};
}

}  // namespace paritysim
