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

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "paritysim/algebra.hpp"
#include "paritysim/params.hpp"
#include "paritysim/pointer_fields.hpp"
#include "paritysim/rng.hpp"

namespace paritysim {

struct SmeConfig {
  double dt = 1e-3;    // must match the pointer-table grid
  double t_end = 10.0; // duration tau; at most the table span
  std::uint64_t seed = 1;
  int renormalize_every = 1;
  bool record_current = false;
  int record_state_stride = 0;    // 0 = no snapshots
  int positivity_check_stride = 100;
};

struct TrajectoryDiagnostics {
  double min_eigenvalue = 1.0;   // most negative eigenvalue seen
  double max_trace_drift = 0.0;  // |tr rho - 1| before renormalization
  std::size_t steps = 0;
};

struct TrajectoryRecord {
  std::uint64_t seed = 0;
  double s = 0.0;                // integrated homodyne signal
  std::vector<double> current;   // j(t_n), when recorded
  DensityMatrix final_state;
  std::vector<std::pair<double, DensityMatrix>> snapshots;
  TrajectoryDiagnostics diagnostics;
};

/// Elementwise dephasing/frequency-pull matrix driven by the instantaneous
/// cavity amplitudes: d rho_{mu nu} += Lambda_{mu nu} rho_{mu nu} dt.  The
/// cross-mode terms act only on label pairs differing in all three bits.
inline Operator8 field_dephasing_matrix(const SystemParams& p,
                                        const std::array<Complex, 8>& alpha,
                                        const std::array<Complex, 8>& beta) {
  Operator8 lam = Operator8::Zero();
  const double c = p.cross_damping();
  std::array<double, 8> xa, xb;
  for (int l = 0; l < 8; ++l) {
    xa[l] = p.chi_shift_a(l);
    xb[l] = p.chi_shift_b(l);
  }
  for (int mu = 0; mu < 8; ++mu) {
    for (int nu = 0; nu < 8; ++nu) {
      if (mu == nu) continue;
      const Complex pa = std::conj(alpha[mu]) * alpha[nu];
      const Complex pb = std::conj(beta[mu]) * beta[nu];
      Complex v = (xa[nu] - xa[mu]) * Complex(pa.imag(), pa.real()) +
                  (xb[nu] - xb[mu]) * Complex(pb.imag(), pb.real());
      if ((mu ^ nu) == 7) {
        const Complex x1 = alpha[mu] * std::conj(beta[nu]);
        const Complex x2 = beta[mu] * std::conj(alpha[nu]);
        const double wmu = (std::conj(alpha[mu]) * beta[mu]).real();
        const double wnu = (std::conj(alpha[nu]) * beta[nu]).real();
        v += Complex(c * (x1.real() + x2.real() - wmu - wnu),
                     c * (x1.imag() + x2.imag()));
      }
      lam(mu, nu) = v;
    }
  }
  return lam;
}

/// Field-independent part of the generator: Z rotations in the working
/// frame, pure dephasing, and the anticommutator half of relaxation.
inline Operator8 static_generator_matrix(const SystemParams& p) {
  std::array<double, 8> theta{};
  for (int l = 0; l < 8; ++l)
    for (int q = 1; q <= 3; ++q)
      theta[l] += 0.5 * p.z_rotation_rate(q) * sigma_z_value(l, q);
  Operator8 g;
  for (int mu = 0; mu < 8; ++mu) {
    for (int nu = 0; nu < 8; ++nu) {
      double re = 0;
      for (int q = 1; q <= 3; ++q) {
        re += 0.5 * p.gamma_phi[q - 1] *
              (sigma_z_value(mu, q) * sigma_z_value(nu, q) - 1);
        re -= 0.5 * p.relaxation_rate(q) *
              (qubit_bit(mu, q) + qubit_bit(nu, q));
      }
      g(mu, nu) = Complex(re, -(theta[mu] - theta[nu]));
    }
  }
  return g;
}

namespace detail {

// Elementwise generator application plus the relaxation refill terms.
inline void apply_generator(const Operator8& g,
                            const std::array<double, 3>& relax,
                            const DensityMatrix& rho, Operator8& out) {
  out.array() = g.array() * rho.array();
  for (int j = 0; j < 3; ++j) {
    if (relax[j] == 0.0) continue;
    const int mask = 4 >> j;
    for (int mu = 0; mu < 8; ++mu) {
      if (!(mu & mask)) continue;
      for (int nu = 0; nu < 8; ++nu) {
        if (!(nu & mask)) continue;
        out(mu & ~mask, nu & ~mask) += relax[j] * rho(mu, nu);
      }
    }
  }
}

inline void hermitize_in_place(DensityMatrix& rho) {
  for (int mu = 0; mu < 8; ++mu) {
    rho(mu, mu) = Complex(rho(mu, mu).real(), 0.0);
    for (int nu = mu + 1; nu < 8; ++nu) {
      const Complex avg = 0.5 * (rho(mu, nu) + std::conj(rho(nu, mu)));
      rho(mu, nu) = avg;
      rho(nu, mu) = std::conj(avg);
    }
  }
}

}  // namespace detail

/// Per-step generator matrices and measurement amplitudes shared read-only
/// by all trajectories over one pointer table.
struct SmeCoefficients {
  const PointerTable* table = nullptr;
  double dt = 0.0;
  double sqrt_eta = 1.0;
  std::array<double, 3> relax{};
  Operator8 g_static;
  std::vector<Operator8> g_step;               // g_static + Lambda(t_n)
  std::vector<std::array<Complex, 8>> d;       // Sigma_l e^{-i phi}
  std::vector<std::array<double, 8>> two_q;    // 2 Re d_l

  static SmeCoefficients build(const PointerTable& table,
                               const SystemParams& params) {
    params.validate();
    SmeCoefficients c;
    c.table = &table;
    c.dt = table.dt;
    c.sqrt_eta = std::sqrt(params.eta);
    for (int j = 0; j < 3; ++j) c.relax[j] = params.relaxation_rate(j + 1);
    c.g_static = static_generator_matrix(params);
    const std::size_t n = table.steps();
    c.g_step.resize(n);
    c.d.resize(n);
    c.two_q.resize(n);
    const Complex rot = std::exp(Complex(0.0, -params.phi_lo));
    std::array<Complex, 8> a, b;
    for (std::size_t k = 0; k < n; ++k) {
      for (int l = 0; l < 8; ++l) {
        a[l] = table.alpha[l][k];
        b[l] = table.beta[l][k];
        c.d[k][l] = rot * table.sigma_out[l][k];
        c.two_q[k][l] = 2.0 * c.d[k][l].real();
      }
      c.g_step[k] = c.g_static + field_dephasing_matrix(params, a, b);
    }
    return c;
  }
};

/// Deterministic part of the master equation at time t (a grid point or a
/// grid midpoint of the table): Z rotations, decoherence, refill, and the
/// field-driven dephasing matrix.
inline Operator8 deterministic_generator(const DensityMatrix& rho, double t,
                                         const PointerTable& table,
                                         const SystemParams& params) {
  const double half = 0.5 * table.dt;
  const double pos = t / half;
  const auto idx = static_cast<std::size_t>(std::llround(pos));
  if (std::abs(pos - static_cast<double>(idx)) > 1e-6 ||
      idx > 2 * table.steps())
    throw std::invalid_argument(
        "deterministic_generator: t must sit on the table grid or midgrid");
  std::array<Complex, 8> a, b;
  for (int l = 0; l < 8; ++l) {
    if (idx % 2 == 0) {
      a[l] = table.alpha[l][idx / 2];
      b[l] = table.beta[l][idx / 2];
    } else {
      a[l] = table.alpha_mid[l][idx / 2];
      b[l] = table.beta_mid[l][idx / 2];
    }
  }
  const Operator8 g =
      static_generator_matrix(params) + field_dephasing_matrix(params, a, b);
  std::array<double, 3> relax;
  for (int j = 0; j < 3; ++j) relax[j] = params.relaxation_rate(j + 1);
  Operator8 out;
  detail::apply_generator(g, relax, rho, out);
  return out;
}

namespace detail {

// One Euler-Maruyama step on prebuilt coefficients.  Returns the homodyne
// current sample evaluated on the pre-step state.
inline double sme_step_inplace(DensityMatrix& rho, std::size_t n,
                               const SmeCoefficients& c, double dW,
                               bool renormalize, TrajectoryDiagnostics& diag) {
  const double dt = c.dt;
  double m = 0;
  for (int l = 0; l < 8; ++l) m += c.two_q[n][l] * rho(l, l).real();
  const double j_sample = c.sqrt_eta * m + dW / dt;

  Operator8 det;
  apply_generator(c.g_step[n], c.relax, rho, det);

  const double k = c.sqrt_eta * dW;
  const auto& d = c.d[n];
  for (int mu = 0; mu < 8; ++mu) {
    for (int nu = 0; nu < 8; ++nu) {
      const Complex meas = (d[mu] + std::conj(d[nu]) - m) * rho(mu, nu);
      rho(mu, nu) += dt * det(mu, nu) + k * meas;
    }
  }
  hermitize_in_place(rho);

  double tr = 0;
  for (int l = 0; l < 8; ++l) tr += rho(l, l).real();
  if (!std::isfinite(tr))
    throw std::runtime_error("sme step diverged (non-finite trace)");
  diag.max_trace_drift = std::max(diag.max_trace_drift, std::abs(tr - 1.0));
  if (renormalize) rho *= 1.0 / tr;
  return j_sample;
}

}  // namespace detail

/// Single Euler-Maruyama update of the conditional state for a given Wiener
/// increment; t must be a grid point of the table.  Returns the new state
/// and the current sample.
inline std::pair<DensityMatrix, double> sme_step(
    const DensityMatrix& rho, double t, const PointerTable& table,
    const SystemParams& params, const SmeConfig& config, double dW) {
  if (std::abs(config.dt - table.dt) > 1e-12 * table.dt)
    throw std::invalid_argument("sme_step: config.dt must match the table");
  const double pos = t / table.dt;
  const auto n = static_cast<std::size_t>(std::llround(pos));
  if (std::abs(pos - static_cast<double>(n)) > 1e-6 || n >= table.steps())
    throw std::invalid_argument("sme_step: t must be a table grid point");
  // Coefficients for this one step only.
  params.validate();
  SmeCoefficients coeffs;
  coeffs.table = &table;
  coeffs.dt = table.dt;
  coeffs.sqrt_eta = std::sqrt(params.eta);
  for (int j = 0; j < 3; ++j) coeffs.relax[j] = params.relaxation_rate(j + 1);
  coeffs.g_static = static_generator_matrix(params);
  const Complex rot = std::exp(Complex(0.0, -params.phi_lo));
  std::array<Complex, 8> a, b, d;
  std::array<double, 8> two_q;
  for (int l = 0; l < 8; ++l) {
    a[l] = table.alpha[l][n];
    b[l] = table.beta[l][n];
    d[l] = rot * table.sigma_out[l][n];
    two_q[l] = 2.0 * d[l].real();
  }
  coeffs.g_step = {coeffs.g_static + field_dephasing_matrix(params, a, b)};
  coeffs.d = {d};
  coeffs.two_q = {two_q};
  DensityMatrix out = rho;
  TrajectoryDiagnostics diag;
  const double j = detail::sme_step_inplace(out, 0, coeffs, dW,
                                            config.renormalize_every == 1,
                                            diag);
  return {out, j};
}

/// Full stochastic trajectory on prebuilt coefficients.
inline TrajectoryRecord run_trajectory(const DensityMatrix& initial,
                                       const SmeCoefficients& coeffs,
                                       const SmeConfig& config) {
  const PointerTable& table = *coeffs.table;
  if (std::abs(config.dt - table.dt) > 1e-12 * table.dt)
    throw std::invalid_argument("run_trajectory: config.dt must match table");
  if (config.t_end > table.span() * (1.0 + 1e-12) + 1e-12)
    throw std::invalid_argument("run_trajectory: t_end exceeds table span");
  if (config.renormalize_every < 1)
    throw std::invalid_argument("run_trajectory: renormalize_every >= 1");
  const double tr0 = initial.trace().real();
  if (std::abs(tr0 - 1.0) > 1e-9)
    throw std::invalid_argument("run_trajectory: initial state not normalized");

  const auto n_steps =
      static_cast<std::size_t>(std::llround(config.t_end / config.dt));
  if (n_steps > table.steps())
    throw std::invalid_argument("run_trajectory: t_end exceeds table span");

  TrajectoryRecord rec;
  rec.seed = config.seed;
  rec.diagnostics.steps = n_steps;
  if (config.record_current) rec.current.reserve(n_steps);

  DensityMatrix rho = initial;
  GaussianSampler noise(config.seed);
  const double sqrt_dt = std::sqrt(config.dt);
  if (config.record_state_stride > 0) rec.snapshots.emplace_back(0.0, rho);

  for (std::size_t n = 0; n < n_steps; ++n) {
    const double dW = noise.next() * sqrt_dt;
    const bool renorm = ((n + 1) % config.renormalize_every) == 0;
    const double j =
        detail::sme_step_inplace(rho, n, coeffs, dW, renorm, rec.diagnostics);
    rec.s += j * config.dt;
    if (config.record_current) rec.current.push_back(j);
    if (config.record_state_stride > 0 &&
        (n + 1) % config.record_state_stride == 0)
      rec.snapshots.emplace_back((n + 1) * config.dt, rho);
    if (config.positivity_check_stride > 0 &&
        (n + 1) % config.positivity_check_stride == 0)
      rec.diagnostics.min_eigenvalue =
          std::min(rec.diagnostics.min_eigenvalue, min_eigenvalue(rho));
  }
  rec.diagnostics.min_eigenvalue =
      std::min(rec.diagnostics.min_eigenvalue, min_eigenvalue(rho));
  rec.final_state = rho;
  return rec;
}

inline TrajectoryRecord run_trajectory(const DensityMatrix& initial,
                                       const PointerTable& table,
                                       const SystemParams& params,
                                       const SmeConfig& config) {
  const SmeCoefficients coeffs = SmeCoefficients::build(table, params);
  return run_trajectory(initial, coeffs, config);
}

inline TrajectoryRecord run_trajectory(const PureState& initial,
                                       const PointerTable& table,
                                       const SystemParams& params,
                                       const SmeConfig& config) {
  return run_trajectory(projector(initial), table, params, config);
}

struct EnsembleResult {
  std::vector<TrajectoryRecord> records;
  DensityMatrix mean_final = DensityMatrix::Zero();
  // Conditional means and counts keyed by the dominant parity of the final
  // state: index 0 even, 1 odd.
  std::array<DensityMatrix, 2> parity_mean_final{DensityMatrix::Zero(),
                                                 DensityMatrix::Zero()};
  std::array<std::size_t, 2> parity_counts{0, 0};
  double mean_s = 0.0;
};

/// Seeded trajectory ensemble.  Trajectory k always runs with the stream
/// seed derived from (config.seed, k); results are invariant under the
/// worker count and scheduling order.
inline EnsembleResult run_ensemble(std::size_t n_trajectories,
                                   const DensityMatrix& initial,
                                   const PointerTable& table,
                                   const SystemParams& params,
                                   const SmeConfig& config,
                                   int n_workers = 0) {
  const SmeCoefficients coeffs = SmeCoefficients::build(table, params);
  EnsembleResult result;
  result.records.resize(n_trajectories);

  if (n_workers <= 0) {
    const unsigned hc = std::thread::hardware_concurrency();
    n_workers = hc > 0 ? static_cast<int>(hc) : 1;
  }
  const std::size_t workers = std::min<std::size_t>(
      static_cast<std::size_t>(n_workers), std::max<std::size_t>(n_trajectories, 1));

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= n_trajectories) return;
      try {
        SmeConfig traj_config = config;
        traj_config.seed = derive_stream_seed(config.seed, k);
        result.records[k] = run_trajectory(initial, coeffs, traj_config);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  const auto [proj_even, proj_odd] = parity_projectors();
  for (const auto& rec : result.records) {
    result.mean_final += rec.final_state;
    result.mean_s += rec.s;
    const double p_even = (proj_even * rec.final_state).trace().real();
    const int bucket = p_even >= 0.5 ? 0 : 1;
    result.parity_counts[bucket]++;
    result.parity_mean_final[bucket] += rec.final_state;
  }
  if (n_trajectories > 0) {
    result.mean_final /= static_cast<double>(n_trajectories);
    result.mean_s /= static_cast<double>(n_trajectories);
  }
  for (int b = 0; b < 2; ++b)
    if (result.parity_counts[b] > 0)
      result.parity_mean_final[b] /= static_cast<double>(result.parity_counts[b]);
  return result;
}

inline EnsembleResult run_ensemble(std::size_t n_trajectories,
                                   const PureState& initial,
                                   const PointerTable& table,
                                   const SystemParams& params,
                                   const SmeConfig& config,
                                   int n_workers = 0) {
  return run_ensemble(n_trajectories, projector(initial), table, params,
                      config, n_workers);
}

struct LindbladResult {
  DensityMatrix final_state;
  std::vector<std::pair<double, DensityMatrix>> snapshots;
};

/// Unconditional (ensemble-average) evolution: classical RK4 on the
/// deterministic generator, reusing the table's midpoint amplitudes for the
/// internal stages.
inline LindbladResult lindblad_evolve(const DensityMatrix& initial,
                                      const PointerTable& table,
                                      const SystemParams& params,
                                      double t_end, int record_stride = 0) {
  params.validate();
  const double dt = table.dt;
  const auto n_steps = static_cast<std::size_t>(std::llround(t_end / dt));
  if (n_steps > table.steps())
    throw std::invalid_argument("lindblad_evolve: t_end exceeds table span");

  const Operator8 g_static = static_generator_matrix(params);
  std::array<double, 3> relax;
  for (int j = 0; j < 3; ++j) relax[j] = params.relaxation_rate(j + 1);

  auto lam_at = [&](std::size_t grid, bool mid) {
    std::array<Complex, 8> a, b;
    for (int l = 0; l < 8; ++l) {
      a[l] = mid ? table.alpha_mid[l][grid] : table.alpha[l][grid];
      b[l] = mid ? table.beta_mid[l][grid] : table.beta[l][grid];
    }
    return field_dephasing_matrix(params, a, b);
  };

  LindbladResult out;
  DensityMatrix rho = initial;
  if (record_stride > 0) out.snapshots.emplace_back(0.0, rho);
  Operator8 k1, k2, k3, k4;
  DensityMatrix tmp;
  for (std::size_t n = 0; n < n_steps; ++n) {
    const Operator8 g0 = g_static + lam_at(n, false);
    const Operator8 gm = g_static + lam_at(n, true);
    const Operator8 g1 = g_static + lam_at(n + 1, false);
    detail::apply_generator(g0, relax, rho, k1);
    tmp = rho + 0.5 * dt * k1;
    detail::apply_generator(gm, relax, tmp, k2);
    tmp = rho + 0.5 * dt * k2;
    detail::apply_generator(gm, relax, tmp, k3);
    tmp = rho + dt * k3;
    detail::apply_generator(g1, relax, tmp, k4);
    rho += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    detail::hermitize_in_place(rho);
    const double tr = rho.trace().real();
    if (!std::isfinite(tr))
      throw std::runtime_error("lindblad_evolve diverged");
    rho *= 1.0 / tr;
    if (record_stride > 0 && (n + 1) % record_stride == 0)
      out.snapshots.emplace_back((n + 1) * dt, rho);
  }
  out.final_state = rho;
  return out;
}

inline LindbladResult lindblad_evolve(const PureState& initial,
                                      const PointerTable& table,
                                      const SystemParams& params,
                                      double t_end, int record_stride = 0) {
  return lindblad_evolve(projector(initial), table, params, t_end,
                         record_stride);
}

}  // namespace paritysim
