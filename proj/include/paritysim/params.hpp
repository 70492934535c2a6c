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
#include <cmath>
#include <stdexcept>
#include <string>

#include "paritysim/algebra.hpp"

namespace paritysim {

/// Two-cavity, three-qubit dispersive measurement setup.  All rates are in
/// units of the dispersive shift chi unless stated otherwise; time runs in
/// 1/chi.
struct SystemParams {
  double chi = 1.0;        // per-qubit dispersive shift (rad/time)
  double kappa_a = 2.0;    // cavity a linewidth
  double kappa_b = 2.0;    // cavity b linewidth
  double delta_a = std::sqrt(3.0);   // drive detuning, cavity a
  double delta_b = -std::sqrt(3.0);  // drive detuning, cavity b
  std::array<double, 3> chi_a{1.0, 1.0, 1.0};  // qubit-resolved shift, mode a
  std::array<double, 3> chi_b{1.0, 1.0, 1.0};  // qubit-resolved shift, mode b
  std::array<double, 3> gamma_1{0.0, 0.0, 0.0};    // intrinsic relaxation
  std::array<double, 3> gamma_phi{0.0, 0.0, 0.0};  // intrinsic pure dephasing
  double gamma_p = 0.0;  // aggregate Purcell relaxation per qubit
  // Residual qubit-cavity couplings for the mode-resolved Purcell channels
  // kappa_a lambda_a^2, kappa_b lambda_b^2; zero when gamma_p aggregates them.
  std::array<double, 3> lambda_a{0.0, 0.0, 0.0};
  std::array<double, 3> lambda_b{0.0, 0.0, 0.0};
  double eta = 1.0;      // homodyne detection efficiency
  double phi_lo = 0.0;   // local-oscillator phase of the measured quadrature
  // Residual qubit Z rotation left over after the choice of rotating frame.
  // Zero means the bare qubit frame; symmetric() works in the dressed frame
  // where the net rotation omega_frame + chi_a + chi_b vanishes per qubit.
  std::array<double, 3> omega_frame{0.0, 0.0, 0.0};

  // Dispersive pull of cavity a for the three-qubit state `label`,
  // sum_j chi_a[j] * sigma_z_j, in {-3chi..3chi} for equal shifts.
  double chi_shift_a(int label) const {
    double s = 0;
    for (int q = 1; q <= 3; ++q) s += chi_a[q - 1] * sigma_z_value(label, q);
    return s;
  }

  double chi_shift_b(int label) const {
    double s = 0;
    for (int q = 1; q <= 3; ++q) s += chi_b[q - 1] * sigma_z_value(label, q);
    return s;
  }

  // Z rotation rate of qubit q (1..3) in the working frame.
  double z_rotation_rate(int q) const {
    return omega_frame[q - 1] + chi_a[q - 1] + chi_b[q - 1];
  }

  // Total relaxation rate of qubit q (1..3): intrinsic plus Purcell.
  double relaxation_rate(int q) const {
    const int j = q - 1;
    return gamma_1[j] + gamma_p + kappa_a * lambda_a[j] * lambda_a[j] +
           kappa_b * lambda_b[j] * lambda_b[j];
  }

  // Cross-damping rate sqrt(kappa_a kappa_b)/2 of the shared output line.
  double cross_damping() const { return 0.5 * std::sqrt(kappa_a * kappa_b); }

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0) || !std::isfinite(v))
        throw std::invalid_argument(std::string("SystemParams: ") + name +
                                    " must be positive and finite");
    };
    positive(chi, "chi");
    positive(kappa_a, "kappa_a");
    positive(kappa_b, "kappa_b");
    if (!(eta >= 0.0 && eta <= 1.0))
      throw std::invalid_argument("SystemParams: eta must lie in [0, 1]");
    for (int j = 0; j < 3; ++j) {
      if (gamma_1[j] < 0 || gamma_phi[j] < 0)
        throw std::invalid_argument(
            "SystemParams: decay rates must be non-negative");
    }
    if (gamma_p < 0)
      throw std::invalid_argument("SystemParams: gamma_p must be non-negative");
  }

  /// Symmetric operating point: equal qubit shifts chi on both cavities,
  /// kappa_a = kappa_b = kappa, opposite drive detunings +/-delta, and the
  /// dressed co-rotating frame (no residual Z rotation).
  static SystemParams symmetric(double chi, double kappa, double delta,
                                double eta = 1.0) {
    SystemParams p;
    p.chi = chi;
    p.kappa_a = p.kappa_b = kappa;
    p.delta_a = delta;
    p.delta_b = -delta;
    p.chi_a = p.chi_b = {chi, chi, chi};
    p.eta = eta;
    for (int j = 0; j < 3; ++j) p.omega_frame[j] = -(p.chi_a[j] + p.chi_b[j]);
    p.validate();
    return p;
  }

  /// The matched point kappa = 2 chi, delta = sqrt(3) chi where both output
  /// quadrature conditions of the parity measurement hold.
  static SystemParams reference() {
    return symmetric(1.0, 2.0, std::sqrt(3.0));
  }
};

/// Measurement-tone envelope.
struct DrivePulse {
  enum class Shape { kArctan, kConstant };

  Shape shape = Shape::kConstant;
  double eps_ss = 1.0;  // steady amplitude, sqrt(rad/time)
  double sigma = 1.0;   // inverse rise time (rad/time), arctan shape only
  double t_on = 0.0;    // turn-on center (time)

  static DrivePulse constant(double eps_ss) {
    DrivePulse p;
    p.shape = Shape::kConstant;
    p.eps_ss = eps_ss;
    return p;
  }

  // t_on defaults to 10/sigma so the envelope starts near zero drive.
  static DrivePulse arctan(double eps_ss, double sigma) {
    return arctan(eps_ss, sigma, 10.0 / sigma);
  }

  static DrivePulse arctan(double eps_ss, double sigma, double t_on) {
    DrivePulse p;
    p.shape = Shape::kArctan;
    p.eps_ss = eps_ss;
    p.sigma = sigma;
    p.t_on = t_on;
    return p;
  }

  void validate() const {
    if (eps_ss < 0)
      throw std::invalid_argument("DrivePulse: eps_ss must be non-negative");
    if (shape == Shape::kArctan && !(sigma > 0))
      throw std::invalid_argument(
          "DrivePulse: sigma must be positive for the arctan shape");
  }
};

/// Drive amplitude at time t.
inline double drive_amplitude(const DrivePulse& pulse, double t) {
  switch (pulse.shape) {
    case DrivePulse::Shape::kConstant:
      return pulse.eps_ss;
    case DrivePulse::Shape::kArctan:
      return pulse.eps_ss / M_PI *
             (std::atan(pulse.sigma * (t - pulse.t_on)) + M_PI / 2);
  }
  return 0.0;
}

}  // namespace paritysim
