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
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

namespace paritysim {

using Complex = std::complex<double>;
using Operator8 = Eigen::Matrix<Complex, 8, 8>;
using DensityMatrix = Operator8;
using PureState = Eigen::Matrix<Complex, 8, 1>;

// Three-qubit computational basis label ijk = 4i + 2j + k, qubits numbered
// 1..3 from the most significant bit.  sigma_z eigenvalue is +1 on |1>.
constexpr int qubit_bit(int label, int qubit) {
  return (label >> (3 - qubit)) & 1;
}

constexpr int sigma_z_value(int label, int qubit) {
  return qubit_bit(label, qubit) ? 1 : -1;
}

constexpr int excitation_count(int label) {
  return qubit_bit(label, 1) + qubit_bit(label, 2) + qubit_bit(label, 3);
}

// Parity of the excitation number: +1 on an even number of excited qubits.
constexpr int parity_value(int label) {
  return (excitation_count(label) % 2 == 0) ? 1 : -1;
}

constexpr bool even_parity(int label) { return parity_value(label) == 1; }

inline constexpr std::array<int, 4> kEvenLabels{0, 3, 5, 6};
inline constexpr std::array<int, 4> kOddLabels{1, 2, 4, 7};

enum class Pauli { kZ, kMinus, kPlus };

/// Single-qubit operator embedded in the three-qubit space, qubit in 1..3.
inline Operator8 embed_pauli(Pauli op, int qubit) {
  if (qubit < 1 || qubit > 3)
    throw std::invalid_argument("embed_pauli: qubit index must be 1..3");
  Operator8 m = Operator8::Zero();
  const int mask = 1 << (3 - qubit);
  for (int l = 0; l < 8; ++l) {
    switch (op) {
      case Pauli::kZ:
        m(l, l) = sigma_z_value(l, qubit);
        break;
      case Pauli::kMinus:  // |0><1| on the target qubit
        if (l & mask) m(l & ~mask, l) = 1.0;
        break;
      case Pauli::kPlus:  // |1><0|
        if (!(l & mask)) m(l | mask, l) = 1.0;
        break;
    }
  }
  return m;
}

/// Projectors onto the even (+1) and odd (-1) parity subspaces.
inline std::pair<Operator8, Operator8> parity_projectors() {
  Operator8 plus = Operator8::Zero(), minus = Operator8::Zero();
  for (int l = 0; l < 8; ++l) (even_parity(l) ? plus : minus)(l, l) = 1.0;
  return {plus, minus};
}

inline PureState basis_state(int label) {
  if (label < 0 || label > 7)
    throw std::invalid_argument("basis_state: label must be 0..7");
  PureState v = PureState::Zero();
  v(label) = 1.0;
  return v;
}

/// |+++>, the equal superposition of all eight basis states.
inline PureState uniform_superposition() {
  return PureState::Constant(1.0 / std::sqrt(8.0));
}

/// Normalized projection of |+++> onto the parity = +1 / -1 subspace.
inline PureState parity_target(int parity) {
  if (parity != 1 && parity != -1)
    throw std::invalid_argument("parity_target: parity must be +1 or -1");
  PureState v = PureState::Zero();
  for (int l = 0; l < 8; ++l)
    if (parity_value(l) == parity) v(l) = 0.5;
  return v;
}

inline DensityMatrix projector(const PureState& psi) {
  return psi * psi.adjoint();
}

inline DensityMatrix hermitize(const DensityMatrix& rho) {
  return 0.5 * (rho + rho.adjoint());
}

/// D[c]rho = c rho c^dag - (c^dag c rho + rho c^dag c)/2.
inline Operator8 dissipator(const Operator8& c, const DensityMatrix& rho) {
  const Operator8 cc = c.adjoint() * c;
  return c * rho * c.adjoint() - 0.5 * (cc * rho + rho * cc);
}

/// M[c]rho = c rho + rho c^dag - <c + c^dag> rho.
inline Operator8 meas_superop(const Operator8& c, const DensityMatrix& rho) {
  const Complex mean = ((c + c.adjoint()) * rho).trace();
  return c * rho + rho * c.adjoint() - mean * rho;
}

/// sqrt(<psi|rho|psi>), clamped to [0, 1] against roundoff.
inline double overlap_fidelity(const PureState& psi, const DensityMatrix& rho) {
  const double p = (psi.adjoint() * rho * psi)(0, 0).real();
  return std::sqrt(std::clamp(p, 0.0, 1.0));
}

inline double purity(const DensityMatrix& rho) {
  return (rho * rho).trace().real();
}

inline double min_eigenvalue(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Operator8> es(hermitize(rho),
                                              Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

/// (1/2) tr|a - b| for Hermitian a, b.
inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  Eigen::SelfAdjointEigenSolver<Operator8> es(hermitize(a - b),
                                              Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace paritysim
