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

#include <catch2/catch_amalgamated.hpp>

#include "paritysim/algebra.hpp"
#include "paritysim/rng.hpp"

using namespace paritysim;

namespace {

DensityMatrix random_density(Xoshiro256pp& gen) {
  Operator8 m;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      m(i, j) = Complex(2.0 * gen.uniform() - 1.0, 2.0 * gen.uniform() - 1.0);
  DensityMatrix rho = m * m.adjoint();
  return rho / rho.trace().real();
}

Operator8 random_operator(Xoshiro256pp& gen) {
  Operator8 m;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      m(i, j) = Complex(2.0 * gen.uniform() - 1.0, 2.0 * gen.uniform() - 1.0);
  return m;
}

}  // namespace

TEST_CASE("basis labels, excitations, and parity") {
  // label = 4i + 2j + k; qubit 1 is the most significant bit
  CHECK(qubit_bit(0b101, 1) == 1);
  CHECK(qubit_bit(0b101, 2) == 0);
  CHECK(qubit_bit(0b101, 3) == 1);
  CHECK(excitation_count(0) == 0);
  CHECK(excitation_count(0b111) == 3);
  CHECK(excitation_count(0b110) == 2);

  // sigma_z eigenvalue is +1 on |1>
  CHECK(sigma_z_value(0b100, 1) == 1);
  CHECK(sigma_z_value(0b100, 2) == -1);

  // even subspace {000, 011, 101, 110}, odd {001, 010, 100, 111}
  for (int l : kEvenLabels) {
    CHECK(parity_value(l) == 1);
    CHECK(even_parity(l));
  }
  for (int l : kOddLabels) {
    CHECK(parity_value(l) == -1);
    CHECK_FALSE(even_parity(l));
  }
}

TEST_CASE("embedded Pauli operators act on the right qubit") {
  const Operator8 z1 = embed_pauli(Pauli::kZ, 1);
  for (int l = 0; l < 8; ++l) {
    CHECK(z1(l, l).real() == (l >= 4 ? 1.0 : -1.0));
  }

  // sigma_minus maps |1jk> -> |0jk> and kills |0jk>
  const Operator8 m1 = embed_pauli(Pauli::kMinus, 1);
  const PureState down = m1 * basis_state(0b110);
  CHECK(std::abs(down(0b010) - Complex(1.0, 0.0)) < 1e-15);
  CHECK((m1 * basis_state(0b010)).norm() == 0.0);

  const Operator8 p3 = embed_pauli(Pauli::kPlus, 3);
  const PureState up = p3 * basis_state(0b110);
  CHECK(std::abs(up(0b111) - Complex(1.0, 0.0)) < 1e-15);

  // adjoint relation between raising and lowering
  CHECK((embed_pauli(Pauli::kPlus, 2) -
         embed_pauli(Pauli::kMinus, 2).adjoint().eval())
            .cwiseAbs()
            .maxCoeff() < 1e-15);
}

TEST_CASE("parity projectors resolve the identity") {
  const auto [p_plus, p_minus] = parity_projectors();
  CHECK((p_plus + p_minus - Operator8::Identity()).cwiseAbs().maxCoeff() <
        1e-15);
  CHECK((p_plus * p_plus - p_plus).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((p_plus * p_minus).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(p_plus.trace().real() == Catch::Approx(4.0));
}

TEST_CASE("standard states") {
  const PureState pre = uniform_superposition();
  CHECK(pre.norm() == Catch::Approx(1.0));
  for (int l = 0; l < 8; ++l)
    CHECK(std::abs(pre(l) - Complex(1.0 / std::sqrt(8.0), 0.0)) < 1e-15);

  const PureState plus = parity_target(+1);
  const PureState minus = parity_target(-1);
  CHECK(plus.norm() == Catch::Approx(1.0));
  CHECK(std::abs(plus.dot(minus)) < 1e-15);
  for (int l : kEvenLabels) CHECK(plus(l).real() == Catch::Approx(0.5));
  for (int l : kOddLabels) CHECK(minus(l).real() == Catch::Approx(0.5));

  // the parity projection of the uniform state is the target state
  const auto [p_plus, p_minus] = parity_projectors();
  PureState proj = p_plus * pre;
  proj /= proj.norm();
  CHECK((proj - plus).norm() < 1e-15);
}

TEST_CASE("dissipator and measurement superoperator are trace-free") {
  Xoshiro256pp gen(31);
  for (int rep = 0; rep < 10; ++rep) {
    const DensityMatrix rho = random_density(gen);
    const Operator8 c = random_operator(gen);
    CHECK(std::abs(dissipator(c, rho).trace()) < 1e-12);
    CHECK(std::abs(meas_superop(c, rho).trace()) < 1e-12);
  }
}

TEST_CASE("dissipator matches its definition on a known case") {
  // D[sigma_minus] on |1><1| of a single qubit embedded at position 1:
  // refills |0><0| and drains |1><1| at unit rate.
  const Operator8 c = embed_pauli(Pauli::kMinus, 1);
  const DensityMatrix rho = projector(basis_state(0b100));
  const Operator8 d = dissipator(c, rho);
  CHECK(d(0, 0).real() == Catch::Approx(1.0));
  CHECK(d(0b100, 0b100).real() == Catch::Approx(-1.0));
  CHECK(std::abs(d.trace()) < 1e-15);
}

TEST_CASE("fidelity, purity, and trace distance") {
  Xoshiro256pp gen(32);
  const PureState psi = parity_target(+1);
  CHECK(overlap_fidelity(psi, projector(psi)) == Catch::Approx(1.0));
  CHECK(overlap_fidelity(psi, projector(parity_target(-1))) ==
        Catch::Approx(0.0).margin(1e-12));

  const DensityMatrix rho = random_density(gen);
  CHECK(purity(projector(psi)) == Catch::Approx(1.0));
  CHECK(purity(rho) <= 1.0 + 1e-12);

  CHECK(trace_distance(rho, rho) < 1e-14);
  CHECK(trace_distance(projector(basis_state(0)), projector(basis_state(7))) ==
        Catch::Approx(1.0));
  // triangle inequality spot check
  const DensityMatrix a = random_density(gen), b = random_density(gen),
                      c = random_density(gen);
  CHECK(trace_distance(a, c) <=
        trace_distance(a, b) + trace_distance(b, c) + 1e-12);
}

TEST_CASE("hermitize and min_eigenvalue") {
  Xoshiro256pp gen(33);
  const Operator8 m = random_operator(gen);
  const Operator8 h = hermitize(m);
  CHECK((h - h.adjoint().eval()).cwiseAbs().maxCoeff() < 1e-14);

  CHECK(min_eigenvalue(projector(basis_state(3))) ==
        Catch::Approx(0.0).margin(1e-12));
  DensityMatrix mix = 0.5 * projector(basis_state(1)).eval() +
                      0.5 * projector(basis_state(2)).eval();
  CHECK(min_eigenvalue(mix) == Catch::Approx(0.0).margin(1e-12));
}
