// Copyright 2026 The cvgpr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cvgpr/oracle_protocol.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "cvgpr/error.hpp"

namespace cvgpr {

double TrotterSchedule::Delta() const {
  return static_cast<double>(sign) * gamma * zeta / (std::numbers::pi * static_cast<double>(steps));
}

void TrotterSchedule::Validate() const {
  if (steps < 1) throw InputError(fmt::format("step count must be at least 1, got {}", steps));
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InputError(fmt::format("gamma must be non-negative, got {}", gamma));
  if (!(zeta > 0.0)) throw InputError(fmt::format("zeta must be positive, got {}", zeta));
  if (sign != 1 && sign != -1) throw InputError("sign must be +1 or -1");
}

double UniformDouble(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

CMatrix CyclicShift(Index n) {
  CMatrix p = CMatrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) p((j + 1) % n, j) = 1.0;
  return p;
}

namespace {

template <typename State>
State Renormalized(State state, double probability);

template <>
BranchedHybridState Renormalized(BranchedHybridState state, double probability) {
  state.Scale(1.0 / std::sqrt(probability));
  return state;
}

template <>
HybridDensity Renormalized(HybridDensity state, double probability) {
  state.Scale(1.0 / probability);
  return state;
}

CVector PlusState() { return CVector::Constant(2, 1.0 / std::sqrt(2.0)); }

template <typename State>
State ApplyOnRegisters(const State& state, const CMatrix& op, const std::vector<std::string>& names) {
  return ApplyDiscreteUnitary(state, state.layout().Embed(op, names));
}

}  // namespace

template <typename State>
QueryOutcome<State> FractionalQuery(const State& state, const OracleQ& q, double delta, const OracleRegisters& regs,
                                    std::mt19937_64* rng) {
  const RegisterLayout& layout = state.layout();
  if (layout.RegisterDim(regs.ancilla) != 2) throw InputError("ancilla register must be a qubit");
  if (layout.RegisterDim(regs.index) != q.index_dim()) throw InputError("index register does not match the oracle");
  Index target_dim = 1;
  for (const auto& t : regs.target) target_dim *= layout.RegisterDim(t);
  if (target_dim != q.target_dim()) throw InputError("target registers do not match the oracle");

  // controlled-Q on [ancilla, index, target...]
  const Index qdim = q.index_dim() * q.target_dim();
  CMatrix cq = CMatrix::Zero(2 * qdim, 2 * qdim);
  cq.topLeftCorner(qdim, qdim).setIdentity();
  cq.bottomRightCorner(qdim, qdim) = q.Dense().cast<Complex>();
  std::vector<std::string> names = {regs.ancilla, regs.index};
  names.insert(names.end(), regs.target.begin(), regs.target.end());
  State s = ApplyOnRegisters(state, cq, names);

  CMatrix hadamard(2, 2);
  hadamard << 1.0, 1.0, 1.0, -1.0;
  hadamard /= std::sqrt(2.0);
  s = ApplyOnRegisters(s, hadamard, {regs.ancilla});

  // N̂ ⊗ Z_A on [flag, ancilla]; the flag's |1> is the occupied state.
  const Index flag_dim = layout.RegisterDim(regs.flag);
  CMatrix nz = CMatrix::Zero(2 * flag_dim, 2 * flag_dim);
  nz(2 * (flag_dim - 1), 2 * (flag_dim - 1)) = 1.0;
  nz(2 * (flag_dim - 1) + 1, 2 * (flag_dim - 1) + 1) = -1.0;
  s = ApplyCoupledEvolution(s, layout.Embed(nz, {regs.flag, regs.ancilla}), std::numbers::pi * delta / 2.0);

  auto [projected, probability] = ProjectRegister(s, regs.ancilla, PlusState());
  QueryOutcome<State> out;
  out.probability = probability;
  if (rng != nullptr && UniformDouble(*rng) >= probability) {
    out.state = state;
    out.success = false;
    return out;
  }
  out.success = true;
  out.state = probability > 0.0 ? Renormalized(std::move(projected), probability) : std::move(projected);
  return out;
}

template <typename State>
WalkOutcome<State> PermutationWalk(const State& state, const OracleQ& q, double delta, const OracleRegisters& regs,
                                   std::mt19937_64* rng, std::int64_t retry_cap) {
  WalkOutcome<State> out;
  out.state = state;
  const CMatrix shift = CyclicShift(q.index_dim());
  for (Index j = 0; j < q.index_dim(); ++j) {
    out.state = ApplyOnRegisters(out.state, shift, {regs.index});
    std::int64_t attempts = 0;
    while (true) {
      ++attempts;
      ++out.trials;
      QueryOutcome<State> query = FractionalQuery(out.state, q, delta, regs, rng);
      if (query.success) {
        out.probability *= query.probability;
        ++out.successes;
        out.state = std::move(query.state);
        break;
      }
      if (attempts >= retry_cap) {
        throw DegenerateRunError(fmt::format("fractional query failed {} times in a row", attempts));
      }
    }
  }
  return out;
}

template QueryOutcome<BranchedHybridState> FractionalQuery(const BranchedHybridState&, const OracleQ&, double,
                                                           const OracleRegisters&, std::mt19937_64*);
template QueryOutcome<HybridDensity> FractionalQuery(const HybridDensity&, const OracleQ&, double,
                                                     const OracleRegisters&, std::mt19937_64*);
template WalkOutcome<BranchedHybridState> PermutationWalk(const BranchedHybridState&, const OracleQ&, double,
                                                          const OracleRegisters&, std::mt19937_64*, std::int64_t);
template WalkOutcome<HybridDensity> PermutationWalk(const HybridDensity&, const OracleQ&, double,
                                                    const OracleRegisters&, std::mt19937_64*, std::int64_t);

WalkOutcome<HybridDensity> ExpSwapStep(const HybridDensity& rho, const OracleQ& q, const TrotterSchedule& schedule,
                                       std::mt19937_64* rng, std::int64_t retry_cap) {
  schedule.Validate();
  const Index d = rho.layout().RegisterDim(kDataRegister);
  if (q.target_dim() != d * d) throw InputError("oracle does not act on the data-swap pair space");
  HybridDensity s = AttachRegister(rho, {kSwapRegister, d}, CVector::Constant(d, 1.0 / std::sqrt(static_cast<double>(d))));
  CVector index0 = CVector::Zero(q.index_dim());
  index0(0) = 1.0;
  s = AttachRegister(s, {kIndexRegister, q.index_dim()}, index0);
  s = AttachRegister(s, {kAncillaRegister, 2}, PlusState());
  WalkOutcome<HybridDensity> walk = PermutationWalk(s, q, schedule.Delta(), OracleRegisters{}, rng, retry_cap);
  walk.state = PartialTrace(walk.state, kAncillaRegister);
  walk.state = PartialTrace(walk.state, kIndexRegister);
  walk.state = PartialTrace(walk.state, kSwapRegister);
  return walk;
}

namespace {

CMatrix DirectGenerator(const RegisterLayout& layout, const DilatedMatrix& khat) {
  if (layout.RegisterDim(kDataRegister) != khat.dim()) throw InputError("data register does not match K̂");
  const Index flag_dim = layout.RegisterDim(kFlagRegister);
  CMatrix a = CMatrix::Zero(flag_dim * khat.dim(), flag_dim * khat.dim());
  a.bottomRightCorner(khat.dim(), khat.dim()) = khat.khat.cast<Complex>();
  return layout.Embed(a, {kFlagRegister, kDataRegister});
}

double DirectAngle(double gamma, const DilatedMatrix& khat, int sign) {
  return static_cast<double>(sign) * gamma / (4.0 * static_cast<double>(khat.n_padded));
}

}  // namespace

BranchedHybridState ApplyDirectUnitary(const BranchedHybridState& state, double gamma, const DilatedMatrix& khat,
                                       int sign) {
  return ApplyCoupledEvolution(state, DirectGenerator(state.layout(), khat), DirectAngle(gamma, khat, sign));
}

HybridDensity ApplyDirectUnitary(const HybridDensity& rho, double gamma, const DilatedMatrix& khat, int sign) {
  return ApplyCoupledEvolution(rho, DirectGenerator(rho.layout(), khat), DirectAngle(gamma, khat, sign));
}

}  // namespace cvgpr
