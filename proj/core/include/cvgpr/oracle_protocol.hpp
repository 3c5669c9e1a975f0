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

#ifndef CVGPR_ORACLE_PROTOCOL_HPP_
#define CVGPR_ORACLE_PROTOCOL_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cvgpr/dilation.hpp"
#include "cvgpr/encoding.hpp"
#include "cvgpr/hybrid_state.hpp"

namespace cvgpr {

inline constexpr std::int64_t kDefaultRetryCap = 1000;

// Register roles for the oracle protocol. The oracle acts on `target`
// (pair index (x, y) = x * dim(swap) + y with x on data and y on swap).
struct OracleRegisters {
  std::string index = kIndexRegister;
  std::string ancilla = kAncillaRegister;
  std::string flag = kFlagRegister;
  std::vector<std::string> target = {kDataRegister, kSwapRegister};
};

struct TrotterSchedule {
  std::int64_t steps = 1;  // M
  double gamma = 0.0;
  double zeta = 1.0;
  int sign = +1;

  // Fractional power per query; with the normalized symmetric state each step
  // acts with K̂ / (2N'), so δ = sign γ ζ / (π M).
  double Delta() const;
  double StepAngle() const { return gamma / (2.0 * static_cast<double>(steps)); }
  void Validate() const;
};

// Uniform double in [0, 1) from the top 53 bits; stable across standard libraries.
double UniformDouble(std::mt19937_64& rng);

template <typename State>
struct QueryOutcome {
  State state;
  double probability = 0.0;
  bool success = false;
};

// Controlled-Q, Hadamard on the ancilla, exp(i (π δ / 2) N̂ Z_A ⊗ p p̃), and a projection
// of the ancilla onto |+>. On success the state (renormalized) has picked up
// exp(i (π δ / 2) N̂ Q ⊗ p p̃). Without an rng the success branch is returned with
// its probability; with one, success is drawn and a failure returns the input unchanged.
template <typename State>
QueryOutcome<State> FractionalQuery(const State& state, const OracleQ& q, double delta,
                                    const OracleRegisters& regs = {}, std::mt19937_64* rng = nullptr);

template <typename State>
struct WalkOutcome {
  State state;
  double probability = 1.0;  // product of query success probabilities
  std::int64_t successes = 0;
  std::int64_t trials = 0;
};

// (Q^(δ p p̃ N̂) (P ⊗ I))^n with P the cyclic shift on the n-dimensional index
// register, which starts in |0>. In sampled mode each query is retried up to `retry_cap` times.
template <typename State>
WalkOutcome<State> PermutationWalk(const State& state, const OracleQ& q, double delta,
                                   const OracleRegisters& regs = {}, std::mt19937_64* rng = nullptr,
                                   std::int64_t retry_cap = kDefaultRetryCap);

// One exponential-swap step on the [flag, data] density: attaches swap (uniform state),
// index |0> and ancilla |+>, runs the walk and traces the auxiliary registers out.
WalkOutcome<HybridDensity> ExpSwapStep(const HybridDensity& rho, const OracleQ& q, const TrotterSchedule& schedule,
                                       std::mt19937_64* rng = nullptr, std::int64_t retry_cap = kDefaultRetryCap);

// exp(i sign γ (K̂ / 4N') N̂ ⊗ p p̃) on the flag and data registers.
BranchedHybridState ApplyDirectUnitary(const BranchedHybridState& state, double gamma, const DilatedMatrix& khat,
                                       int sign = +1);
HybridDensity ApplyDirectUnitary(const HybridDensity& rho, double gamma, const DilatedMatrix& khat, int sign = +1);

// Cyclic shift |j> -> |j + 1 mod n>.
CMatrix CyclicShift(Index n);

}  // namespace cvgpr

#endif  // CVGPR_ORACLE_PROTOCOL_HPP_
