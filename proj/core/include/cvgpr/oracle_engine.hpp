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

#ifndef CVGPR_ORACLE_ENGINE_HPP_
#define CVGPR_ORACLE_ENGINE_HPP_

#include <cstdint>
#include <vector>

#include "cvgpr/dilation.hpp"
#include "cvgpr/gaussian_pair.hpp"
#include "cvgpr/oracle_protocol.hpp"
#include "cvgpr/types.hpp"

namespace cvgpr {

inline constexpr std::int64_t kDefaultLatticeCap = 32;
inline constexpr std::int64_t kMaxCoherenceHalfWidth = 1 << 16;

// Exact simulation of M exponential-swap steps on the [flag, data] system without
// materializing the swap, index and ancilla registers. Every oracle reflection
// commutes with the others, so one walk equals exp(i τ H̃ N̂ ⊗ p p̃) on the pair
// space with τ = sign (γ / 2M) ζ, and H̃ splits into integer eigenspaces Π_k.
// Tracing the uniform swap state out gives
//   ρ10 -> Σ_k B_k ρ10 ⊗ shear k τ,       B_k = tr_swap[Π_k (· ⊗ |s><s|)]
//   ρ11 -> Σ_{a,b} C_ab(ρ11) ⊗ shears (a τ, b τ)
// so the flag-1 sectors live on a lattice of shears.
class OracleEngine {
 public:
  struct Sector {
    std::int64_t eigenvalue;
    CMatrix projector;  // on the data ⊗ swap pair space
    CMatrix left_map;   // B_k on the data register
  };

  OracleEngine(const OneSparseDecomposition& decomposition, Index data_dim, const TrotterSchedule& schedule);

  const std::vector<Sector>& sectors() const { return sectors_; }
  const TrotterSchedule& schedule() const { return schedule_; }
  Index data_dim() const { return data_dim_; }
  // Shear between neighbouring lattice sites.
  double lattice_spacing() const;
  // Number of lattice sites on each side of zero after all steps.
  std::int64_t HalfWidth() const;

  // Coefficients Y_n of ρ10 = Σ_n Y_n ⊗ |Φ_{n s}><Φ_0| after all steps; index n + HalfWidth().
  std::vector<CMatrix> EvolveCoherence(const CMatrix& initial) const;

  // Coefficients X_nm of ρ11 = Σ X_nm ⊗ |Φ_{n s}><Φ_{m s}|, row-major over (n, m).
  std::vector<CMatrix> EvolvePopulation(const CMatrix& initial) const;

  // Discrete state on [flag, data] at fixed p p̃ = mu after all steps.
  CMatrix FinalAtMomentum(const CMatrix& initial, double mu) const;

 private:
  TrotterSchedule schedule_;
  Index data_dim_;
  std::int64_t unit_ = 1;
  std::int64_t reach_ = 0;  // lattice sites added per step
  std::vector<Sector> sectors_;
  // images_[a][i] = Π_a (e_i ⊗ |s>) as a data x swap matrix.
  std::vector<std::vector<CMatrix>> images_;
};

// Moments of the window-projected flag/data state that determine the readout.
struct ReadoutMoments {
  double window_probability = 0.0;  // tr Π ρ Π
  double top_weight = 0.0;          // tr (P_top ⊗ I) Π ρ Π
  double raw = 0.0;                 // tr (P_top ⊗ X_flag) Π ρ Π
};

// Readout moments of the oracle path. `with_population` adds the flag-1 population
// lattice needed for the window probability and top weight (NaN otherwise).
ReadoutMoments OracleReadout(const OracleEngine& engine, const CVector& joint_input, double xi,
                             const HomodyneWindow& window, bool with_population);

// Density of mu = p p̃ when p and p̃ are independent with variance 1 / (2 xi²):
// (2 xi² / π) K0(2 xi² |mu|).
double MomentumProductDensity(double mu, double xi);

// E_{p, p̃} (1/2) ||R_oracle(p p̃) - R_direct(p p̃)||_1 over the squeezed-pair momentum
// distribution, integrated over mu = p p̃ with exp-sinh quadrature to `tolerance`.
double MomentumResolvedTraceDistance(const OracleEngine& engine, const DilatedMatrix& khat, const CVector& joint_input,
                                     double xi, double tolerance = 1e-9);

// Direct-path discrete state at fixed p p̃ = mu.
CMatrix DirectAtMomentum(const DilatedMatrix& khat, const CVector& joint_input, double gamma, int sign, double mu);

}  // namespace cvgpr

#endif  // CVGPR_ORACLE_ENGINE_HPP_
