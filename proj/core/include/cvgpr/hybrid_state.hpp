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

#ifndef CVGPR_HYBRID_STATE_HPP_
#define CVGPR_HYBRID_STATE_HPP_

#include <string>
#include <utility>
#include <vector>

#include "cvgpr/gaussian_pair.hpp"
#include "cvgpr/types.hpp"

namespace cvgpr {

struct Register {
  std::string name;
  Index dim = 0;
};

// Ordered tensor factors of the discrete space; the first register is the most significant digit.
class RegisterLayout {
 public:
  RegisterLayout() = default;
  explicit RegisterLayout(std::vector<Register> registers);

  const std::vector<Register>& registers() const { return registers_; }
  Index dim() const { return dim_; }
  bool Has(const std::string& name) const;
  std::size_t Position(const std::string& name) const;
  Index RegisterDim(const std::string& name) const;

  std::vector<Index> Digits(Index index) const;
  Index Compose(const std::vector<Index>& digits) const;

  // Lifts an operator on the named registers (listed most significant first) to the full space.
  CMatrix Embed(const CMatrix& op, const std::vector<std::string>& names) const;

  RegisterLayout Prepended(const Register& reg) const;
  RegisterLayout Without(const std::string& name) const;

 private:
  std::vector<Register> registers_;
  Index dim_ = 1;
};

struct Branch {
  GaussianPair mode;
  CVector amplitudes;
};

// Σ_b |amplitudes_b> ⊗ |Φ_{β_b}> with every branch sharing the same squeezing xi.
// A finite window marks the state as Π|ψ> (unnormalized).
class BranchedHybridState {
 public:
  BranchedHybridState() = default;
  BranchedHybridState(RegisterLayout layout, double xi);

  // |amplitudes> ⊗ |Φ(xi)>.
  static BranchedHybridState Product(RegisterLayout layout, const CVector& amplitudes, double xi);

  const RegisterLayout& layout() const { return layout_; }
  double xi() const { return xi_; }
  const std::vector<Branch>& branches() const { return branches_; }
  const HomodyneWindow& window() const { return window_; }
  void set_window(const HomodyneWindow& window) { window_ = window; }

  // Adds amplitudes to the branch with this shear, creating it if needed.
  void Accumulate(double shear, const CVector& amplitudes);
  void Scale(Complex factor);

 private:
  RegisterLayout layout_;
  double xi_ = 1.0;
  std::vector<Branch> branches_;
  HomodyneWindow window_;
};

// Shears closer than this are treated as one branch.
double ShearTolerance(double shear);

// <Φ_a|Π|Φ_b> for every pair of modes.
CMatrix ModeGram(const std::vector<GaussianPair>& modes, const HomodyneWindow& window);

BranchedHybridState ApplyDiscreteUnitary(const BranchedHybridState& state, const CMatrix& U);

// exp(i alpha A ⊗ p p̃) for a Hermitian A on the full discrete space.
BranchedHybridState ApplyCoupledEvolution(const BranchedHybridState& state, const CMatrix& A, double alpha);

// Returns Π|ψ> and its squared norm.
std::pair<BranchedHybridState, double> WindowProject(const BranchedHybridState& state, const HomodyneWindow& window);

// <ψ|O ⊗ I|ψ> including cross-branch mode overlaps (restricted to the window if one is set).
double DiscreteExpectation(const BranchedHybridState& state, const CMatrix& observable);
double SquaredNorm(const BranchedHybridState& state);

// Projects the named register onto |target>; returns the unnormalized state and the
// conditional probability ||Pψ||² / ||ψ||².
std::pair<BranchedHybridState, double> ProjectRegister(const BranchedHybridState& state, const std::string& name,
                                                       const CVector& target);

// |v> ⊗ |ψ> with the new register placed first.
BranchedHybridState AttachRegister(const BranchedHybridState& state, const Register& reg, const CVector& v);

// Discrete amplitudes at fixed p p̃ = mu, up to the mode wavefunction factor.
CVector MomentumConditioned(const BranchedHybridState& state, double mu);

struct DensityBlock {
  GaussianPair ket;
  GaussianPair bra;
  CMatrix matrix;
};

// Σ_blocks matrix ⊗ |Φ_ket><Φ_bra|: a mixed hybrid state whose mode blocks are sheared squeezed pairs.
class HybridDensity {
 public:
  HybridDensity() = default;
  HybridDensity(RegisterLayout layout, double xi);

  static HybridDensity FromPure(const BranchedHybridState& state);

  const RegisterLayout& layout() const { return layout_; }
  double xi() const { return xi_; }
  const std::vector<DensityBlock>& blocks() const { return blocks_; }
  const HomodyneWindow& window() const { return window_; }
  void set_window(const HomodyneWindow& window) { window_ = window; }

  void Accumulate(double ket_shear, double bra_shear, const CMatrix& matrix);
  void Scale(double factor);

 private:
  RegisterLayout layout_;
  double xi_ = 1.0;
  std::vector<DensityBlock> blocks_;
  HomodyneWindow window_;
};

HybridDensity ApplyDiscreteUnitary(const HybridDensity& rho, const CMatrix& U);
HybridDensity ApplyCoupledEvolution(const HybridDensity& rho, const CMatrix& A, double alpha);
std::pair<HybridDensity, double> WindowProject(const HybridDensity& rho, const HomodyneWindow& window);
double DiscreteExpectation(const HybridDensity& rho, const CMatrix& observable);
double Trace(const HybridDensity& rho);
std::pair<HybridDensity, double> ProjectRegister(const HybridDensity& rho, const std::string& name,
                                                 const CVector& target);
HybridDensity AttachRegister(const HybridDensity& rho, const Register& reg, const CVector& v);
HybridDensity PartialTrace(const HybridDensity& rho, const std::string& name);

// Discrete density operator at fixed p p̃ = mu, normalized like the full state.
CMatrix MomentumConditioned(const HybridDensity& rho, double mu);

// (1/2) ||A - B||_1 for Hermitian matrices.
double TraceDistance(const CMatrix& a, const CMatrix& b);

}  // namespace cvgpr

#endif  // CVGPR_HYBRID_STATE_HPP_
