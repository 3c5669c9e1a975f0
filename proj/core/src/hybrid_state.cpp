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

#include "cvgpr/hybrid_state.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "cvgpr/error.hpp"
#include "spectral.hpp"

namespace cvgpr {

namespace internal {

void RequireHermitian(const CMatrix& A, const char* what) {
  if (A.rows() != A.cols()) throw InputError(fmt::format("{} must be square", what));
  const double skew = (A - A.adjoint()).cwiseAbs().maxCoeff();
  if (skew > 1e-12) throw InputError(fmt::format("{} is not Hermitian (deviation {:.3g})", what, skew));
}

std::vector<Eigenspace> Eigenspaces(const CMatrix& A) {
  RequireHermitian(A, "generator");
  const CMatrix H = (A + A.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(H);
  const Vector& lambda = solver.eigenvalues();
  const CMatrix& V = solver.eigenvectors();
  const double scale = 1.0 + lambda.cwiseAbs().maxCoeff();
  std::vector<Eigenspace> out;
  Index start = 0;
  while (start < lambda.size()) {
    Index stop = start + 1;
    while (stop < lambda.size() && lambda(stop) - lambda(stop - 1) <= 1e-9 * scale) ++stop;
    const auto cols = V.middleCols(start, stop - start);
    out.push_back({lambda.segment(start, stop - start).mean(), cols * cols.adjoint()});
    start = stop;
  }
  return out;
}

}  // namespace internal

RegisterLayout::RegisterLayout(std::vector<Register> registers) : registers_(std::move(registers)) {
  dim_ = 1;
  for (const auto& r : registers_) {
    if (r.dim < 1) throw InputError(fmt::format("register '{}' has dimension {}", r.name, r.dim));
    for (const auto& other : registers_) {
      if (&other != &r && other.name == r.name) throw InputError(fmt::format("duplicate register '{}'", r.name));
    }
    dim_ *= r.dim;
  }
}

bool RegisterLayout::Has(const std::string& name) const {
  return std::any_of(registers_.begin(), registers_.end(), [&](const Register& r) { return r.name == name; });
}

std::size_t RegisterLayout::Position(const std::string& name) const {
  for (std::size_t i = 0; i < registers_.size(); ++i) {
    if (registers_[i].name == name) return i;
  }
  throw InputError(fmt::format("no register named '{}'", name));
}

Index RegisterLayout::RegisterDim(const std::string& name) const { return registers_[Position(name)].dim; }

std::vector<Index> RegisterLayout::Digits(Index index) const {
  std::vector<Index> digits(registers_.size());
  for (std::size_t i = registers_.size(); i-- > 0;) {
    digits[i] = index % registers_[i].dim;
    index /= registers_[i].dim;
  }
  return digits;
}

Index RegisterLayout::Compose(const std::vector<Index>& digits) const {
  Index index = 0;
  for (std::size_t i = 0; i < registers_.size(); ++i) index = index * registers_[i].dim + digits[i];
  return index;
}

CMatrix RegisterLayout::Embed(const CMatrix& op, const std::vector<std::string>& names) const {
  std::vector<std::size_t> positions;
  Index sub_dim = 1;
  for (const auto& name : names) {
    positions.push_back(Position(name));
    sub_dim *= registers_[positions.back()].dim;
  }
  if (op.rows() != sub_dim || op.cols() != sub_dim) {
    throw InputError(fmt::format("operator of size {} does not match registers of dimension {}", op.rows(), sub_dim));
  }
  // Group full indices by the digits outside the named registers.
  const Index rest_count = dim_ / sub_dim;
  std::vector<Index> table(static_cast<std::size_t>(dim_));
  std::vector<Index> sub_of(static_cast<std::size_t>(dim_));
  std::vector<Index> rest_of(static_cast<std::size_t>(dim_));
  for (Index full = 0; full < dim_; ++full) {
    std::vector<Index> digits = Digits(full);
    Index sub = 0;
    for (std::size_t p : positions) {
      sub = sub * registers_[p].dim + digits[p];
      digits[p] = 0;
    }
    sub_of[static_cast<std::size_t>(full)] = sub;
    rest_of[static_cast<std::size_t>(full)] = Compose(digits);
  }
  // Dense re-numbering of the rest keys.
  std::vector<Index> keys(rest_of);
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  if (static_cast<Index>(keys.size()) != rest_count) throw NumericalError("register embedding is inconsistent");
  for (Index full = 0; full < dim_; ++full) {
    const Index key = std::lower_bound(keys.begin(), keys.end(), rest_of[static_cast<std::size_t>(full)]) - keys.begin();
    table[static_cast<std::size_t>(key * sub_dim + sub_of[static_cast<std::size_t>(full)])] = full;
  }
  CMatrix out = CMatrix::Zero(dim_, dim_);
  for (Index key = 0; key < rest_count; ++key) {
    for (Index r = 0; r < sub_dim; ++r) {
      const Index fr = table[static_cast<std::size_t>(key * sub_dim + r)];
      for (Index c = 0; c < sub_dim; ++c) {
        out(fr, table[static_cast<std::size_t>(key * sub_dim + c)]) = op(r, c);
      }
    }
  }
  return out;
}

RegisterLayout RegisterLayout::Prepended(const Register& reg) const {
  std::vector<Register> regs;
  regs.push_back(reg);
  regs.insert(regs.end(), registers_.begin(), registers_.end());
  return RegisterLayout(std::move(regs));
}

RegisterLayout RegisterLayout::Without(const std::string& name) const {
  std::vector<Register> regs = registers_;
  regs.erase(regs.begin() + static_cast<std::ptrdiff_t>(Position(name)));
  return RegisterLayout(std::move(regs));
}

double ShearTolerance(double shear) { return 1e-12 * (1.0 + std::abs(shear)); }

BranchedHybridState::BranchedHybridState(RegisterLayout layout, double xi) : layout_(std::move(layout)), xi_(xi) {
  if (!(xi > 0.0) || !std::isfinite(xi)) throw InputError(fmt::format("xi must be positive, got {}", xi));
}

BranchedHybridState BranchedHybridState::Product(RegisterLayout layout, const CVector& amplitudes, double xi) {
  if (amplitudes.size() != layout.dim()) {
    throw InputError(fmt::format("amplitude vector has size {}, layout needs {}", amplitudes.size(), layout.dim()));
  }
  BranchedHybridState state(std::move(layout), xi);
  state.Accumulate(0.0, amplitudes);
  return state;
}

void BranchedHybridState::Accumulate(double shear, const CVector& amplitudes) {
  for (auto& b : branches_) {
    if (std::abs(b.mode.shear() - shear) <= ShearTolerance(shear)) {
      b.amplitudes += amplitudes;
      return;
    }
  }
  branches_.push_back({GaussianPair(xi_, shear), amplitudes});
}

void BranchedHybridState::Scale(Complex factor) {
  for (auto& b : branches_) b.amplitudes *= factor;
}

CMatrix ModeGram(const std::vector<GaussianPair>& modes, const HomodyneWindow& window) {
  const Index n = static_cast<Index>(modes.size());
  CMatrix gram(n, n);
  for (Index a = 0; a < n; ++a) {
    for (Index b = a; b < n; ++b) {
      const Complex v = WindowOverlap(modes[static_cast<std::size_t>(a)], modes[static_cast<std::size_t>(b)], window);
      gram(a, b) = v;
      gram(b, a) = std::conj(v);
    }
  }
  return gram;
}

BranchedHybridState ApplyDiscreteUnitary(const BranchedHybridState& state, const CMatrix& U) {
  if (U.rows() != state.layout().dim() || U.cols() != state.layout().dim()) {
    throw InputError("unitary does not match the register layout");
  }
  BranchedHybridState out(state.layout(), state.xi());
  out.set_window(state.window());
  for (const auto& b : state.branches()) out.Accumulate(b.mode.shear(), U * b.amplitudes);
  return out;
}

BranchedHybridState ApplyCoupledEvolution(const BranchedHybridState& state, const CMatrix& A, double alpha) {
  if (A.rows() != state.layout().dim()) throw InputError("generator does not match the register layout");
  internal::RequireHermitian(A, "coupled generator");
  if (!state.window().is_full()) throw InputError("cannot evolve a window-projected state");
  if (alpha == 0.0) return state;
  BranchedHybridState out(state.layout(), state.xi());
  for (const auto& space : internal::Eigenspaces(A)) {
    for (const auto& b : state.branches()) {
      CVector v = space.projector * b.amplitudes;
      if (v.squaredNorm() == 0.0) continue;
      out.Accumulate(b.mode.shear() + alpha * space.eigenvalue, v);
    }
  }
  return out;
}

namespace {

std::vector<GaussianPair> Modes(const BranchedHybridState& state) {
  std::vector<GaussianPair> modes;
  for (const auto& b : state.branches()) modes.push_back(b.mode);
  return modes;
}

Complex QuadraticForm(const BranchedHybridState& state, const CMatrix& observable) {
  const CMatrix gram = ModeGram(Modes(state), state.window());
  Complex total = 0.0;
  const auto& branches = state.branches();
  for (std::size_t a = 0; a < branches.size(); ++a) {
    for (std::size_t b = 0; b < branches.size(); ++b) {
      const Complex discrete = branches[a].amplitudes.dot(observable * branches[b].amplitudes);
      total += discrete * gram(static_cast<Index>(a), static_cast<Index>(b));
    }
  }
  return total;
}

}  // namespace

std::pair<BranchedHybridState, double> WindowProject(const BranchedHybridState& state,
                                                     const HomodyneWindow& window) {
  BranchedHybridState out = state;
  out.set_window({std::min(state.window().half_width, window.half_width)});
  return {out, SquaredNorm(out)};
}

double DiscreteExpectation(const BranchedHybridState& state, const CMatrix& observable) {
  if (observable.rows() != state.layout().dim()) throw InputError("observable does not match the register layout");
  internal::RequireHermitian(observable, "observable");
  return QuadraticForm(state, observable).real();
}

double SquaredNorm(const BranchedHybridState& state) {
  return QuadraticForm(state, CMatrix::Identity(state.layout().dim(), state.layout().dim())).real();
}

std::pair<BranchedHybridState, double> ProjectRegister(const BranchedHybridState& state, const std::string& name,
                                                       const CVector& target) {
  const CVector t = target.normalized();
  const CMatrix P = state.layout().Embed(t * t.adjoint(), {name});
  BranchedHybridState out(state.layout(), state.xi());
  out.set_window(state.window());
  for (const auto& b : state.branches()) out.Accumulate(b.mode.shear(), P * b.amplitudes);
  const double before = SquaredNorm(state);
  const double after = SquaredNorm(out);
  return {out, before > 0.0 ? after / before : 0.0};
}

BranchedHybridState AttachRegister(const BranchedHybridState& state, const Register& reg, const CVector& v) {
  if (v.size() != reg.dim) throw InputError(fmt::format("register '{}' state has wrong size", reg.name));
  BranchedHybridState out(state.layout().Prepended(reg), state.xi());
  out.set_window(state.window());
  const Index inner = state.layout().dim();
  for (const auto& b : state.branches()) {
    CVector amps(reg.dim * inner);
    for (Index k = 0; k < reg.dim; ++k) amps.segment(k * inner, inner) = v(k) * b.amplitudes;
    out.Accumulate(b.mode.shear(), amps);
  }
  return out;
}

CVector MomentumConditioned(const BranchedHybridState& state, double mu) {
  CVector out = CVector::Zero(state.layout().dim());
  for (const auto& b : state.branches()) out += std::exp(Complex(0.0, mu * b.mode.shear())) * b.amplitudes;
  return out;
}

double TraceDistance(const CMatrix& a, const CMatrix& b) {
  const CMatrix diff = a - b;
  Eigen::SelfAdjointEigenSolver<CMatrix> solver((diff + diff.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

}  // namespace cvgpr
