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

#include <cmath>

#include <fmt/format.h>
#include <unsupported/Eigen/KroneckerProduct>

#include "cvgpr/error.hpp"
#include "cvgpr/hybrid_state.hpp"
#include "spectral.hpp"

namespace cvgpr {

HybridDensity::HybridDensity(RegisterLayout layout, double xi) : layout_(std::move(layout)), xi_(xi) {
  if (!(xi > 0.0) || !std::isfinite(xi)) throw InputError(fmt::format("xi must be positive, got {}", xi));
}

HybridDensity HybridDensity::FromPure(const BranchedHybridState& state) {
  HybridDensity rho(state.layout(), state.xi());
  rho.set_window(state.window());
  for (const auto& a : state.branches()) {
    for (const auto& b : state.branches()) {
      rho.Accumulate(a.mode.shear(), b.mode.shear(), a.amplitudes * b.amplitudes.adjoint());
    }
  }
  return rho;
}

void HybridDensity::Accumulate(double ket_shear, double bra_shear, const CMatrix& matrix) {
  for (auto& block : blocks_) {
    if (std::abs(block.ket.shear() - ket_shear) <= ShearTolerance(ket_shear) &&
        std::abs(block.bra.shear() - bra_shear) <= ShearTolerance(bra_shear)) {
      block.matrix += matrix;
      return;
    }
  }
  blocks_.push_back({GaussianPair(xi_, ket_shear), GaussianPair(xi_, bra_shear), matrix});
}

void HybridDensity::Scale(double factor) {
  for (auto& block : blocks_) block.matrix *= factor;
}

HybridDensity ApplyDiscreteUnitary(const HybridDensity& rho, const CMatrix& U) {
  if (U.rows() != rho.layout().dim()) throw InputError("unitary does not match the register layout");
  HybridDensity out(rho.layout(), rho.xi());
  out.set_window(rho.window());
  for (const auto& block : rho.blocks()) {
    out.Accumulate(block.ket.shear(), block.bra.shear(), U * block.matrix * U.adjoint());
  }
  return out;
}

HybridDensity ApplyCoupledEvolution(const HybridDensity& rho, const CMatrix& A, double alpha) {
  if (A.rows() != rho.layout().dim()) throw InputError("generator does not match the register layout");
  internal::RequireHermitian(A, "coupled generator");
  if (!rho.window().is_full()) throw InputError("cannot evolve a window-projected state");
  if (alpha == 0.0) return rho;
  const auto spaces = internal::Eigenspaces(A);
  HybridDensity out(rho.layout(), rho.xi());
  for (const auto& block : rho.blocks()) {
    for (const auto& left : spaces) {
      const CMatrix lx = left.projector * block.matrix;
      if (lx.squaredNorm() == 0.0) continue;
      for (const auto& right : spaces) {
        CMatrix piece = lx * right.projector;
        if (piece.squaredNorm() == 0.0) continue;
        out.Accumulate(block.ket.shear() + alpha * left.eigenvalue, block.bra.shear() + alpha * right.eigenvalue,
                       piece);
      }
    }
  }
  return out;
}

namespace {

Complex TraceAgainst(const HybridDensity& rho, const CMatrix& observable) {
  Complex total = 0.0;
  for (const auto& block : rho.blocks()) {
    const Complex overlap = WindowOverlap(block.bra, block.ket, rho.window());
    total += (observable * block.matrix).trace() * overlap;
  }
  return total;
}

}  // namespace

std::pair<HybridDensity, double> WindowProject(const HybridDensity& rho, const HomodyneWindow& window) {
  HybridDensity out = rho;
  out.set_window({std::min(rho.window().half_width, window.half_width)});
  return {out, Trace(out)};
}

double DiscreteExpectation(const HybridDensity& rho, const CMatrix& observable) {
  if (observable.rows() != rho.layout().dim()) throw InputError("observable does not match the register layout");
  internal::RequireHermitian(observable, "observable");
  return TraceAgainst(rho, observable).real();
}

double Trace(const HybridDensity& rho) {
  return TraceAgainst(rho, CMatrix::Identity(rho.layout().dim(), rho.layout().dim())).real();
}

std::pair<HybridDensity, double> ProjectRegister(const HybridDensity& rho, const std::string& name,
                                                 const CVector& target) {
  const CVector t = target.normalized();
  const CMatrix P = rho.layout().Embed(t * t.adjoint(), {name});
  HybridDensity out(rho.layout(), rho.xi());
  out.set_window(rho.window());
  for (const auto& block : rho.blocks()) out.Accumulate(block.ket.shear(), block.bra.shear(), P * block.matrix * P);
  const double before = Trace(rho);
  const double after = Trace(out);
  return {out, before > 0.0 ? after / before : 0.0};
}

HybridDensity AttachRegister(const HybridDensity& rho, const Register& reg, const CVector& v) {
  if (v.size() != reg.dim) throw InputError(fmt::format("register '{}' state has wrong size", reg.name));
  HybridDensity out(rho.layout().Prepended(reg), rho.xi());
  out.set_window(rho.window());
  const CMatrix vv = v * v.adjoint();
  for (const auto& block : rho.blocks()) {
    out.Accumulate(block.ket.shear(), block.bra.shear(), Eigen::kroneckerProduct(vv, block.matrix));
  }
  return out;
}

HybridDensity PartialTrace(const HybridDensity& rho, const std::string& name) {
  const RegisterLayout& layout = rho.layout();
  const std::size_t pos = layout.Position(name);
  const RegisterLayout reduced = layout.Without(name);
  const Index k_dim = layout.registers()[pos].dim;
  // full index of (reduced index r, traced digit k)
  std::vector<Index> full(static_cast<std::size_t>(reduced.dim() * k_dim));
  for (Index f = 0; f < layout.dim(); ++f) {
    std::vector<Index> digits = layout.Digits(f);
    const Index k = digits[pos];
    digits.erase(digits.begin() + static_cast<std::ptrdiff_t>(pos));
    full[static_cast<std::size_t>(reduced.Compose(digits) * k_dim + k)] = f;
  }
  HybridDensity out(reduced, rho.xi());
  out.set_window(rho.window());
  for (const auto& block : rho.blocks()) {
    CMatrix m = CMatrix::Zero(reduced.dim(), reduced.dim());
    for (Index r = 0; r < reduced.dim(); ++r) {
      for (Index c = 0; c < reduced.dim(); ++c) {
        Complex s = 0.0;
        for (Index k = 0; k < k_dim; ++k) {
          s += block.matrix(full[static_cast<std::size_t>(r * k_dim + k)], full[static_cast<std::size_t>(c * k_dim + k)]);
        }
        m(r, c) = s;
      }
    }
    out.Accumulate(block.ket.shear(), block.bra.shear(), m);
  }
  return out;
}

CMatrix MomentumConditioned(const HybridDensity& rho, double mu) {
  CMatrix out = CMatrix::Zero(rho.layout().dim(), rho.layout().dim());
  for (const auto& block : rho.blocks()) {
    out += std::exp(Complex(0.0, mu * (block.ket.shear() - block.bra.shear()))) * block.matrix;
  }
  return out;
}

}  // namespace cvgpr
