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

#include "cvgpr/oracle_engine.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <fmt/format.h>

#include "cvgpr/error.hpp"

namespace cvgpr {

OracleEngine::OracleEngine(const OneSparseDecomposition& decomposition, Index data_dim,
                           const TrotterSchedule& schedule)
    : schedule_(schedule), data_dim_(data_dim) {
  schedule_.Validate();
  const Index d = data_dim;
  const Index pair_dim = d * d;
  if (decomposition.htilde.dim() != pair_dim) {
    throw InputError(fmt::format("decomposition acts on dimension {}, expected {}", decomposition.htilde.dim(), pair_dim));
  }
  std::map<std::int64_t, CMatrix> projectors;
  auto add = [&](std::int64_t eigenvalue, const CVector& v) {
    auto it = projectors.find(eigenvalue);
    if (it == projectors.end()) it = projectors.emplace(eigenvalue, CMatrix::Zero(pair_dim, pair_dim)).first;
    it->second += v * v.adjoint();
  };
  const double r = 1.0 / std::sqrt(2.0);
  for (Index x = 0; x < d; ++x) {
    const Index diag = x * d + x;
    add(decomposition.htilde.At(diag, diag), CVector::Unit(pair_dim, diag));
    for (Index y = x + 1; y < d; ++y) {
      const Index xy = x * d + y;
      const Index yx = y * d + x;
      const std::int64_t m = decomposition.htilde.At(xy, yx);
      CVector plus = CVector::Zero(pair_dim);
      CVector minus = CVector::Zero(pair_dim);
      plus(xy) = r;
      plus(yx) = r;
      minus(xy) = r;
      minus(yx) = -r;
      add(m, plus);
      add(-m, minus);
    }
  }
  std::int64_t g = 0;
  std::int64_t max_abs = 0;
  for (const auto& [k, proj] : projectors) {
    g = std::gcd(g, std::abs(k));
    max_abs = std::max(max_abs, std::abs(k));
    CMatrix left = CMatrix::Zero(d, d);
    for (Index x = 0; x < d; ++x) {
      for (Index xx = 0; xx < d; ++xx) {
        left(x, xx) = proj.block(x * d, xx * d, d, d).sum() / static_cast<double>(d);
      }
    }
    sectors_.push_back({k, proj, left});
    std::vector<CMatrix> image;
    const double s = 1.0 / std::sqrt(static_cast<double>(d));
    for (Index i = 0; i < d; ++i) {
      const CVector col = proj.middleCols(i * d, d).rowwise().sum() * s;
      image.push_back(Eigen::Map<const CMatrix>(col.data(), d, d).transpose());
    }
    images_.push_back(std::move(image));
  }
  unit_ = g == 0 ? 1 : g;
  reach_ = max_abs / unit_;
}

double OracleEngine::lattice_spacing() const {
  return static_cast<double>(schedule_.sign) * schedule_.StepAngle() * schedule_.zeta * static_cast<double>(unit_);
}

std::int64_t OracleEngine::HalfWidth() const { return schedule_.steps * reach_; }

std::vector<CMatrix> OracleEngine::EvolveCoherence(const CMatrix& initial) const {
  const std::int64_t half = HalfWidth();
  if (half > kMaxCoherenceHalfWidth) {
    throw InputError(fmt::format("oracle lattice of half-width {} exceeds the limit {}; reduce the step count", half,
                                 kMaxCoherenceHalfWidth));
  }
  const Index d = data_dim_;
  std::vector<CMatrix> current(static_cast<std::size_t>(2 * half + 1), CMatrix::Zero(d, d));
  std::vector<CMatrix> next = current;
  current[static_cast<std::size_t>(half)] = initial;
  for (std::int64_t step = 0; step < schedule_.steps; ++step) {
    const std::int64_t span = step * reach_;
    for (std::int64_t n = -span - reach_; n <= span + reach_; ++n) next[static_cast<std::size_t>(n + half)].setZero();
    for (std::int64_t n = -span; n <= span; ++n) {
      const CMatrix& y = current[static_cast<std::size_t>(n + half)];
      for (const auto& sector : sectors_) {
        next[static_cast<std::size_t>(n + sector.eigenvalue / unit_ + half)].noalias() += sector.left_map * y;
      }
    }
    std::swap(current, next);
  }
  return current;
}

namespace {

// Column (i, j) of C_ab is vec(tr_swap[Π_a (E_ij ⊗ |s><s|) Π_b]) = vec(image_a,i image_b,j†).
std::vector<std::vector<CMatrix>> TwoSidedMaps(const std::vector<std::vector<CMatrix>>& images, Index d) {
  std::vector<std::vector<CMatrix>> maps(images.size(), std::vector<CMatrix>(images.size()));
  for (std::size_t a = 0; a < images.size(); ++a) {
    for (std::size_t b = 0; b < images.size(); ++b) {
      CMatrix c(d * d, d * d);
      for (Index i = 0; i < d; ++i) {
        for (Index j = 0; j < d; ++j) {
          const CMatrix out = images[a][static_cast<std::size_t>(i)] * images[b][static_cast<std::size_t>(j)].adjoint();
          c.col(j * d + i) = Eigen::Map<const CVector>(out.data(), d * d);
        }
      }
      maps[a][b] = std::move(c);
    }
  }
  return maps;
}

}  // namespace

std::vector<CMatrix> OracleEngine::EvolvePopulation(const CMatrix& initial) const {
  const std::int64_t half = HalfWidth();
  const std::int64_t width = 2 * half + 1;
  const Index d = data_dim_;
  const auto maps = TwoSidedMaps(images_, d);
  std::vector<CVector> current(static_cast<std::size_t>(width * width), CVector::Zero(d * d));
  std::vector<CVector> next = current;
  current[static_cast<std::size_t>(half * width + half)] = Eigen::Map<const CVector>(initial.data(), d * d);
  for (std::int64_t step = 0; step < schedule_.steps; ++step) {
    const std::int64_t span = step * reach_;
    const std::int64_t grown = span + reach_;
    for (std::int64_t n = -grown; n <= grown; ++n) {
      for (std::int64_t m = -grown; m <= grown; ++m) next[static_cast<std::size_t>((n + half) * width + m + half)].setZero();
    }
    for (std::int64_t n = -span; n <= span; ++n) {
      for (std::int64_t m = -span; m <= span; ++m) {
        const CVector& x = current[static_cast<std::size_t>((n + half) * width + m + half)];
        if (x.squaredNorm() == 0.0) continue;
        for (std::size_t a = 0; a < sectors_.size(); ++a) {
          const std::int64_t na = n + sectors_[a].eigenvalue / unit_ + half;
          for (std::size_t b = 0; b < sectors_.size(); ++b) {
            const std::int64_t mb = m + sectors_[b].eigenvalue / unit_ + half;
            next[static_cast<std::size_t>(na * width + mb)].noalias() += maps[a][b] * x;
          }
        }
      }
    }
    std::swap(current, next);
  }
  std::vector<CMatrix> out;
  out.reserve(current.size());
  for (const auto& v : current) out.push_back(Eigen::Map<const CMatrix>(v.data(), d, d));
  return out;
}

CMatrix OracleEngine::FinalAtMomentum(const CMatrix& initial, double mu) const {
  const Index d = data_dim_;
  if (initial.rows() != 2 * d) throw InputError("initial state must live on [flag, data]");
  const double tau = static_cast<double>(schedule_.sign) * schedule_.StepAngle() * schedule_.zeta;
  CMatrix left = CMatrix::Zero(d, d);
  std::vector<CMatrix> image(static_cast<std::size_t>(d), CMatrix::Zero(d, d));
  for (std::size_t a = 0; a < sectors_.size(); ++a) {
    const Complex phase = std::exp(Complex(0.0, tau * mu * static_cast<double>(sectors_[a].eigenvalue)));
    left += phase * sectors_[a].left_map;
    for (Index i = 0; i < d; ++i) image[static_cast<std::size_t>(i)] += phase * images_[a][static_cast<std::size_t>(i)];
  }
  CMatrix super(d * d, d * d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      const CMatrix out = image[static_cast<std::size_t>(i)] * image[static_cast<std::size_t>(j)].adjoint();
      super.col(j * d + i) = Eigen::Map<const CVector>(out.data(), d * d);
    }
  }
  CMatrix coherence = initial.bottomLeftCorner(d, d);
  CMatrix pop = initial.bottomRightCorner(d, d);
  CVector pop_vec = Eigen::Map<const CVector>(pop.data(), d * d);
  for (std::int64_t step = 0; step < schedule_.steps; ++step) {
    coherence = left * coherence;
    pop_vec = super * pop_vec;
  }
  CMatrix out = initial;
  out.bottomLeftCorner(d, d) = coherence;
  out.topRightCorner(d, d) = coherence.adjoint();
  out.bottomRightCorner(d, d) = Eigen::Map<const CMatrix>(pop_vec.data(), d, d);
  return out;
}

ReadoutMoments OracleReadout(const OracleEngine& engine, const CVector& joint_input, double xi,
                             const HomodyneWindow& window, bool with_population) {
  const Index d = engine.data_dim();
  if (joint_input.size() != 2 * d) throw InputError("joint input does not match the engine");
  const Index top = d / 2;
  const CVector psi_y = joint_input.head(d);
  const CVector psi_k = joint_input.tail(d);
  const double spacing = engine.lattice_spacing();
  const std::int64_t half = engine.HalfWidth();
  const GaussianPair origin(xi, 0.0);
  const double w00 = WindowOverlap(origin, origin, window).real();

  ReadoutMoments out;
  const std::vector<CMatrix> coherence = engine.EvolveCoherence(psi_k * psi_y.adjoint());
  Complex c10 = 0.0;
  for (std::int64_t n = -half; n <= half; ++n) {
    const Complex t = coherence[static_cast<std::size_t>(n + half)].topRows(top).trace();
    if (std::abs(t) < 1e-18) continue;
    c10 += t * WindowOverlap(origin, GaussianPair(xi, static_cast<double>(n) * spacing), window);
  }
  out.raw = 2.0 * c10.real();

  if (!with_population) {
    out.window_probability = std::nan("");
    out.top_weight = std::nan("");
    return out;
  }
  const std::vector<CMatrix> pop = engine.EvolvePopulation(psi_k * psi_k.adjoint());
  const std::int64_t width = 2 * half + 1;
  double total = psi_y.squaredNorm() * w00;
  double top_weight = psi_y.head(top).squaredNorm() * w00;
  for (std::int64_t n = -half; n <= half; ++n) {
    for (std::int64_t m = -half; m <= half; ++m) {
      const CMatrix& x = pop[static_cast<std::size_t>((n + half) * width + m + half)];
      const Complex tr = x.trace();
      const Complex tr_top = x.topLeftCorner(top, top).trace();
      if (std::abs(tr) < 1e-18 && std::abs(tr_top) < 1e-18) continue;
      const Complex overlap = WindowOverlap(GaussianPair(xi, static_cast<double>(m) * spacing),
                                            GaussianPair(xi, static_cast<double>(n) * spacing), window);
      total += (tr * overlap).real();
      top_weight += (tr_top * overlap).real();
    }
  }
  out.window_probability = total;
  out.top_weight = top_weight;
  return out;
}

double MomentumProductDensity(double mu, double xi) {
  const double a = 2.0 * xi * xi;
  return a * boost::math::cyl_bessel_k(0, a * std::abs(mu)) / std::numbers::pi;
}

namespace {

struct DirectPropagator {
  Matrix vectors;
  Vector values;
  double angle;
};

DirectPropagator MakeDirect(const DilatedMatrix& khat, double gamma, int sign) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(khat.khat);
  return {solver.eigenvectors(), solver.eigenvalues(),
          static_cast<double>(sign) * gamma / (4.0 * static_cast<double>(khat.n_padded))};
}

CMatrix DirectAt(const DirectPropagator& prop, const CVector& joint_input, double mu) {
  const Index d = prop.values.size();
  CVector psi = joint_input;
  CVector phases(d);
  for (Index i = 0; i < d; ++i) phases(i) = std::exp(Complex(0.0, prop.angle * mu * prop.values(i)));
  const CMatrix v = prop.vectors.cast<Complex>();
  psi.tail(d) = v * phases.asDiagonal() * (v.adjoint() * joint_input.tail(d));
  return psi * psi.adjoint();
}

}  // namespace

CMatrix DirectAtMomentum(const DilatedMatrix& khat, const CVector& joint_input, double gamma, int sign, double mu) {
  return DirectAt(MakeDirect(khat, gamma, sign), joint_input, mu);
}

double MomentumResolvedTraceDistance(const OracleEngine& engine, const DilatedMatrix& khat, const CVector& joint_input,
                                     double xi, double tolerance) {
  if (!(tolerance > 0.0)) throw InputError("trace-distance tolerance must be positive");
  const DirectPropagator direct = MakeDirect(khat, engine.schedule().gamma, engine.schedule().sign);
  const CMatrix initial = joint_input * joint_input.adjoint();
  const auto integrand = [&](double mu) {
    return MomentumProductDensity(mu, xi) *
           TraceDistance(engine.FinalAtMomentum(initial, mu), DirectAt(direct, joint_input, mu));
  };
  // The density has a logarithmic singularity at mu = 0, which exp-sinh handles at the endpoint.
  boost::math::quadrature::exp_sinh<double> rule;
  const double total = rule.integrate(integrand, tolerance) + rule.integrate([&](double mu) { return integrand(-mu); },
                                                                             tolerance);
  return total;
}

}  // namespace cvgpr
