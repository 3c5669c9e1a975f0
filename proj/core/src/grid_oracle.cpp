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

#include "cvgpr/grid_oracle.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>

#include <fftw3.h>
#include <fmt/format.h>

#include "cvgpr/error.hpp"

namespace cvgpr {

namespace {

constexpr double kPi = std::numbers::pi;
// Number of rms widths that must fit inside a grid or below its Nyquist frequency.
constexpr double kCoverage = 12.0;
constexpr double kNormDrift = 1e-6;

class Fft2d {
 public:
  Fft2d(Index n, int sign) : n_(n) {
    buffer_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * static_cast<std::size_t>(n * n)));
    plan_ = fftw_plan_dft_2d(static_cast<int>(n), static_cast<int>(n), buffer_, buffer_, sign, FFTW_ESTIMATE);
  }
  ~Fft2d() {
    fftw_destroy_plan(plan_);
    fftw_free(buffer_);
  }
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;

  Complex* data() { return reinterpret_cast<Complex*>(buffer_); }
  void Execute() { fftw_execute(plan_); }

 private:
  Index n_;
  fftw_complex* buffer_;
  fftw_plan plan_;
};

double FrequencyOf(Index k, Index n, double spacing) {
  const Index centred = k < n / 2 ? k : k - n;
  return 2.0 * kPi * static_cast<double>(centred) / (static_cast<double>(n) * spacing);
}

struct Spread {
  double q_rms;
  double p_rms;
};

Spread MeasureSpread(const WavefunctionGrid& psi) {
  const Index n = psi.n;
  double norm = 0.0, q2 = 0.0, qt2 = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double w = std::norm(psi.at(i, j));
      norm += w;
      q2 += w * psi.Coordinate(i) * psi.Coordinate(i);
      qt2 += w * psi.Coordinate(j) * psi.Coordinate(j);
    }
  }
  Fft2d fft(n, FFTW_FORWARD);
  std::copy(psi.values.begin(), psi.values.end(), fft.data());
  fft.Execute();
  double pnorm = 0.0, p2 = 0.0, pt2 = 0.0;
  for (Index k = 0; k < n; ++k) {
    const double p = FrequencyOf(k, n, psi.spacing);
    for (Index l = 0; l < n; ++l) {
      const double pt = FrequencyOf(l, n, psi.spacing);
      const double w = std::norm(fft.data()[k * n + l]);
      pnorm += w;
      p2 += w * p * p;
      pt2 += w * pt * pt;
    }
  }
  if (!(norm > 0.0)) throw ResolutionError("wavefunction grid is identically zero");
  return {std::sqrt(std::max(q2, qt2) / norm), std::sqrt(std::max(p2, pt2) / pnorm)};
}

WavefunctionGrid SplitStep(const WavefunctionGrid& psi, double beta) {
  const Index n = psi.n;
  Fft2d forward(n, FFTW_FORWARD);
  Fft2d backward(n, FFTW_BACKWARD);
  std::copy(psi.values.begin(), psi.values.end(), forward.data());
  forward.Execute();
  const double scale = 1.0 / static_cast<double>(n * n);
  for (Index k = 0; k < n; ++k) {
    const double p = FrequencyOf(k, n, psi.spacing);
    for (Index l = 0; l < n; ++l) {
      const double pt = FrequencyOf(l, n, psi.spacing);
      backward.data()[k * n + l] = forward.data()[k * n + l] * std::exp(Complex(0.0, beta * p * pt)) * scale;
    }
  }
  backward.Execute();
  WavefunctionGrid out{n, psi.spacing, std::vector<Complex>(backward.data(), backward.data() + n * n)};
  return out;
}

// ψ_out(q, q̃) = (2π|β|)⁻¹ ∫∫ exp(-i (q - q')(q̃ - q̃') / β) ψ(q', q̃') dq' dq̃', evaluated
// on the grid with spacing 2π|β| / (n h) where the cross terms become one DFT.
WavefunctionGrid Fresnel(const WavefunctionGrid& psi, double beta) {
  const Index n = psi.n;
  const double h = psi.spacing;
  const double h_out = 2.0 * kPi * std::abs(beta) / (static_cast<double>(n) * h);
  Fft2d fft(n, beta > 0.0 ? FFTW_BACKWARD : FFTW_FORWARD);
  Complex* a = fft.data();
  for (Index i = 0; i < n; ++i) {
    const double q = psi.Coordinate(i);
    for (Index j = 0; j < n; ++j) {
      const double qt = psi.Coordinate(j);
      const double parity = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      a[i * n + j] = parity * psi.at(i, j) * std::exp(Complex(0.0, -q * qt / beta));
    }
  }
  fft.Execute();
  WavefunctionGrid out{n, h_out, std::vector<Complex>(static_cast<std::size_t>(n * n))};
  const double pref = h * h / (2.0 * kPi * std::abs(beta));
  for (Index k = 0; k < n; ++k) {
    const double q = out.Coordinate(k);
    for (Index l = 0; l < n; ++l) {
      const double qt = out.Coordinate(l);
      const double parity = ((k + l) % 2 == 0) ? 1.0 : -1.0;
      out.at(k, l) = parity * pref * std::exp(Complex(0.0, -q * qt / beta)) * a[l * n + k];
    }
  }
  return out;
}

}  // namespace

double WavefunctionGrid::SquaredNorm() const {
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  return s * spacing * spacing;
}

WavefunctionGrid WavefunctionGrid::Sample(Index n, double spacing, const std::function<Complex(double, double)>& f) {
  if (n < 4 || n % 4 != 0) throw InputError(fmt::format("grid size must be a positive multiple of 4, got {}", n));
  if (!(spacing > 0.0)) throw InputError("grid spacing must be positive");
  WavefunctionGrid grid{n, spacing, std::vector<Complex>(static_cast<std::size_t>(n * n))};
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) grid.at(i, j) = f(grid.Coordinate(i), grid.Coordinate(j));
  }
  return grid;
}

WavefunctionGrid GridOracleEvolve(const WavefunctionGrid& psi, double lambda_eff, double alpha) {
  if (psi.n < 4 || psi.n % 4 != 0 || psi.values.size() != static_cast<std::size_t>(psi.n * psi.n)) {
    throw InputError("malformed wavefunction grid");
  }
  const double beta = alpha * lambda_eff;
  if (beta == 0.0) return psi;

  const Spread spread = MeasureSpread(psi);
  const double half_extent = static_cast<double>(psi.n / 2) * psi.spacing;
  const double nyquist = kPi / psi.spacing;
  if (kCoverage * spread.q_rms > half_extent || kCoverage * spread.p_rms > nyquist) {
    throw ResolutionError("input wavefunction is not resolved by its grid");
  }

  WavefunctionGrid out;
  if (kCoverage * (spread.q_rms + std::abs(beta) * spread.p_rms) <= half_extent) {
    out = SplitStep(psi, beta);
  } else if (kCoverage * (spread.q_rms / std::abs(beta) + spread.p_rms) <= nyquist) {
    out = Fresnel(psi, beta);
  } else {
    throw ResolutionError(fmt::format("grid of {} points at spacing {:.3g} cannot resolve shear {:.3g}", psi.n,
                                      psi.spacing, beta));
  }
  const double before = psi.SquaredNorm();
  const double after = out.SquaredNorm();
  if (std::abs(after - before) > kNormDrift * before) {
    throw ResolutionError(fmt::format("grid norm drifted from {:.12g} to {:.12g}", before, after));
  }
  return out;
}

double GridL2Distance(const WavefunctionGrid& psi, const std::function<Complex(double, double)>& f) {
  double s = 0.0;
  for (Index i = 0; i < psi.n; ++i) {
    for (Index j = 0; j < psi.n; ++j) s += std::norm(psi.at(i, j) - f(psi.Coordinate(i), psi.Coordinate(j)));
  }
  return std::sqrt(s) * psi.spacing;
}

void WriteGridDump(std::ostream& out, const WavefunctionGrid& grid) {
  static_assert(std::endian::native == std::endian::little, "grid dumps assume a little-endian host");
  const std::int64_t n = grid.n;
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(&grid.spacing), sizeof(grid.spacing));
  for (const auto& v : grid.values) {
    const double parts[2] = {v.real(), v.imag()};
    out.write(reinterpret_cast<const char*>(parts), sizeof(parts));
  }
}

}  // namespace cvgpr
