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

#ifndef CVGPR_GRID_ORACLE_HPP_
#define CVGPR_GRID_ORACLE_HPP_

#include <functional>
#include <iosfwd>
#include <vector>

#include "cvgpr/types.hpp"

namespace cvgpr {

// Square grid of wavefunction samples, row-major with the row index on q and the
// column index on q̃. Node i sits at (i - n/2) * spacing.
struct WavefunctionGrid {
  Index n = 0;
  double spacing = 0.0;
  std::vector<Complex> values;

  double Coordinate(Index i) const { return static_cast<double>(i - n / 2) * spacing; }
  Complex& at(Index i, Index j) { return values[static_cast<std::size_t>(i * n + j)]; }
  const Complex& at(Index i, Index j) const { return values[static_cast<std::size_t>(i * n + j)]; }
  double SquaredNorm() const;

  static WavefunctionGrid Sample(Index n, double spacing, const std::function<Complex(double, double)>& f);
};

// Evolves under exp(i alpha lambda_eff p p̃) by Fourier methods: a split-step
// phase multiply on the input grid when the evolved state still fits, otherwise
// the exact Fresnel-type kernel evaluated with one scaled FFT onto a wider output
// grid. Throws ResolutionError when the grid cannot resolve the result.
WavefunctionGrid GridOracleEvolve(const WavefunctionGrid& psi, double lambda_eff, double alpha);

// sqrt(Σ |psi_ij - f(q_i, q̃_j)|² h²).
double GridL2Distance(const WavefunctionGrid& psi, const std::function<Complex(double, double)>& f);

// Raw dump: n (int64), spacing (double), then n² (re, im) double pairs, little-endian.
void WriteGridDump(std::ostream& out, const WavefunctionGrid& grid);

}  // namespace cvgpr

#endif  // CVGPR_GRID_ORACLE_HPP_
