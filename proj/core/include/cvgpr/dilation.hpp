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

#ifndef CVGPR_DILATION_HPP_
#define CVGPR_DILATION_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <utility>
#include <vector>

#include "cvgpr/types.hpp"

namespace cvgpr {

inline constexpr std::int64_t kDefaultQuantizationCap = 1000000;

Index NextPowerOfTwo(Index n);

// K̂ = [[K, 0], [0, I]] of size 2N', where N' >= N is the next power of two
// and the padding rows/columns of K are identity.
struct DilatedMatrix {
  Matrix khat;
  Index n_original = 0;
  Index n_padded = 0;

  Index dim() const { return khat.rows(); }
};

DilatedMatrix EmbedKhat(const Matrix& K);

double MaxElementNorm(const Matrix& m);
double OperatorNorm(const Matrix& m);

// Sparse matrix with at most one stored entry per row, kept as row -> (col, value).
template <typename T>
class OneSparseMatrix {
 public:
  OneSparseMatrix() = default;
  explicit OneSparseMatrix(Index dim) : dim_(dim) {}

  Index dim() const { return dim_; }
  const std::map<Index, std::pair<Index, T>>& rows() const { return rows_; }

  void Set(Index row, Index col, T value);
  T At(Index row, Index col) const;
  T MaxAbs() const;
  bool IsSymmetric() const;
  Matrix Dense() const;

 private:
  Index dim_ = 0;
  std::map<Index, std::pair<Index, T>> rows_;
};

using SparseHermitian = OneSparseMatrix<double>;
using QuantizedMatrix = OneSparseMatrix<std::int64_t>;

// Pair index (x, y) -> x * khat.dim() + y. Row (x, y) holds K̂_xy at column (y, x).
SparseHermitian HermitianDilation(const DilatedMatrix& khat);

// Replaces each entry h by 2 floor(h / (2 zeta)).
QuantizedMatrix Quantize(const SparseHermitian& H, double zeta, std::int64_t cap = kDefaultQuantizationCap);

// Symmetric one-sparse matrix with entries ±1 and exactly one entry in every row.
class OneSparseReflection {
 public:
  struct Entry {
    Index col;
    int sign;
  };

  OneSparseReflection() = default;
  explicit OneSparseReflection(std::vector<Entry> entries) : entries_(std::move(entries)) {}

  Index dim() const { return static_cast<Index>(entries_.size()); }
  const std::vector<Entry>& entries() const { return entries_; }
  const Entry& entry(Index row) const { return entries_[static_cast<std::size_t>(row)]; }

  bool IsSymmetric() const;
  bool SquaresToIdentity() const;
  Matrix Dense() const;
  CVector Apply(const CVector& v) const;

 private:
  std::vector<Entry> entries_;
};

struct OneSparseDecomposition {
  double zeta = 0.0;
  QuantizedMatrix htilde;
  std::vector<OneSparseReflection> terms;
  std::int64_t j_max = 0;  // number of (H⁺, H⁻) pairs

  Index term_count() const { return static_cast<Index>(terms.size()); }
  // Sum of the terms as a dense integer-valued matrix.
  Matrix ReconstructDense() const;
};

// Pairs of reflections H_j⁺, H_j⁻ for j = 1..max|m|/2; throws InputError when
// the input is not symmetric, even-valued and one-sparse.
std::vector<OneSparseReflection> DecomposeOneSparse(const QuantizedMatrix& htilde);

OneSparseDecomposition BuildDecomposition(const DilatedMatrix& khat, double zeta,
                                          std::int64_t cap = kDefaultQuantizationCap);

// Q = Σ_j |j><j| ⊗ H_j on index ⊗ pair space.
class OracleQ {
 public:
  explicit OracleQ(std::vector<OneSparseReflection> terms);

  const std::vector<OneSparseReflection>& terms() const { return terms_; }
  Index index_dim() const { return static_cast<Index>(terms_.size()); }
  Index target_dim() const { return terms_.front().dim(); }
  Matrix Dense() const;

 private:
  std::vector<OneSparseReflection> terms_;
};

// Text dump: a header line with zeta, j_max, term count and dimension, then `j sign row col` lines.
void WriteDecompositionDump(std::ostream& out, const OneSparseDecomposition& decomposition);

}  // namespace cvgpr

#endif  // CVGPR_DILATION_HPP_
