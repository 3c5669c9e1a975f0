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

#include "cvgpr/dilation.hpp"

#include <cmath>
#include <cstdlib>
#include <ostream>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "cvgpr/error.hpp"

namespace cvgpr {

Index NextPowerOfTwo(Index n) {
  Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

DilatedMatrix EmbedKhat(const Matrix& K) {
  if (K.rows() != K.cols()) throw InputError(fmt::format("K must be square, got {}x{}", K.rows(), K.cols()));
  if (K.rows() == 0) throw InputError("K must be nonempty");
  DilatedMatrix out;
  out.n_original = K.rows();
  out.n_padded = NextPowerOfTwo(K.rows());
  const Index n = out.n_padded;
  out.khat = Matrix::Identity(2 * n, 2 * n);
  out.khat.topLeftCorner(K.rows(), K.cols()) = K;
  return out;
}

double MaxElementNorm(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

double OperatorNorm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

template <typename T>
void OneSparseMatrix<T>::Set(Index row, Index col, T value) {
  if (row < 0 || row >= dim_ || col < 0 || col >= dim_) {
    throw InputError(fmt::format("entry ({}, {}) outside dimension {}", row, col, dim_));
  }
  if (value == T{0}) {
    rows_.erase(row);
    return;
  }
  rows_[row] = {col, value};
}

template <typename T>
T OneSparseMatrix<T>::At(Index row, Index col) const {
  auto it = rows_.find(row);
  if (it == rows_.end() || it->second.first != col) return T{0};
  return it->second.second;
}

template <typename T>
T OneSparseMatrix<T>::MaxAbs() const {
  T best{0};
  for (const auto& [row, entry] : rows_) {
    const T a = entry.second < T{0} ? -entry.second : entry.second;
    if (a > best) best = a;
  }
  return best;
}

template <typename T>
bool OneSparseMatrix<T>::IsSymmetric() const {
  for (const auto& [row, entry] : rows_) {
    if (At(entry.first, row) != entry.second) return false;
  }
  return true;
}

template <typename T>
Matrix OneSparseMatrix<T>::Dense() const {
  Matrix m = Matrix::Zero(dim_, dim_);
  for (const auto& [row, entry] : rows_) m(row, entry.first) = static_cast<double>(entry.second);
  return m;
}

template class OneSparseMatrix<double>;
template class OneSparseMatrix<std::int64_t>;

SparseHermitian HermitianDilation(const DilatedMatrix& khat) {
  const Index d = khat.dim();
  SparseHermitian H(d * d);
  for (Index x = 0; x < d; ++x) {
    for (Index y = 0; y < d; ++y) {
      H.Set(x * d + y, y * d + x, khat.khat(x, y));
    }
  }
  return H;
}

QuantizedMatrix Quantize(const SparseHermitian& H, double zeta, std::int64_t cap) {
  if (!(zeta > 0.0) || !std::isfinite(zeta)) throw InputError(fmt::format("zeta must be positive, got {}", zeta));
  QuantizedMatrix out(H.dim());
  for (const auto& [row, entry] : H.rows()) {
    const double q = std::floor(entry.second / (2.0 * zeta));
    if (!(std::abs(q) * 2.0 <= static_cast<double>(cap))) {
      throw QuantizationOverflowError(
          fmt::format("quantized entry {:.6g} exceeds cap {} (zeta={:.6g})", 2.0 * q, cap, zeta));
    }
    out.Set(row, entry.first, 2 * static_cast<std::int64_t>(q));
  }
  return out;
}

bool OneSparseReflection::IsSymmetric() const {
  for (Index r = 0; r < dim(); ++r) {
    const Entry& e = entry(r);
    if (e.col < 0 || e.col >= dim()) return false;
    const Entry& back = entry(e.col);
    if (back.col != r || back.sign != e.sign) return false;
  }
  return true;
}

bool OneSparseReflection::SquaresToIdentity() const {
  for (Index r = 0; r < dim(); ++r) {
    const Entry& e = entry(r);
    if (e.sign != 1 && e.sign != -1) return false;
    if (e.col < 0 || e.col >= dim()) return false;
    const Entry& next = entry(e.col);
    if (next.col != r || e.sign * next.sign != 1) return false;
  }
  return true;
}

Matrix OneSparseReflection::Dense() const {
  Matrix m = Matrix::Zero(dim(), dim());
  for (Index r = 0; r < dim(); ++r) m(r, entry(r).col) = entry(r).sign;
  return m;
}

CVector OneSparseReflection::Apply(const CVector& v) const {
  CVector out(dim());
  for (Index r = 0; r < dim(); ++r) out(r) = static_cast<double>(entry(r).sign) * v(entry(r).col);
  return out;
}

Matrix OneSparseDecomposition::ReconstructDense() const {
  Matrix sum = Matrix::Zero(htilde.dim(), htilde.dim());
  for (const auto& term : terms) {
    for (Index r = 0; r < term.dim(); ++r) sum(r, term.entry(r).col) += term.entry(r).sign;
  }
  return sum;
}

std::vector<OneSparseReflection> DecomposeOneSparse(const QuantizedMatrix& htilde) {
  if (!htilde.IsSymmetric()) throw InputError("quantized matrix is not symmetric");
  for (const auto& [row, entry] : htilde.rows()) {
    if (entry.second % 2 != 0) throw InputError(fmt::format("entry at row {} is odd ({})", row, entry.second));
  }
  const std::int64_t j_max = htilde.MaxAbs() / 2;
  std::vector<OneSparseReflection> terms;
  terms.reserve(static_cast<std::size_t>(2 * j_max));
  for (std::int64_t j = 1; j <= j_max; ++j) {
    std::vector<OneSparseReflection::Entry> plus(static_cast<std::size_t>(htilde.dim()));
    std::vector<OneSparseReflection::Entry> minus(plus.size());
    for (Index r = 0; r < htilde.dim(); ++r) {
      plus[static_cast<std::size_t>(r)] = {r, +1};
      minus[static_cast<std::size_t>(r)] = {r, -1};
    }
    for (const auto& [row, entry] : htilde.rows()) {
      const std::int64_t m = entry.second;
      if (std::llabs(m) >= 2 * j) {
        const int s = m > 0 ? 1 : -1;
        plus[static_cast<std::size_t>(row)] = {entry.first, s};
        minus[static_cast<std::size_t>(row)] = {entry.first, s};
      }
    }
    terms.emplace_back(std::move(plus));
    terms.emplace_back(std::move(minus));
  }
  return terms;
}

OneSparseDecomposition BuildDecomposition(const DilatedMatrix& khat, double zeta, std::int64_t cap) {
  OneSparseDecomposition out;
  out.zeta = zeta;
  out.htilde = Quantize(HermitianDilation(khat), zeta, cap);
  out.terms = DecomposeOneSparse(out.htilde);
  out.j_max = out.htilde.MaxAbs() / 2;
  return out;
}

OracleQ::OracleQ(std::vector<OneSparseReflection> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw InputError("oracle needs at least one term");
  const Index dim = terms_.front().dim();
  for (std::size_t j = 0; j < terms_.size(); ++j) {
    if (terms_[j].dim() != dim) throw InvalidDecompositionError(fmt::format("term {} has mismatched dimension", j));
    if (!terms_[j].SquaresToIdentity() || !terms_[j].IsSymmetric()) {
      throw InvalidDecompositionError(fmt::format("term {} is not a symmetric reflection", j));
    }
  }
}

Matrix OracleQ::Dense() const {
  const Index t = target_dim();
  Matrix q = Matrix::Zero(index_dim() * t, index_dim() * t);
  for (Index j = 0; j < index_dim(); ++j) q.block(j * t, j * t, t, t) = terms_[static_cast<std::size_t>(j)].Dense();
  return q;
}

void WriteDecompositionDump(std::ostream& out, const OneSparseDecomposition& decomposition) {
  fmt::print(out, "# zeta={:.17g} jMax={} terms={} dim={}\n", decomposition.zeta, decomposition.j_max,
             decomposition.terms.size(), decomposition.htilde.dim());
  for (std::size_t j = 0; j < decomposition.terms.size(); ++j) {
    const auto& term = decomposition.terms[j];
    for (Index r = 0; r < term.dim(); ++r) {
      fmt::print(out, "{} {:+d} {} {}\n", j + 1, term.entry(r).sign, r, term.entry(r).col);
    }
  }
}

}  // namespace cvgpr
