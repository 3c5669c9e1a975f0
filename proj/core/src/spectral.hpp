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

#ifndef CVGPR_SRC_SPECTRAL_HPP_
#define CVGPR_SRC_SPECTRAL_HPP_

#include <vector>

#include "cvgpr/types.hpp"

namespace cvgpr::internal {

struct Eigenspace {
  double eigenvalue;
  CMatrix projector;
};

// Throws InputError when ||A - A†||_max exceeds 1e-12.
void RequireHermitian(const CMatrix& A, const char* what);

// Spectral projectors of a Hermitian matrix, nearly equal eigenvalues grouped together.
std::vector<Eigenspace> Eigenspaces(const CMatrix& A);

}  // namespace cvgpr::internal

#endif  // CVGPR_SRC_SPECTRAL_HPP_
