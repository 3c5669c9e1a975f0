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

#ifndef CVGPR_ENCODING_HPP_
#define CVGPR_ENCODING_HPP_

#include <optional>

#include "cvgpr/hybrid_state.hpp"
#include "cvgpr/types.hpp"

namespace cvgpr {

inline constexpr double kDefaultScaleFactor = 1.01;

// Register names shared by the pipeline.
inline constexpr const char* kFlagRegister = "flag";
inline constexpr const char* kDataRegister = "data";
inline constexpr const char* kSwapRegister = "swap";
inline constexpr const char* kAncillaRegister = "ancilla";
inline constexpr const char* kIndexRegister = "index";

// |v> = Σ_i (v_i / (c sqrt N)) |i> + Σ_i (sqrt(1 - v_i² / c²) / sqrt N) |N + i>.
struct AmplitudeEncoding {
  CVector amplitudes;
  double scale = 1.0;
};

// 1.01 max|v_i|, or 1 for the zero vector.
double DefaultScale(const Vector& v);

AmplitudeEncoding EncodeVector(const Vector& v, std::optional<double> scale_override = std::nullopt);

// Pads with zeros up to the next power of two.
Vector PadToPowerOfTwo(const Vector& v);

RegisterLayout JointLayout(Index n_padded);

struct JointInput {
  BranchedHybridState state;
  AmplitudeEncoding y;
  AmplitudeEncoding k_star;
};

// (|y>|0> + |k*>|1>) / sqrt 2 ⊗ |Φ(xi)> on [flag, data]; both vectors are padded first.
JointInput BuildJointInput(const Vector& y, const Vector& k_star, double xi,
                           std::optional<double> y_scale = std::nullopt,
                           std::optional<double> k_scale = std::nullopt);

// Flag-controlled data operators on the [flag, data] layout.
CMatrix FlagNumberOperator(Index n_padded);
CMatrix ReadoutObservable(Index n_padded);  // (I + Z_data)/2 ⊗ X_flag

}  // namespace cvgpr

#endif  // CVGPR_ENCODING_HPP_
