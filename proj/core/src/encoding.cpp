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

#include "cvgpr/encoding.hpp"

#include <cmath>

#include <fmt/format.h>

#include "cvgpr/dilation.hpp"
#include "cvgpr/error.hpp"

namespace cvgpr {

double DefaultScale(const Vector& v) {
  const double m = v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
  return m == 0.0 ? 1.0 : kDefaultScaleFactor * m;
}

AmplitudeEncoding EncodeVector(const Vector& v, std::optional<double> scale_override) {
  if (v.size() == 0) throw InputError("cannot encode an empty vector");
  if (!v.allFinite()) throw InputError("cannot encode a non-finite vector");
  const double c = scale_override.value_or(DefaultScale(v));
  const double m = v.cwiseAbs().maxCoeff();
  if (!(c > m)) throw InputError(fmt::format("encoding scale {} must exceed max|v_i| = {}", c, m));
  const Index n = v.size();
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  AmplitudeEncoding out;
  out.scale = c;
  out.amplitudes.resize(2 * n);
  for (Index i = 0; i < n; ++i) {
    const double r = v(i) / c;
    out.amplitudes(i) = r * inv_sqrt_n;
    out.amplitudes(n + i) = std::sqrt(1.0 - r * r) * inv_sqrt_n;
  }
  return out;
}

Vector PadToPowerOfTwo(const Vector& v) {
  Vector out = Vector::Zero(NextPowerOfTwo(v.size()));
  out.head(v.size()) = v;
  return out;
}

RegisterLayout JointLayout(Index n_padded) {
  return RegisterLayout({{kFlagRegister, 2}, {kDataRegister, 2 * n_padded}});
}

JointInput BuildJointInput(const Vector& y, const Vector& k_star, double xi, std::optional<double> y_scale,
                           std::optional<double> k_scale) {
  if (y.size() != k_star.size()) {
    throw InputError(fmt::format("y has length {} but k* has length {}", y.size(), k_star.size()));
  }
  const Vector yp = PadToPowerOfTwo(y);
  const Vector kp = PadToPowerOfTwo(k_star);
  JointInput out;
  out.y = EncodeVector(yp, y_scale);
  out.k_star = EncodeVector(kp, k_scale);
  const Index d = out.y.amplitudes.size();
  CVector amps(2 * d);
  amps.head(d) = out.y.amplitudes / std::sqrt(2.0);
  amps.tail(d) = out.k_star.amplitudes / std::sqrt(2.0);
  out.state = BranchedHybridState::Product(JointLayout(yp.size()), amps, xi);
  return out;
}

CMatrix FlagNumberOperator(Index n_padded) {
  const Index d = 2 * n_padded;
  CMatrix n = CMatrix::Zero(2 * d, 2 * d);
  n.bottomRightCorner(d, d).setIdentity();
  return n;
}

CMatrix ReadoutObservable(Index n_padded) {
  const Index d = 2 * n_padded;
  CMatrix o = CMatrix::Zero(2 * d, 2 * d);
  for (Index i = 0; i < n_padded; ++i) {
    o(i, d + i) = 1.0;
    o(d + i, i) = 1.0;
  }
  return o;
}

}  // namespace cvgpr
