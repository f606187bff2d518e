// Copyright 2026 The qchar Authors
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

#include "qchar/signal_model.hpp"

#include <cmath>
#include <utility>

#include "qchar/errors.hpp"

namespace qchar {

SignalParams signal_from_spectrum(const SpectralDecomposition& sd) {
  const auto& c = sd.overlaps;
  const BohrFrequencies bf = bohr_frequencies(sd);
  SignalParams sp;
  sp.a = {c[0] * c[0] + c[1] * c[1] + c[2] * c[2], 2.0 * c[0] * c[1], 2.0 * c[1] * c[2],
          2.0 * c[0] * c[2]};
  sp.omega = bf.omega;
  sp.delta_omega = bf.delta_omega;
  return sp;
}

SignalParams signal_from_hamiltonian(const Hamiltonian3& h) {
  if (h(0, 2) != 0.0) {
    throw UnsupportedModel("four-line signal model requires d3 == 0");
  }
  return signal_from_spectrum(spectral_decompose(h));
}

SignalParams canonicalize(const SignalParams& sp) {
  SignalParams out = sp;
  if (sp.delta_omega < 0.0) {
    out.delta_omega = -sp.delta_omega;
    std::swap(out.a[1], out.a[2]);
  }
  return out;
}

double eval_signal(const SignalParams& sp, double t) {
  return sp.a[0] + sp.a[1] * std::cos((sp.omega - sp.delta_omega) * t) +
         sp.a[2] * std::cos((sp.omega + sp.delta_omega) * t) + sp.a[3] * std::cos(2.0 * sp.omega * t);
}

DesignMatrix design_matrix(double omega, double delta_omega, std::span<const double> times) {
  if (times.empty()) throw InvalidParameter("design matrix needs at least one sample time");
  DesignMatrix dm;
  dm.times.assign(times.begin(), times.end());
  dm.g.resize(4, static_cast<Eigen::Index>(times.size()));
  for (std::size_t n = 0; n < times.size(); ++n) {
    const double t = times[n];
    const auto col = static_cast<Eigen::Index>(n);
    dm.g(0, col) = 1.0;
    dm.g(1, col) = std::cos((omega - delta_omega) * t);
    dm.g(2, col) = std::cos((omega + delta_omega) * t);
    dm.g(3, col) = std::cos(2.0 * omega * t);
  }
  return dm;
}

DesignMatrix single_frequency_design_matrix(double omega, std::span<const double> times) {
  if (times.empty()) throw InvalidParameter("design matrix needs at least one sample time");
  DesignMatrix dm;
  dm.times.assign(times.begin(), times.end());
  dm.g.resize(3, static_cast<Eigen::Index>(times.size()));
  for (std::size_t n = 0; n < times.size(); ++n) {
    const double t = times[n];
    const auto col = static_cast<Eigen::Index>(n);
    dm.g(0, col) = 1.0;
    dm.g(1, col) = std::cos(omega * t);
    dm.g(2, col) = std::cos(2.0 * omega * t);
  }
  return dm;
}

}  // namespace qchar
