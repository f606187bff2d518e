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

// Closed-form ground-state survival signal
//
//   p11(t) = a0 + a1 cos((ω-Δω)t) + a2 cos((ω+Δω)t) + a3 cos(2ωt)
//
// and the cosine design matrix used by the spectral estimator.

#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qchar/quantum_core.hpp"

namespace qchar {

/// Amplitudes pair with eigenvalue gaps in ascending order: a1 <-> λ2-λ1,
/// a2 <-> λ3-λ2, a3 <-> λ3-λ1. Fitted parameters may be unphysical
/// (negative amplitudes, Σa != 1); physicality is checked at reconstruction.
struct SignalParams {
  std::array<double, 4> a{};
  double omega = 0.0;
  double delta_omega = 0.0;
};

/// Basis-function samples, G(m, n) = g_m(t_n).
struct DesignMatrix {
  Eigen::MatrixXd g;
  std::vector<double> times;

  int basis_size() const { return static_cast<int>(g.rows()); }
  int sample_count() const { return static_cast<int>(g.cols()); }
};

/// Signal of the exact model. Δω keeps the sign produced by the eigenvalue
/// ordering so that the amplitude/gap pairing stays single-valued; use
/// canonicalize() for the Δω >= 0 convention. Throws UnsupportedModel if d3 != 0.
SignalParams signal_from_hamiltonian(const Hamiltonian3& h);
SignalParams signal_from_spectrum(const SpectralDecomposition& sd);

/// Maps Δω -> |Δω|, swapping a1 and a2 when the sign flips. The signal is unchanged.
SignalParams canonicalize(const SignalParams& sp);

double eval_signal(const SignalParams& sp, double t);

/// Rows (1, cos((ω-Δω)t), cos((ω+Δω)t), cos(2ωt)). Needs at least one time;
/// the estimator itself enforces Nt > 4.
DesignMatrix design_matrix(double omega, double delta_omega, std::span<const double> times);

/// Reduced single-frequency basis (1, cos(ωt), cos(2ωt)).
DesignMatrix single_frequency_design_matrix(double omega, std::span<const double> times);

}  // namespace qchar
