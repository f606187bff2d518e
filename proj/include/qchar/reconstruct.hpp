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

// Inversion of fitted signal parameters into a d3 = 0 Hamiltonian.
//
// The amplitudes fix the ground-state overlaps (a1 = 2c1c2, a2 = 2c2c3,
// a3 = 2c1c3), the line positions fix the eigenvalue gaps, and the
// structural zero H(1,1) = Σ c_k λ_k = 0 fixes the global offset. The
// remaining entries follow from (H²)(1,1) = d1² and the second invariant
// of the characteristic polynomial, -(d1² + d2²).

#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "qchar/quantum_core.hpp"
#include "qchar/signal_model.hpp"
#include "qchar/spectral_estimator.hpp"

namespace qchar {

/// Radicands in [-tol, 0) are clamped to zero; below -tol the fit is unphysical.
inline constexpr double kRadicandTolerance = 1e-9;

enum class Validity { kPhysical, kUnphysical };
enum class UnphysicalReason { kNone, kMissingLine, kNegativeRadicand };

std::string_view to_string(UnphysicalReason reason);

struct OverlapFit {
  std::array<double, 3> c{};  // normalized to Σc = 1
  double residual = 0.0;      // |a0 - Σc²| + |1 - Σc before normalization|
  UnphysicalReason failure = UnphysicalReason::kNone;
};

struct ReconstructionResult {
  std::optional<CouplingParams> hamiltonian;  // present only when physical
  // Same construction with every negative radicand clamped to zero. Kept for
  // error statistics of failed fits; never a substitute for `hamiltonian`.
  std::optional<CouplingParams> clamped;
  std::array<double, 3> overlaps{};
  std::array<double, 3> eigenvalues{};
  double residual = 0.0;
  Validity validity = Validity::kUnphysical;
  UnphysicalReason reason = UnphysicalReason::kNone;

  bool physical() const noexcept { return validity == Validity::kPhysical; }
};

OverlapFit amplitudes_to_overlaps(const SignalParams& sp);

ReconstructionResult reconstruct_hamiltonian(const SignalParams& sp);
ReconstructionResult reconstruct_hamiltonian(const Estimate& est);

/// ‖H_est - H_true‖_F / ‖H_true‖_F over the full 3x3 matrices. Throws
/// InvalidParameter when H_true is zero.
double relative_error(const CouplingParams& estimate, const CouplingParams& truth);

}  // namespace qchar
