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

// Direct likelihood over (Ω, α, ε) using the exact propagator.
//
// The noise level is marginalized, leaving
//   ln P(d | Ω, α, ε) = -(Nt/2) ln Σ_j (d_j - p11(t_j))²
// so the maximum coincides with the least-squares fit.
//
// p11(t) is exactly invariant under δ -> -δ (the spectrum flips sign, the
// ground-state overlaps do not change), so the sign of ε is not
// identifiable. Scans cover both signs; refined estimates are reported in
// the ε >= 0 gauge.

#pragma once

#include <array>
#include <cstddef>
#include <numbers>
#include <vector>

#include "qchar/measurement.hpp"
#include "qchar/quantum_core.hpp"

namespace qchar {

/// Keeps ln() finite for a perfect fit.
inline constexpr double kResidualFloor = 1e-300;

struct AxisSpec {
  double lo = 0.0;
  double hi = 1.0;
  int count = 1;

  std::vector<double> values() const;
};

struct Grid3Spec {
  AxisSpec omega_cap{0.1, 4.0, 32};
  AxisSpec alpha{0.0, std::numbers::pi / 2.0, 32};
  AxisSpec epsilon{-1.25, 1.25, 32};
};

struct Grid3 {
  std::vector<double> omega_cap_axis;
  std::vector<double> alpha_axis;
  std::vector<double> epsilon_axis;
  std::vector<double> values;  // Ω-major, then α, then ε
  std::array<std::size_t, 3> argmax{};

  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return (i * alpha_axis.size() + j) * epsilon_axis.size() + k;
  }
  double at(std::size_t i, std::size_t j, std::size_t k) const { return values[index(i, j, k)]; }
  PolarParams point(std::size_t i, std::size_t j, std::size_t k) const {
    return {omega_cap_axis[i], alpha_axis[j], epsilon_axis[k]};
  }
};

struct RefineOptions {
  std::array<double, 3> initial_step{0.05, 0.05, 0.05};
  double x_tolerance = 1e-6;
  int max_evaluations = 2000;
};

struct DirectEstimate {
  PolarParams polar;
  double log_likelihood = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

struct DirectFitOptions {
  Grid3Spec grid;
  int starts = 4;  // refine from this many of the best grid-local maxima
  RefineOptions refine;
};

struct DirectFit {
  Grid3 grid;
  DirectEstimate estimate;
};

double residual_sum_of_squares(const PolarParams& p, const DataTrace& d);

double direct_log_likelihood(const PolarParams& p, const DataTrace& d);

/// Exhaustive scan; argmax is the first maximum in (Ω, α, ε) index order.
Grid3 grid_scan3(const DataTrace& d, const Grid3Spec& spec);

/// Simplex maximization from `start` (folded to ε >= 0), clipped to Ω >= 0,
/// α in [0, π/2] and ε >= 0.
DirectEstimate refine_local(const DataTrace& d, const PolarParams& start, const RefineOptions& options = {});

/// grid_scan3 followed by refine_local from the strongest grid-local maxima;
/// the best refined point wins.
DirectFit estimate_direct(const DataTrace& d, const DirectFitOptions& options = {});

}  // namespace qchar
