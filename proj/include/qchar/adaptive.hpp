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

// Adaptive resampling loop:
//   1. preliminary low-discrepancy trace and likelihood surface,
//   2. uncertainty from the peak's curvature and height,
//   3. an ensemble of probable models from the surface,
//   4. new measurements where those models disagree (or at half periods),
//   5. repeat for a configured number of rounds.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qchar/direct_mle.hpp"
#include "qchar/measurement.hpp"
#include "qchar/reconstruct.hpp"
#include "qchar/signal_model.hpp"
#include "qchar/spectral_estimator.hpp"

namespace qchar {

struct UncertaintyMetrics {
  std::array<double, 2> curvature_eigenvalues{};  // of -∂²L, ascending
  double anisotropy = 0.0;                        // largest / smallest
  double margin = 0.0;                            // peak height over surface median (decades)
  double sigma_omega = 0.0;                       // from the inverse curvature of ln L
  double sigma_delta_omega = 0.0;
  bool flat = false;  // no usable curvature; sigmas and anisotropy are +inf
};

UncertaintyMetrics uncertainty_from_estimate(const Estimate& est);
UncertaintyMetrics uncertainty_from_surface(const LikelihoodSurface& s);

struct EnsembleMember {
  SignalParams model;
  double log_likelihood = 0.0;
  double weight = 0.0;
};

/// Weights ∝ 10^(L - L_max), normalized; members sorted by weight, descending.
struct ModelEnsemble {
  std::vector<EnsembleMember> members;
};

ModelEnsemble make_ensemble(std::span<const SignalParams> models, std::span<const double> log_likelihoods);

struct EnsembleOptions {
  double decades = 2.0;         // keep cells within this many decades of the peak
  std::size_t max_members = 256;
};

/// Cells of the surface close to the peak, with amplitudes fitted per cell.
ModelEnsemble ensemble_from_surface(const LikelihoodSurface& s, const DataTrace& d,
                                    const EnsembleOptions& options = {});

struct TimeSelection {
  std::vector<double> times;      // chosen, by variance descending (ties: earlier time)
  std::vector<double> variances;  // matching `times`
  bool degenerate = false;        // single member or zero variance everywhere
  bool truncated = false;         // fewer candidates than requested
};

/// Weighted variance of the members' predicted p11(t) at each candidate; the
/// k largest are returned.
TimeSelection ensemble_variance_times(const ModelEnsemble& ensemble, std::span<const double> candidates,
                                      std::size_t k);

/// { j π / ω : j = j0 .. j0 + count - 1 }, j0 = ceil(t_start ω / π).
std::vector<double> halfperiod_times(double omega_est, int count, double t_start);

/// Acquires a trace at the given times and shots. `stream` distinguishes
/// acquisitions (0 = preliminary, r = refinement round r).
using MeasurementSource =
    std::function<DataTrace(std::span<const double> times, std::int64_t shots, std::uint64_t stream)>;

MeasurementSource simulated_source(const Hamiltonian3& h, std::uint64_t seed);

enum class RefineStrategy { kHalfPeriod, kEnsembleVariance };

struct AdaptiveConfig {
  double t_min = 0.0;
  double t_max = 20.0;
  int preliminary_count = 100;
  std::int64_t preliminary_shots = 100;
  int rounds = 1;
  RefineStrategy strategy = RefineStrategy::kHalfPeriod;
  // Points per round. 0 means: every positive half-period multiple in the
  // window (half-period) or 16 (ensemble variance).
  int refine_count = 0;
  std::int64_t refine_shots = 1000;
  int candidate_count = 401;  // ensemble strategy: uniform candidates over the window
  EnsembleOptions ensemble;
  std::optional<double> sigma_delta_omega_target;  // stop early once reached
  SpectralGridOptions grid;
  bool direct_mle = true;
  DirectFitOptions direct;
  bool keep_surfaces = false;  // store each round's likelihood surface in the report
};

struct RoundRecord {
  int round = 0;  // 0 = preliminary
  std::optional<Estimate> estimate;
  std::optional<UncertaintyMetrics> uncertainty;
  std::optional<LikelihoodSurface> surface;  // only with keep_surfaces
  std::vector<double> chosen_times;
  std::int64_t round_shots = 0;
  std::size_t cumulative_points = 0;
  std::int64_t cumulative_shots = 0;
  std::string error;  // empty when the round's estimate succeeded
};

struct AdaptiveReport {
  std::vector<RoundRecord> rounds;
  DataTrace final_trace;
  std::optional<Estimate> preliminary_estimate;
  std::optional<Estimate> final_estimate;
  std::optional<ReconstructionResult> preliminary_reconstruction;
  std::optional<ReconstructionResult> final_reconstruction;
  std::optional<DirectEstimate> final_direct;
  std::string stop_reason;

  // Filled when the true Hamiltonian is supplied (detuning-folded comparison).
  std::optional<CouplingParams> truth;
  std::optional<double> preliminary_error;
  std::optional<double> final_two_step_error;
  std::optional<double> final_direct_error;
};

AdaptiveReport adaptive_characterize(const MeasurementSource& source, const AdaptiveConfig& config,
                                     std::optional<CouplingParams> truth = std::nullopt);

}  // namespace qchar
