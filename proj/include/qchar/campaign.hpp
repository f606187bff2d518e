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

// Monte Carlo sweeps over (Nt, Ne): many seeded simulated experiments per
// cell, each run through one of the estimation pipelines, then aggregated.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "qchar/adaptive.hpp"
#include "qchar/direct_mle.hpp"
#include "qchar/measurement.hpp"
#include "qchar/quantum_core.hpp"
#include "qchar/spectral_estimator.hpp"

namespace qchar {

enum class Pipeline { kTwoStep, kDirect, kAdaptive };

std::string_view to_string(Pipeline p);
Pipeline parse_pipeline(std::string_view name);  // "two-step" | "direct" | "adaptive"

/// (Ω, α, ε) = (√3, acos(1/√3), 1/2), i.e. H with d1 = 1, d2 = √2, δ = 2.
CouplingParams reference_hamiltonian();

struct CampaignConfig {
  CouplingParams truth = reference_hamiltonian();
  ScheduleKind schedule = ScheduleKind::kLowDiscrepancy;  // kLowDiscrepancy or kUniform
  double t_min = 0.0;
  double t_max = 20.0;
  std::vector<int> nt_list{25, 50, 100};
  std::vector<std::int64_t> ne_list{25, 100, 400};
  int repeats = 256;
  std::uint64_t seed = 1;
  Pipeline pipeline = Pipeline::kTwoStep;
  unsigned workers = 1;
  SpectralGridOptions grid;
  DirectFitOptions direct;
  // Adaptive pipeline: preliminary count, shots and window come from the cell.
  AdaptiveConfig adaptive;
  // Called inside each run before the pipeline; throwing marks that run failed.
  std::function<void(std::size_t nt_index, std::size_t ne_index, int repeat)> fault_hook;
};

void validate(const CampaignConfig& cfg);

/// Seed of one run: mix of the master seed, cell indices and repeat index.
std::uint64_t run_seed(std::uint64_t master, std::size_t nt_index, std::size_t ne_index, int repeat);

struct RunRecord {
  std::size_t nt_index = 0;
  std::size_t ne_index = 0;
  int repeat = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  // Signal parameters of the final estimate (derived from the Hamiltonian for
  // the direct pipeline). NaN when the run failed.
  double omega = 0.0;
  double delta_omega = 0.0;
  std::array<double, 4> a{};
  bool physical = false;
  std::string unphysical_reason = "none";
  CouplingParams estimate;        // clamped when unphysical
  double relative_error = 0.0;    // NaN when unavailable
  double preliminary_error = 0.0; // adaptive only, NaN otherwise
  double two_step_error = 0.0;    // adaptive only: final spectral + reconstruction
};

struct CellSummary {
  int nt = 0;
  std::int64_t ne = 0;
  int runs = 0;
  int failures = 0;
  int unphysical = 0;
  double std_omega = 0.0;
  double std_delta_omega = 0.0;
  std::array<double, 4> std_a{};
  double median_relative_error = 0.0;  // over runs with a finite error, unphysical included
};

struct CampaignResult {
  std::vector<int> nt_list;
  std::vector<std::int64_t> ne_list;
  int repeats = 0;
  std::uint64_t seed = 0;
  Pipeline pipeline = Pipeline::kTwoStep;
  std::vector<CellSummary> cells;  // nt-major
  std::vector<RunRecord> runs;     // nt-major, then ne, then repeat

  const CellSummary& cell(std::size_t nt_index, std::size_t ne_index) const {
    return cells[nt_index * ne_list.size() + ne_index];
  }
};

/// One run, exactly as the campaign performs it.
RunRecord run_single(const CampaignConfig& cfg, std::size_t nt_index, std::size_t ne_index, int repeat);

CampaignResult run_campaign(const CampaignConfig& cfg);

/// Aggregates for one cell from its run records.
CellSummary summarize_cell(int nt, std::int64_t ne, std::span<const RunRecord> runs);

/// Sample standard deviation (n - 1); 0 for fewer than two values.
double sample_std(std::span<const double> v);

/// Median of the finite entries; NaN when there are none.
double median_finite(std::span<const double> v);

}  // namespace qchar
