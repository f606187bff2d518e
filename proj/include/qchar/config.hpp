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

// Run configuration shared by the command-line tool: one JSON document can
// supply everything; command-line flags are applied on top.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qchar/adaptive.hpp"
#include "qchar/campaign.hpp"
#include "qchar/direct_mle.hpp"
#include "qchar/measurement.hpp"
#include "qchar/quantum_core.hpp"
#include "qchar/spectral_estimator.hpp"

namespace qchar {

struct RunConfig {
  CouplingParams truth = reference_hamiltonian();
  std::uint64_t seed = 1;
  int nt = 100;
  std::int64_t ne = 100;
  double t_min = 0.0;
  double t_max = 20.0;
  ScheduleKind schedule = ScheduleKind::kLowDiscrepancy;
  Pipeline pipeline = Pipeline::kTwoStep;
  std::vector<int> nt_list{25, 50, 100};
  std::vector<std::int64_t> ne_list{25, 100, 400};
  int repeats = 256;
  unsigned workers = 1;
  std::string out = ".";
  SpectralGridOptions grid;
  DirectFitOptions direct;
  AdaptiveConfig adaptive;
};

/// "a:b" with a < b.
std::pair<double, double> parse_range(const std::string& text);

ScheduleKind parse_schedule(const std::string& name);  // "low-discrepancy" | "uniform"
std::string to_string(ScheduleKind kind);
RefineStrategy parse_strategy(const std::string& name);  // "half-period" | "ensemble-variance"
std::string to_string(RefineStrategy s);

/// Overlays the keys present in `j` onto `base`. Unknown keys are rejected.
RunConfig apply_json(RunConfig base, const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const RunConfig& cfg);

CampaignConfig to_campaign_config(const RunConfig& cfg);
AdaptiveConfig to_adaptive_config(const RunConfig& cfg);

}  // namespace qchar
