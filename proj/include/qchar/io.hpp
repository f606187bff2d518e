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

// CSV and JSON persistence. Doubles are written with 17 significant digits so
// every file re-loads bit-exactly; NaN is written as "nan" in CSV and null in JSON.

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "qchar/adaptive.hpp"
#include "qchar/campaign.hpp"
#include "qchar/direct_mle.hpp"
#include "qchar/measurement.hpp"
#include "qchar/reconstruct.hpp"
#include "qchar/spectral_estimator.hpp"

namespace qchar {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kTraceHeader = "t,successes,shots";
inline constexpr const char* kSurfaceHeader = "omega,delta_omega,loglik";
inline constexpr const char* kGridHeader = "omega_cap,alpha,epsilon,loglik";
inline constexpr const char* kPeriodogramHeader = "omega,power";
inline constexpr const char* kCellsHeader =
    "nt,ne,runs,failures,unphysical,std_omega,std_delta_omega,std_a0,std_a1,std_a2,std_a3,median_relative_error";
inline constexpr const char* kRunsHeader =
    "nt,ne,repeat,seed,ok,physical,reason,omega,delta_omega,relative_error,preliminary_error,two_step_error";

/// Shortest text that still round-trips (printf %.17g).
std::string format_double(double x);

void save_trace(const DataTrace& d, const std::filesystem::path& path);
DataTrace load_trace(const std::filesystem::path& path);
std::string trace_to_csv(const DataTrace& d);
DataTrace trace_from_csv(const std::string& text);

void save_surface(const LikelihoodSurface& s, const std::filesystem::path& path);
LikelihoodSurface load_surface(const std::filesystem::path& path);
std::string surface_to_csv(const LikelihoodSurface& s);
LikelihoodSurface surface_from_csv(const std::string& text);

void save_grid3(const Grid3& g, const std::filesystem::path& path);
void save_periodogram(std::span<const double> freqs, std::span<const double> power,
                      const std::filesystem::path& path);

std::string campaign_cells_csv(const CampaignResult& r);
std::string campaign_runs_csv(const CampaignResult& r);

nlohmann::json to_json(const CouplingParams& c);
nlohmann::json to_json(const PolarParams& p);
nlohmann::json to_json(const Estimate& e);
nlohmann::json to_json(const UncertaintyMetrics& u);
nlohmann::json to_json(const DirectEstimate& e);
nlohmann::json to_json(const RoundRecord& r);
nlohmann::json to_json(const AdaptiveReport& r);
nlohmann::json to_json(const CampaignResult& r);
/// {d1, d2, delta, valid, residual, relative_error?}; unphysical results report
/// the clamped Hamiltonian with valid = false.
nlohmann::json reconstruction_json(const ReconstructionResult& r, const std::optional<CouplingParams>& truth);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace qchar
