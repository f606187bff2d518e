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

// Finite-shot measurement records of the ground-state population.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qchar/quantum_core.hpp"

namespace qchar {

/// Counts of |1> outcomes per sample time. Times are kept sorted and
/// unique; constructing from raw counts pools duplicate times.
class DataTrace {
 public:
  DataTrace() = default;

  /// Validates 0 <= successes <= shots, shots >= 1, finite times; sorts and pools.
  static DataTrace from_counts(std::vector<double> times, std::vector<std::int64_t> successes,
                               std::vector<std::int64_t> shots);

  std::size_t size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }
  std::span<const double> times() const noexcept { return times_; }
  std::span<const std::int64_t> successes() const noexcept { return successes_; }
  std::span<const std::int64_t> shots() const noexcept { return shots_; }

  double frequency(std::size_t n) const {
    return static_cast<double>(successes_[n]) / static_cast<double>(shots_[n]);
  }
  std::vector<double> frequencies() const;
  std::int64_t total_shots() const noexcept;

  friend bool operator==(const DataTrace&, const DataTrace&) = default;

 private:
  std::vector<double> times_;
  std::vector<std::int64_t> successes_;
  std::vector<std::int64_t> shots_;
};

enum class ScheduleKind { kLowDiscrepancy, kUniform, kExplicit, kHalfPeriod };

struct SamplingSchedule {
  ScheduleKind kind = ScheduleKind::kLowDiscrepancy;
  double t_min = 0.0;
  double t_max = 20.0;
  int count = 100;
  std::vector<double> explicit_times;  // kExplicit only
  double omega_est = 0.0;              // kHalfPeriod only
};

/// Base-2 radical inverse (van der Corput) of 1..count, scaled to [t_min, t_max).
std::vector<double> low_discrepancy_times(int count, double t_min, double t_max);

/// count evenly spaced points including both ends (count == 1 gives t_min).
std::vector<double> uniform_times(int count, double t_min, double t_max);

std::vector<double> schedule_times(const SamplingSchedule& schedule);

/// Binomial counts with success probability p11(t_n). Point n draws from a
/// generator keyed by (seed, n), so the result is independent of evaluation order.
DataTrace simulate_trace(const Hamiltonian3& h, std::span<const double> times, std::int64_t shots,
                         std::uint64_t seed);

DataTrace merge_traces(const DataTrace& a, const DataTrace& b);

}  // namespace qchar
