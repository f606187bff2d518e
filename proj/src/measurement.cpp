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

#include "qchar/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "qchar/errors.hpp"
#include "qchar/seed.hpp"
#include "qchar/signal_model.hpp"

namespace qchar {

DataTrace DataTrace::from_counts(std::vector<double> times, std::vector<std::int64_t> successes,
                                 std::vector<std::int64_t> shots) {
  if (times.size() != successes.size() || times.size() != shots.size()) {
    throw InvalidParameter("trace columns must have equal length");
  }
  for (std::size_t n = 0; n < times.size(); ++n) {
    if (!std::isfinite(times[n])) throw InvalidParameter("sample times must be finite");
    if (shots[n] < 1) throw InvalidParameter("shots must be positive");
    if (successes[n] < 0 || successes[n] > shots[n]) {
      throw InvalidParameter("successes must lie in [0, shots]");
    }
  }
  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return times[a] < times[b]; });

  DataTrace out;
  for (std::size_t idx : order) {
    if (!out.times_.empty() && out.times_.back() == times[idx]) {
      out.successes_.back() += successes[idx];
      out.shots_.back() += shots[idx];
    } else {
      out.times_.push_back(times[idx]);
      out.successes_.push_back(successes[idx]);
      out.shots_.push_back(shots[idx]);
    }
  }
  return out;
}

std::vector<double> DataTrace::frequencies() const {
  std::vector<double> d(size());
  for (std::size_t n = 0; n < size(); ++n) d[n] = frequency(n);
  return d;
}

std::int64_t DataTrace::total_shots() const noexcept {
  return std::accumulate(shots_.begin(), shots_.end(), std::int64_t{0});
}

namespace {

void check_range(double t_min, double t_max) {
  if (!(t_min >= 0.0) || !(t_max > t_min) || !std::isfinite(t_max)) {
    throw InvalidParameter("sampling range must satisfy 0 <= t_min < t_max");
  }
}

double radical_inverse_base2(std::uint64_t i) {
  double x = 0.0;
  double scale = 0.5;
  while (i != 0) {
    if (i & 1U) x += scale;
    scale *= 0.5;
    i >>= 1U;
  }
  return x;
}

}  // namespace

std::vector<double> low_discrepancy_times(int count, double t_min, double t_max) {
  check_range(t_min, t_max);
  if (count < 1) throw InvalidParameter("sample count must be at least 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] =
        t_min + (t_max - t_min) * radical_inverse_base2(static_cast<std::uint64_t>(i) + 1);
  }
  return out;
}

std::vector<double> uniform_times(int count, double t_min, double t_max) {
  check_range(t_min, t_max);
  if (count < 1) throw InvalidParameter("sample count must be at least 1");
  std::vector<double> out(static_cast<std::size_t>(count), t_min);
  if (count == 1) return out;
  const double step = (t_max - t_min) / (count - 1);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = t_min + step * i;
  out.back() = t_max;
  return out;
}

std::vector<double> schedule_times(const SamplingSchedule& s) {
  switch (s.kind) {
    case ScheduleKind::kLowDiscrepancy:
      return low_discrepancy_times(s.count, s.t_min, s.t_max);
    case ScheduleKind::kUniform:
      return uniform_times(s.count, s.t_min, s.t_max);
    case ScheduleKind::kExplicit:
      return s.explicit_times;
    case ScheduleKind::kHalfPeriod: {
      check_range(s.t_min, s.t_max);
      if (!(s.omega_est > 0.0)) throw InvalidParameter("half-period schedule needs omega_est > 0");
      const double half = std::acos(-1.0) / s.omega_est;
      std::vector<double> out;
      for (auto j = static_cast<long>(std::ceil(s.t_min / half));
           static_cast<int>(out.size()) < s.count; ++j) {
        const double t = half * static_cast<double>(j);
        if (t > s.t_max) break;
        out.push_back(t);
      }
      return out;
    }
  }
  return {};
}

DataTrace simulate_trace(const Hamiltonian3& h, std::span<const double> times, std::int64_t shots,
                         std::uint64_t seed) {
  if (shots < 1) throw InvalidParameter("shots per point must be positive");
  const SpectralDecomposition sd = spectral_decompose(h);
  std::vector<std::int64_t> successes(times.size());
  for (std::size_t n = 0; n < times.size(); ++n) {
    const double p = ground_population(sd, times[n]);
    std::mt19937_64 rng(derive_seed(seed, {n}));
    std::binomial_distribution<std::int64_t> draw(shots, p);
    successes[n] = draw(rng);
  }
  return DataTrace::from_counts(std::vector<double>(times.begin(), times.end()), std::move(successes),
                                std::vector<std::int64_t>(times.size(), shots));
}

DataTrace merge_traces(const DataTrace& a, const DataTrace& b) {
  std::vector<double> t(a.times().begin(), a.times().end());
  std::vector<std::int64_t> s(a.successes().begin(), a.successes().end());
  std::vector<std::int64_t> n(a.shots().begin(), a.shots().end());
  t.insert(t.end(), b.times().begin(), b.times().end());
  s.insert(s.end(), b.successes().begin(), b.successes().end());
  n.insert(n.end(), b.shots().begin(), b.shots().end());
  return DataTrace::from_counts(std::move(t), std::move(s), std::move(n));
}

}  // namespace qchar
