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

#include "qchar/config.hpp"

#include <set>
#include <tuple>

#include "qchar/errors.hpp"
#include "qchar/io.hpp"

namespace qchar {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + " must be a JSON object", 0);
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ParseError("unknown key '" + key + "' in " + where, 0);
  }
}

template <class T>
void get_if(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

CouplingParams truth_from_json(const json& j) {
  if (j.contains("omega_cap") || j.contains("alpha") || j.contains("epsilon")) {
    reject_unknown(j, {"omega_cap", "alpha", "epsilon"}, "truth");
    return polar_to_couplings({j.at("omega_cap").get<double>(), j.at("alpha").get<double>(),
                               j.at("epsilon").get<double>()});
  }
  reject_unknown(j, {"d1", "d2", "d3", "delta"}, "truth");
  CouplingParams c;
  get_if(j, "d1", c.d1);
  get_if(j, "d2", c.d2);
  get_if(j, "d3", c.d3);
  get_if(j, "delta", c.delta);
  return c;
}

void axis_from_json(const json& j, AxisSpec& a, const std::string& where) {
  reject_unknown(j, {"lo", "hi", "count"}, where);
  get_if(j, "lo", a.lo);
  get_if(j, "hi", a.hi);
  get_if(j, "count", a.count);
}

json axis_to_json(const AxisSpec& a) { return {{"lo", a.lo}, {"hi", a.hi}, {"count", a.count}}; }

}  // namespace

std::pair<double, double> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InvalidParameter("range must look like a:b, got '" + text + "'");
  double a = 0.0, b = 0.0;
  try {
    std::size_t used = 0;
    a = std::stod(text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument("trailing");
    const std::string rest = text.substr(colon + 1);
    b = std::stod(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("trailing");
  } catch (const std::logic_error&) {
    throw InvalidParameter("range must look like a:b, got '" + text + "'");
  }
  if (!(b > a)) throw InvalidParameter("range end must exceed its start");
  return {a, b};
}

ScheduleKind parse_schedule(const std::string& name) {
  if (name == "low-discrepancy") return ScheduleKind::kLowDiscrepancy;
  if (name == "uniform") return ScheduleKind::kUniform;
  throw InvalidParameter("unknown schedule '" + name + "'");
}

std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::kLowDiscrepancy:
      return "low-discrepancy";
    case ScheduleKind::kUniform:
      return "uniform";
    case ScheduleKind::kExplicit:
      return "explicit";
    case ScheduleKind::kHalfPeriod:
      return "half-period";
  }
  return "unknown";
}

RefineStrategy parse_strategy(const std::string& name) {
  if (name == "half-period") return RefineStrategy::kHalfPeriod;
  if (name == "ensemble-variance") return RefineStrategy::kEnsembleVariance;
  throw InvalidParameter("unknown strategy '" + name + "'");
}

std::string to_string(RefineStrategy s) {
  return s == RefineStrategy::kHalfPeriod ? "half-period" : "ensemble-variance";
}

RunConfig apply_json(RunConfig cfg, const json& j) {
  reject_unknown(j,
                 {"truth", "seed", "nt", "ne", "range", "schedule", "pipeline", "nt_list", "ne_list", "repeats",
                  "workers", "out", "spectral", "direct", "adaptive"},
                 "config");
  try {
    if (j.contains("truth")) cfg.truth = truth_from_json(j.at("truth"));
    get_if(j, "seed", cfg.seed);
    get_if(j, "nt", cfg.nt);
    get_if(j, "ne", cfg.ne);
    if (j.contains("range")) std::tie(cfg.t_min, cfg.t_max) = parse_range(j.at("range").get<std::string>());
    if (j.contains("schedule")) cfg.schedule = parse_schedule(j.at("schedule").get<std::string>());
    if (j.contains("pipeline")) cfg.pipeline = parse_pipeline(j.at("pipeline").get<std::string>());
    get_if(j, "nt_list", cfg.nt_list);
    get_if(j, "ne_list", cfg.ne_list);
    get_if(j, "repeats", cfg.repeats);
    get_if(j, "workers", cfg.workers);
    get_if(j, "out", cfg.out);
    if (j.contains("spectral")) {
      const json& s = j.at("spectral");
      reject_unknown(s, {"omega_count", "delta_count", "omega_lo_factor", "omega_hi_factor", "delta_hi_factor",
                         "omega_center", "polish"},
                     "spectral");
      get_if(s, "omega_count", cfg.grid.omega_count);
      get_if(s, "delta_count", cfg.grid.delta_count);
      get_if(s, "omega_lo_factor", cfg.grid.omega_lo_factor);
      get_if(s, "omega_hi_factor", cfg.grid.omega_hi_factor);
      get_if(s, "delta_hi_factor", cfg.grid.delta_hi_factor);
      if (s.contains("omega_center")) cfg.grid.omega_center = s.at("omega_center").get<double>();
      get_if(s, "polish", cfg.grid.polish);
    }
    if (j.contains("direct")) {
      const json& d = j.at("direct");
      reject_unknown(d, {"omega_cap", "alpha", "epsilon", "starts", "initial_step", "x_tolerance", "max_evaluations"},
                     "direct");
      if (d.contains("omega_cap")) axis_from_json(d.at("omega_cap"), cfg.direct.grid.omega_cap, "direct.omega_cap");
      if (d.contains("alpha")) axis_from_json(d.at("alpha"), cfg.direct.grid.alpha, "direct.alpha");
      if (d.contains("epsilon")) axis_from_json(d.at("epsilon"), cfg.direct.grid.epsilon, "direct.epsilon");
      get_if(d, "starts", cfg.direct.starts);
      get_if(d, "initial_step", cfg.direct.refine.initial_step);
      get_if(d, "x_tolerance", cfg.direct.refine.x_tolerance);
      get_if(d, "max_evaluations", cfg.direct.refine.max_evaluations);
    }
    if (j.contains("adaptive")) {
      const json& a = j.at("adaptive");
      reject_unknown(a, {"rounds", "strategy", "refine_count", "refine_shots", "candidate_count", "ensemble_decades",
                         "ensemble_max_members", "sigma_delta_omega_target", "direct_mle"},
                     "adaptive");
      get_if(a, "rounds", cfg.adaptive.rounds);
      if (a.contains("strategy")) cfg.adaptive.strategy = parse_strategy(a.at("strategy").get<std::string>());
      get_if(a, "refine_count", cfg.adaptive.refine_count);
      get_if(a, "refine_shots", cfg.adaptive.refine_shots);
      get_if(a, "candidate_count", cfg.adaptive.candidate_count);
      get_if(a, "ensemble_decades", cfg.adaptive.ensemble.decades);
      get_if(a, "ensemble_max_members", cfg.adaptive.ensemble.max_members);
      if (a.contains("sigma_delta_omega_target")) {
        cfg.adaptive.sigma_delta_omega_target = a.at("sigma_delta_omega_target").get<double>();
      }
      get_if(a, "direct_mle", cfg.adaptive.direct_mle);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what(), 0);
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) { return apply_json(RunConfig{}, read_json(path)); }

json to_json(const RunConfig& cfg) {
  json spectral{{"omega_count", cfg.grid.omega_count},         {"delta_count", cfg.grid.delta_count},
                {"omega_lo_factor", cfg.grid.omega_lo_factor}, {"omega_hi_factor", cfg.grid.omega_hi_factor},
                {"delta_hi_factor", cfg.grid.delta_hi_factor}, {"polish", cfg.grid.polish}};
  if (cfg.grid.omega_center) spectral["omega_center"] = *cfg.grid.omega_center;
  json adaptive{{"rounds", cfg.adaptive.rounds},
                {"strategy", to_string(cfg.adaptive.strategy)},
                {"refine_count", cfg.adaptive.refine_count},
                {"refine_shots", cfg.adaptive.refine_shots},
                {"candidate_count", cfg.adaptive.candidate_count},
                {"ensemble_decades", cfg.adaptive.ensemble.decades},
                {"ensemble_max_members", cfg.adaptive.ensemble.max_members},
                {"direct_mle", cfg.adaptive.direct_mle}};
  if (cfg.adaptive.sigma_delta_omega_target) {
    adaptive["sigma_delta_omega_target"] = *cfg.adaptive.sigma_delta_omega_target;
  }
  return {{"truth", to_json(cfg.truth)},
          {"seed", cfg.seed},
          {"nt", cfg.nt},
          {"ne", cfg.ne},
          {"range", format_double(cfg.t_min) + ":" + format_double(cfg.t_max)},
          {"schedule", to_string(cfg.schedule)},
          {"pipeline", std::string(to_string(cfg.pipeline))},
          {"nt_list", cfg.nt_list},
          {"ne_list", cfg.ne_list},
          {"repeats", cfg.repeats},
          {"workers", cfg.workers},
          {"out", cfg.out},
          {"spectral", spectral},
          {"direct",
           {{"omega_cap", axis_to_json(cfg.direct.grid.omega_cap)},
            {"alpha", axis_to_json(cfg.direct.grid.alpha)},
            {"epsilon", axis_to_json(cfg.direct.grid.epsilon)},
            {"starts", cfg.direct.starts},
            {"initial_step", cfg.direct.refine.initial_step},
            {"x_tolerance", cfg.direct.refine.x_tolerance},
            {"max_evaluations", cfg.direct.refine.max_evaluations}}},
          {"adaptive", adaptive}};
}

CampaignConfig to_campaign_config(const RunConfig& cfg) {
  CampaignConfig c;
  c.truth = cfg.truth;
  c.schedule = cfg.schedule;
  c.t_min = cfg.t_min;
  c.t_max = cfg.t_max;
  c.nt_list = cfg.nt_list;
  c.ne_list = cfg.ne_list;
  c.repeats = cfg.repeats;
  c.seed = cfg.seed;
  c.pipeline = cfg.pipeline;
  c.workers = cfg.workers;
  c.grid = cfg.grid;
  c.direct = cfg.direct;
  c.adaptive = cfg.adaptive;
  return c;
}

AdaptiveConfig to_adaptive_config(const RunConfig& cfg) {
  AdaptiveConfig a = cfg.adaptive;
  a.t_min = cfg.t_min;
  a.t_max = cfg.t_max;
  a.preliminary_count = cfg.nt;
  a.preliminary_shots = cfg.ne;
  a.grid = cfg.grid;
  a.direct = cfg.direct;
  return a;
}

}  // namespace qchar
