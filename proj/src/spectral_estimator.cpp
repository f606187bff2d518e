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

#include "qchar/spectral_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "qchar/errors.hpp"
#include "qchar/nelder_mead.hpp"

namespace qchar {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

LogLikelihood loglik_from_ratio(double sum_h2, double sum_d2, int basis_size, int nt) {
  if (sum_d2 <= 0.0) return {0.0, false};
  double arg = 1.0 - sum_h2 / sum_d2;
  bool saturated = false;
  if (!(arg > kSaturationFloor)) {
    arg = kSaturationFloor;
    saturated = true;
  }
  return {0.5 * (basis_size - nt) * std::log10(arg), saturated};
}

void check_axis(std::span<const double> axis, const char* name) {
  if (axis.empty()) throw InvalidParameter(std::string(name) + " axis is empty");
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (!std::isfinite(axis[i])) throw InvalidParameter(std::string(name) + " axis must be finite");
    if (i > 0 && !(axis[i] > axis[i - 1])) {
      throw InvalidParameter(std::string(name) + " axis must be strictly increasing");
    }
  }
}

double median_of(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

}  // namespace

OrthoProjection orthonormal_projection(const DesignMatrix& g, std::span<const double> values) {
  const int mb = g.basis_size();
  const int nt = g.sample_count();
  if (nt != static_cast<int>(values.size())) {
    throw InvalidParameter("design matrix and data have different sample counts");
  }
  if (nt <= mb) {
    throw InvalidParameter("need more samples (" + std::to_string(nt) + ") than basis functions (" +
                           std::to_string(mb) + ")");
  }
  const Eigen::Map<const Eigen::VectorXd> data(values.data(), nt);

  const Eigen::MatrixXd gram = g.g * g.g.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  const Eigen::VectorXd& alpha = solver.eigenvalues();
  const double cond = alpha(0) / alpha(mb - 1);
  if (!(cond >= kDegeneracyThreshold)) {
    throw DegenerateBasis("basis functions are numerically dependent (eigenvalue ratio " +
                          std::to_string(cond) + "); use the reduced single-frequency model");
  }

  OrthoProjection p;
  p.basis_size = mb;
  p.sample_count = nt;
  p.basis_eigenvalues = alpha;
  p.condition = cond;
  p.v = alpha.cwiseSqrt().cwiseInverse().asDiagonal() * solver.eigenvectors().transpose();
  p.h = (p.v * g.g) * data;
  p.a = p.v.transpose() * p.h;
  p.mean_h2 = p.h.squaredNorm() / mb;
  p.mean_d2 = data.squaredNorm() / nt;
  return p;
}

OrthoProjection orthonormal_projection(const DesignMatrix& g, const DataTrace& d) {
  const auto dv = d.frequencies();
  return orthonormal_projection(g, std::span<const double>(dv));
}

LogLikelihood bretthorst_log_likelihood(const OrthoProjection& p) {
  return loglik_from_ratio(p.mean_h2 * p.basis_size, p.mean_d2 * p.sample_count, p.basis_size,
                           p.sample_count);
}

LogLikelihood log_likelihood(double omega, double delta_omega, const DataTrace& d) {
  return bretthorst_log_likelihood(
      orthonormal_projection(design_matrix(omega, delta_omega, d.times()), d));
}

LogLikelihood single_frequency_log_likelihood(double omega, const DataTrace& d) {
  return bretthorst_log_likelihood(
      orthonormal_projection(single_frequency_design_matrix(omega, d.times()), d));
}

std::vector<double> linear_axis(double lo, double hi, int count) {
  if (count < 1) throw InvalidParameter("axis needs at least one point");
  if (count == 1) return {lo};
  if (!(hi > lo)) throw InvalidParameter("axis upper bound must exceed lower bound");
  std::vector<double> axis(static_cast<std::size_t>(count));
  const double step = (hi - lo) / (count - 1);
  for (int i = 0; i < count; ++i) axis[static_cast<std::size_t>(i)] = lo + step * i;
  axis.back() = hi;
  return axis;
}

LikelihoodSurface likelihood_surface(const DataTrace& d, std::span<const double> omega_axis,
                                     std::span<const double> delta_axis) {
  check_axis(omega_axis, "omega");
  check_axis(delta_axis, "delta_omega");
  const std::size_t nt = d.size();
  if (nt <= 4) throw InvalidParameter("need more than 4 samples for the four-line model");

  const auto t = d.times();
  const auto dv = d.frequencies();
  double sum_d2 = 0.0;
  for (double x : dv) sum_d2 += x * x;

  // cos((ω∓Δω)t) via angle addition, so cells need no trig calls.
  const std::size_t nd = delta_axis.size();
  std::vector<double> cos_dw(nd * nt);
  std::vector<double> sin_dw(nd * nt);
  for (std::size_t j = 0; j < nd; ++j) {
    for (std::size_t n = 0; n < nt; ++n) {
      cos_dw[j * nt + n] = std::cos(delta_axis[j] * t[n]);
      sin_dw[j * nt + n] = std::sin(delta_axis[j] * t[n]);
    }
  }

  LikelihoodSurface s;
  s.omega_axis.assign(omega_axis.begin(), omega_axis.end());
  s.delta_axis.assign(delta_axis.begin(), delta_axis.end());
  s.values.assign(omega_axis.size() * nd, kNaN);

  std::vector<double> cw(nt), sw(nt), c2w(nt);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver;
  for (std::size_t i = 0; i < omega_axis.size(); ++i) {
    for (std::size_t n = 0; n < nt; ++n) {
      cw[n] = std::cos(omega_axis[i] * t[n]);
      sw[n] = std::sin(omega_axis[i] * t[n]);
      c2w[n] = std::cos(2.0 * omega_axis[i] * t[n]);
    }
    for (std::size_t j = 0; j < nd; ++j) {
      Eigen::Matrix4d gram = Eigen::Matrix4d::Zero();
      Eigen::Vector4d gd = Eigen::Vector4d::Zero();
      const double* cd = &cos_dw[j * nt];
      const double* sd = &sin_dw[j * nt];
      for (std::size_t n = 0; n < nt; ++n) {
        const Eigen::Vector4d col(1.0, cw[n] * cd[n] + sw[n] * sd[n], cw[n] * cd[n] - sw[n] * sd[n],
                                  c2w[n]);
        gram.selfadjointView<Eigen::Lower>().rankUpdate(col);
        gd += dv[n] * col;
      }
      solver.compute(gram);
      const Eigen::Vector4d& alpha = solver.eigenvalues();
      if (!(alpha(0) / alpha(3) >= kDegeneracyThreshold)) continue;
      const Eigen::Vector4d proj = solver.eigenvectors().transpose() * gd;
      const double sum_h2 = (proj.array().square() / alpha.array()).sum();
      const LogLikelihood ll = loglik_from_ratio(sum_h2, sum_d2, 4, static_cast<int>(nt));
      s.at(i, j) = ll.value;
      if (ll.saturated) ++s.saturated_cells;
    }
  }
  return s;
}

Estimate find_peak(const LikelihoodSurface& s) {
  const std::size_t no = s.omega_axis.size();
  const std::size_t nd = s.delta_axis.size();
  std::optional<std::pair<std::size_t, std::size_t>> best;
  std::vector<double> finite;
  finite.reserve(s.values.size());
  for (std::size_t i = 0; i < no; ++i) {
    for (std::size_t j = 0; j < nd; ++j) {
      const double v = s.at(i, j);
      if (!std::isfinite(v)) continue;
      finite.push_back(v);
      if (!best || v > s.at(best->first, best->second)) best = {i, j};
    }
  }
  if (!best) throw DegenerateBasis("likelihood surface has no finite cell");

  const auto [i, j] = *best;
  Estimate est;
  est.omega_index = i;
  est.delta_index = j;
  est.omega = s.omega_axis[i];
  est.delta_omega = s.delta_axis[j];
  const double f0 = s.at(i, j);
  est.peak_loglik = f0;
  est.margin = std::max(0.0, f0 - median_of(std::move(finite)));

  auto value = [&](long di, long dj) -> double {
    const long ii = static_cast<long>(i) + di;
    const long jj = static_cast<long>(j) + dj;
    if (ii < 0 || jj < 0 || ii >= static_cast<long>(no) || jj >= static_cast<long>(nd)) return kNaN;
    return s.at(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj));
  };
  const double hw = (i > 0 && i + 1 < no) ? 0.5 * (s.omega_axis[i + 1] - s.omega_axis[i - 1]) : kNaN;
  const double hd = (j > 0 && j + 1 < nd) ? 0.5 * (s.delta_axis[j + 1] - s.delta_axis[j - 1]) : kNaN;

  // Derivatives in index units.
  const double gw = 0.5 * (value(1, 0) - value(-1, 0));
  const double gd = 0.5 * (value(0, 1) - value(0, -1));
  const double hww = value(1, 0) - 2.0 * f0 + value(-1, 0);
  const double hdd = value(0, 1) - 2.0 * f0 + value(0, -1);
  const double hwd = 0.25 * (value(1, 1) - value(1, -1) - value(-1, 1) + value(-1, -1));

  est.curvature << hww / (hw * hw), hwd / (hw * hd), hwd / (hw * hd), hdd / (hd * hd);

  double step_w = 0.0;
  double step_d = 0.0;
  const double det = hww * hdd - hwd * hwd;
  if (std::isfinite(det) && hww < 0.0 && det > 0.0) {
    step_w = -(hdd * gw - hwd * gd) / det;
    step_d = -(hww * gd - hwd * gw) / det;
    // Strong correlation can put the vertex just past the neighbouring cell.
    if (std::abs(step_w) > 2.0 || std::abs(step_d) > 2.0) step_w = step_d = 0.0;
  }
  if (step_w == 0.0 && step_d == 0.0) {
    // Axis-wise parabolas where the joint quadratic is unusable.
    if (std::isfinite(hww) && hww < 0.0) step_w = std::clamp(-gw / hww, -1.0, 1.0);
    if (std::isfinite(hdd) && hdd < 0.0) step_d = std::clamp(-gd / hdd, -1.0, 1.0);
    est.peak_loglik = f0 + (step_w != 0.0 ? gw * step_w + 0.5 * hww * step_w * step_w : 0.0) +
                      (step_d != 0.0 ? gd * step_d + 0.5 * hdd * step_d * step_d : 0.0);
  } else {
    est.peak_loglik = f0 + gw * step_w + gd * step_d +
                      0.5 * (hww * step_w * step_w + 2.0 * hwd * step_w * step_d + hdd * step_d * step_d);
  }
  if (step_w != 0.0) est.omega += step_w * hw;
  if (step_d != 0.0) est.delta_omega += step_d * hd;
  return est;
}

Eigen::Matrix2d likelihood_hessian(const DataTrace& d, double omega, double delta_omega, double h_omega,
                                   double h_delta) {
  auto L = [&](double w, double dw) {
    try {
      return log_likelihood(w, dw, d).value;
    } catch (const DegenerateBasis&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  const double c = L(omega, delta_omega);
  Eigen::Matrix2d h;
  h(0, 0) = (L(omega + h_omega, delta_omega) - 2.0 * c + L(omega - h_omega, delta_omega)) / (h_omega * h_omega);
  h(1, 1) = (L(omega, delta_omega + h_delta) - 2.0 * c + L(omega, delta_omega - h_delta)) / (h_delta * h_delta);
  h(0, 1) = (L(omega + h_omega, delta_omega + h_delta) - L(omega + h_omega, delta_omega - h_delta) -
             L(omega - h_omega, delta_omega + h_delta) + L(omega - h_omega, delta_omega - h_delta)) /
            (4.0 * h_omega * h_delta);
  h(1, 0) = h(0, 1);
  return h;
}

Estimate polish_estimate(const DataTrace& d, const LikelihoodSurface& s, Estimate est) {
  const std::size_t i = est.omega_index;
  const std::size_t j = est.delta_index;
  const auto& wa = s.omega_axis;
  const auto& da = s.delta_axis;
  auto spacing = [](const std::vector<double>& ax, std::size_t k) {
    if (ax.size() < 2) return 0.0;
    return k + 1 < ax.size() ? ax[k + 1] - ax[k] : ax[k] - ax[k - 1];
  };
  const double cw = spacing(wa, i);
  const double cd = spacing(da, j);

  auto objective = [&](std::span<const double> x) {
    try {
      return -log_likelihood(x[0], x[1], d).value;
    } catch (const DegenerateBasis&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  // Sharp, correlated peaks can sit a couple of cells from the best grid
  // cell, so the box spans two cells each way and follows the simplex if it
  // ends on an edge.
  std::array<double, 2> centre{std::clamp(est.omega, wa.front(), wa.back()), std::max(est.delta_omega, 0.0)};
  double best_value = s.at(i, j);
  std::array<double, 2> best_x{wa[i], da[j]};
  for (int hop = 0; hop < 4 && cw > 0.0 && cd > 0.0; ++hop) {
    const std::array<double, 2> lower{centre[0] - 2.0 * cw, std::max(centre[1] - 2.0 * cd, 0.0)};
    const std::array<double, 2> upper{centre[0] + 2.0 * cw, centre[1] + 2.0 * cd};
    const std::array<double, 2> steps{0.5 * cw, 0.5 * cd};
    NelderMeadOptions opts;
    opts.x_tolerance = 1e-7 * std::max(1.0, std::abs(centre[0]));
    opts.max_evaluations = 400;
    const NelderMeadResult r = nelder_mead_minimize(objective, {centre[0], centre[1]}, steps, lower, upper, opts);
    if (!(std::isfinite(r.value) && -r.value >= best_value)) break;
    best_value = -r.value;
    best_x = {r.x[0], r.x[1]};
    const bool on_edge = std::abs(r.x[0] - lower[0]) < 0.01 * cw || std::abs(r.x[0] - upper[0]) < 0.01 * cw ||
                         (lower[1] > 0.0 && std::abs(r.x[1] - lower[1]) < 0.01 * cd) ||
                         std::abs(r.x[1] - upper[1]) < 0.01 * cd;
    if (!on_edge) break;
    centre = best_x;
  }
  est.omega = best_x[0];
  est.delta_omega = best_x[1];
  const OrthoProjection p = orthonormal_projection(design_matrix(est.omega, est.delta_omega, d.times()), d);
  est.peak_loglik = bretthorst_log_likelihood(p).value;
  for (int m = 0; m < 4; ++m) est.a[static_cast<std::size_t>(m)] = p.a(m);
  // The peak is often narrower than a grid cell, where the 3x3 stencil smears
  // the squeezed direction; difference the likelihood on a much finer scale.
  if (cw > 0.0 && cd > 0.0) {
    const Eigen::Matrix2d fine = likelihood_hessian(d, est.omega, est.delta_omega, 0.01 * cw, 0.01 * cd);
    if (fine.allFinite()) est.curvature = fine;
  }
  return est;
}

SpectralFit estimate_spectral(const DataTrace& d, const SpectralGridOptions& options) {
  SpectralFit fit;
  fit.omega_center = options.omega_center.value_or(dft_peak_frequency(d));
  if (!(fit.omega_center > 0.0)) throw InvalidParameter("grid centre frequency must be positive");
  const auto omega_axis = linear_axis(options.omega_lo_factor * fit.omega_center,
                                      options.omega_hi_factor * fit.omega_center, options.omega_count);
  const auto delta_axis = linear_axis(0.0, options.delta_hi_factor * fit.omega_center, options.delta_count);
  fit.surface = likelihood_surface(d, omega_axis, delta_axis);
  fit.estimate = find_peak(fit.surface);
  if (options.polish) {
    fit.estimate = polish_estimate(d, fit.surface, fit.estimate);
  } else {
    const OrthoProjection p =
        orthonormal_projection(design_matrix(fit.estimate.omega, fit.estimate.delta_omega, d.times()), d);
    for (int m = 0; m < 4; ++m) fit.estimate.a[static_cast<std::size_t>(m)] = p.a(m);
  }
  return fit;
}

std::vector<double> default_frequency_grid(const DataTrace& d) {
  if (d.size() < 2) return {};
  const double span = d.times().back() - d.times().front();
  if (!(span > 0.0)) return {};
  const double resolution = 2.0 * std::numbers::pi / span;
  const double nyquist = std::numbers::pi * static_cast<double>(d.size() - 1) / span;
  const double step = resolution / 8.0;
  std::vector<double> grid;
  for (double nu = 0.5 * resolution; nu <= nyquist; nu += step) grid.push_back(nu);
  return grid;
}

std::vector<double> periodogram(const DataTrace& d, std::span<const double> freqs) {
  const auto dv = d.frequencies();
  const auto t = d.times();
  std::vector<double> power(freqs.size(), 0.0);
  if (dv.empty()) return power;
  double mean = 0.0;
  for (double x : dv) mean += x;
  mean /= static_cast<double>(dv.size());
  for (std::size_t k = 0; k < freqs.size(); ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t n = 0; n < dv.size(); ++n) acc += (dv[n] - mean) * std::polar(1.0, -freqs[k] * t[n]);
    power[k] = std::norm(acc) / static_cast<double>(dv.size());
  }
  return power;
}

double dft_peak_frequency(const DataTrace& d) {
  const auto grid = default_frequency_grid(d);
  if (grid.empty()) throw InvalidParameter("trace too short for a periodogram");
  const auto power = periodogram(d, grid);
  const auto it = std::max_element(power.begin(), power.end());
  return grid[static_cast<std::size_t>(it - power.begin())];
}

int count_peaks_above_half_max(std::span<const double> spectrum, std::span<const double> freqs,
                               double lo, double hi) {
  double band_max = 0.0;
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    if (freqs[k] >= lo && freqs[k] <= hi) band_max = std::max(band_max, spectrum[k]);
  }
  int peaks = 0;
  for (std::size_t k = 1; k + 1 < spectrum.size(); ++k) {
    if (freqs[k] < lo || freqs[k] > hi) continue;
    if (spectrum[k] >= spectrum[k - 1] && spectrum[k] > spectrum[k + 1] && spectrum[k] >= 0.5 * band_max) {
      ++peaks;
    }
  }
  return peaks;
}

SingleFrequencyFit best_single_frequency(const DataTrace& d, std::span<const double> omega_axis) {
  check_axis(omega_axis, "omega");
  SingleFrequencyFit best{kNaN, -std::numeric_limits<double>::infinity()};
  std::size_t best_k = 0;
  for (std::size_t k = 0; k < omega_axis.size(); ++k) {
    try {
      const double v = single_frequency_log_likelihood(omega_axis[k], d).value;
      if (v > best.log_likelihood) {
        best = {omega_axis[k], v};
        best_k = k;
      }
    } catch (const DegenerateBasis&) {
    }
  }
  if (!std::isfinite(best.log_likelihood)) throw DegenerateBasis("single-frequency model degenerate everywhere");

  const double lo = best_k > 0 ? omega_axis[best_k - 1] : omega_axis[best_k];
  const double hi = best_k + 1 < omega_axis.size() ? omega_axis[best_k + 1] : omega_axis[best_k];
  if (hi > lo) {
    auto objective = [&](std::span<const double> x) {
      try {
        return -single_frequency_log_likelihood(x[0], d).value;
      } catch (const DegenerateBasis&) {
        return std::numeric_limits<double>::infinity();
      }
    };
    const std::array<double, 1> steps{0.25 * (hi - lo)};
    const std::array<double, 1> lower{lo};
    const std::array<double, 1> upper{hi};
    NelderMeadOptions opts;
    opts.x_tolerance = 1e-7 * std::max(1.0, std::abs(best.omega));
    opts.max_evaluations = 200;
    const auto r = nelder_mead_minimize(objective, {best.omega}, steps, lower, upper, opts);
    if (-r.value > best.log_likelihood) best = {r.x[0], -r.value};
  }
  return best;
}

double model_compare(const DataTrace& d, const Estimate& est) {
  const auto axis = linear_axis(0.5 * est.omega, 1.5 * est.omega, 400);
  return est.peak_loglik - best_single_frequency(d, axis).log_likelihood;
}

}  // namespace qchar
