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

// Bayesian frequency estimation for the four-line survival signal.
//
// For a trial (ω, Δω) the data d_n are projected onto an orthonormalized
// version of the cosine basis g_m(t_n). With m_b basis functions and N_t
// samples the marginal log-likelihood (amplitudes and noise level
// integrated out) is
//
//   L(ω, Δω) = (m_b - N_t)/2 · log10[1 - m_b <h²> / (N_t <d²>)]
//
// where <h²> = Σ h_m² / m_b and <d²> = Σ d_n² / N_t.

#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qchar/measurement.hpp"
#include "qchar/signal_model.hpp"

namespace qchar {

/// GG^T is treated as singular when min/max eigenvalue falls below this.
inline constexpr double kDegeneracyThreshold = 1e-10;
/// Floor for the log10 argument; 1 - ratio cannot be resolved below machine epsilon.
// Above the rounding noise of 1 - Σh²/Σd², so a perfect fit is flagged reliably.
inline constexpr double kSaturationFloor = 1e-12;

struct OrthoProjection {
  Eigen::VectorXd h;                  // projections onto the orthonormal basis
  Eigen::VectorXd a;                  // amplitudes of the non-orthogonal basis (least squares)
  Eigen::VectorXd basis_eigenvalues;  // eigenvalues of GG^T, ascending
  Eigen::MatrixXd v;                  // diag(α^-1/2) E^T
  double condition = 0.0;             // min/max eigenvalue of GG^T
  double mean_h2 = 0.0;
  double mean_d2 = 0.0;
  int basis_size = 0;
  int sample_count = 0;
};

struct LogLikelihood {
  double value = 0.0;
  bool saturated = false;  // fit explains all variance; value sits at the floor
};

/// Throws InvalidParameter if Nt <= m_b or the times do not match the trace,
/// DegenerateBasis if GG^T is numerically singular.
OrthoProjection orthonormal_projection(const DesignMatrix& g, const DataTrace& d);
/// Same projection for an arbitrary real data vector (one value per column of g).
OrthoProjection orthonormal_projection(const DesignMatrix& g, std::span<const double> values);

LogLikelihood bretthorst_log_likelihood(const OrthoProjection& p);

/// Four-line model likelihood at (ω, Δω).
LogLikelihood log_likelihood(double omega, double delta_omega, const DataTrace& d);

/// Reduced model {1, cos ωt, cos 2ωt} (m_b = 3).
LogLikelihood single_frequency_log_likelihood(double omega, const DataTrace& d);

std::vector<double> linear_axis(double lo, double hi, int count);

struct LikelihoodSurface {
  std::vector<double> omega_axis;
  std::vector<double> delta_axis;
  std::vector<double> values;  // omega-major; NaN marks a degenerate cell
  std::size_t saturated_cells = 0;

  double at(std::size_t i, std::size_t j) const { return values[i * delta_axis.size() + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * delta_axis.size() + j]; }
};

/// Throws InvalidParameter on empty or non-increasing axes.
LikelihoodSurface likelihood_surface(const DataTrace& d, std::span<const double> omega_axis,
                                     std::span<const double> delta_axis);

struct Estimate {
  double omega = 0.0;
  double delta_omega = 0.0;
  std::array<double, 4> a{};  // filled in by estimate_spectral
  double peak_loglik = 0.0;
  // Second derivatives of L at the peak, (ω, Δω) order: from the 3x3 grid
  // stencil, or a fine stencil once polished. NaN entries where the
  // neighbourhood is incomplete (boundary or degenerate cells).
  Eigen::Matrix2d curvature = Eigen::Matrix2d::Constant(std::numeric_limits<double>::quiet_NaN());
  double margin = 0.0;  // peak height over the surface median
  std::size_t omega_index = 0;
  std::size_t delta_index = 0;

  SignalParams signal() const { return {a, omega, delta_omega}; }
};

/// Grid argmax (first maximum in (ω, Δω) index order) followed by a
/// quadratic polish over the 3x3 neighbourhood. Throws DegenerateBasis if no
/// cell is finite.
Estimate find_peak(const LikelihoodSurface& s);

struct SpectralGridOptions {
  int omega_count = 200;
  int delta_count = 200;
  double omega_lo_factor = 0.5;   // ω axis = [lo, hi] × centre
  double omega_hi_factor = 1.5;
  double delta_hi_factor = 0.25;  // Δω axis = [0, factor × centre]
  std::optional<double> omega_center;  // default: periodogram peak
  bool polish = true;                  // simplex polish on the likelihood itself
};

struct SpectralFit {
  LikelihoodSurface surface;
  Estimate estimate;
  double omega_center = 0.0;
};

/// Full surface scan, peak search, optional polish and amplitude fit.
SpectralFit estimate_spectral(const DataTrace& d, const SpectralGridOptions& options = {});

/// Central-difference second derivatives of L at (ω, Δω). NaN entries where
/// a stencil point is degenerate.
Eigen::Matrix2d likelihood_hessian(const DataTrace& d, double omega, double delta_omega, double h_omega,
                                   double h_delta);

/// Local simplex maximization of log_likelihood within two cells of the peak;
/// the window is re-centred (up to four times) while the optimum sits on its
/// edge. Refreshes omega, delta_omega, peak_loglik and amplitudes, and
/// replaces the grid curvature with likelihood_hessian at 1/100 of a cell.
Estimate polish_estimate(const DataTrace& d, const LikelihoodSurface& s, Estimate est);

/// Oversampled angular-frequency grid up to the mean Nyquist rate of the trace.
std::vector<double> default_frequency_grid(const DataTrace& d);

/// P(ν) = |Σ_n (d_n - mean) e^{-iνt_n}|² / Nt.
std::vector<double> periodogram(const DataTrace& d, std::span<const double> freqs);

double dft_peak_frequency(const DataTrace& d);

/// Local maxima with frequency in [lo, hi] whose power is at least half the
/// largest power in that band.
int count_peaks_above_half_max(std::span<const double> spectrum, std::span<const double> freqs,
                               double lo, double hi);

struct SingleFrequencyFit {
  double omega = 0.0;
  double log_likelihood = 0.0;
};

SingleFrequencyFit best_single_frequency(const DataTrace& d, std::span<const double> omega_axis);

/// Peak L of the split model minus the best single-frequency L (log10 units).
/// Positive favours a non-zero splitting.
double model_compare(const DataTrace& d, const Estimate& est);

}  // namespace qchar
