/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The unde authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef UNDE_PULSE_HPP
#define UNDE_PULSE_HPP

#include <cstddef>
#include <vector>

namespace unde {

/// Transmit pulse and propagation constants of the linear model.
///
/// The source is a Gaussian-modulated cosine at `carrier_freq` with unit peak
/// amplitude. Its -6 dB spectral width is `fractional_bandwidth * carrier_freq`
/// and it is delayed so the leading -40 dB envelope point falls on t = 0.
///
/// `alpha0` is in (MHz m)^-1, i.e. the attenuation exponent is
/// alpha0 * c * |f in MHz| * tau.
struct PulseModel {
  double carrier_freq = 52e3;
  double sampling_freq = 200e3;
  double alpha0 = 30.0;
  double speed = 2620.0;
  double lambda = 1.0;
  double fractional_bandwidth = 0.6;
  double t0 = 0.0;  // truncation time; <= 0 selects the automatic value
  std::size_t n_samples = 409;
  std::size_t table_oversample = 8;

  void validate() const;

  /// Standard deviation of the Gaussian envelope in seconds.
  double envelope_sigma() const;
  /// Time of the envelope peak.
  double center_time() const;
  /// Truncation time: the configured t0, or four carrier periods past the
  /// trailing -40 dB envelope point.
  double truncation_time() const;
  double source(double t) const;
  double sample_period() const { return 1.0 / sampling_freq; }
};

/// Tabulated truncated impulse responses h(tau, t), t in [0, t0), on a
/// uniform grid of delays. Lookups interpolate linearly in both tau and t.
class ImpulseTable {
 public:
  /// Rows cover [tau_min, tau_max] with a step of half a sampling period.
  ImpulseTable(const PulseModel& pulse, double tau_min, double tau_max);

  /// h(tau, t); zero outside [0, t0). Throws OutOfRange if tau is outside
  /// the tabulated delays.
  double operator()(double tau, double t) const;

  double tau_min() const { return tau_min_; }
  double tau_max() const { return tau_min_ + tau_step_ * static_cast<double>(n_rows_ - 1); }
  double tau_step() const { return tau_step_; }
  double time_step() const { return dt_; }
  double t0() const { return t0_; }
  std::size_t n_rows() const { return n_rows_; }
  std::size_t window_length() const { return n_window_; }
  std::size_t fft_length() const { return n_fft_; }
  bool covers(double tau) const;

  double tau_at(std::size_t row) const { return tau_min_ + tau_step_ * static_cast<double>(row); }
  /// Samples of row `row` at t = j * time_step(), j < window_length().
  const double* row(std::size_t r) const { return &values_[r * stride_]; }

 private:
  double tau_min_;
  double tau_step_;
  double dt_;
  double t0_;
  std::size_t n_rows_;
  std::size_t n_window_;
  std::size_t stride_;
  std::size_t n_fft_;
  std::vector<double> values_;
};

}  // namespace unde

#endif  // UNDE_PULSE_HPP
