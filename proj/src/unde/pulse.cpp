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
#include "unde/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "unde/common.hpp"
#include "unde/fft.hpp"

namespace unde {

void PulseModel::validate() const {
  require(carrier_freq > 0.0, "carrier_freq must be positive");
  require(sampling_freq > 0.0, "sampling_freq must be positive");
  require(speed > 0.0, "speed must be positive");
  require(alpha0 >= 0.0, "alpha0 must be nonnegative");
  require(fractional_bandwidth > 0.0, "fractional_bandwidth must be positive");
  require(n_samples >= 2, "n_samples must be at least 2");
  require(table_oversample >= 1, "table_oversample must be at least 1");
  require(std::isfinite(t0), "t0 must be finite");
}

double PulseModel::envelope_sigma() const {
  const double half_width = 0.5 * fractional_bandwidth * carrier_freq;
  return std::sqrt(std::numbers::ln2 / 2.0) / (std::numbers::pi * half_width);
}

double PulseModel::center_time() const { return envelope_sigma() * std::sqrt(2.0 * std::log(100.0)); }

double PulseModel::truncation_time() const {
  if (t0 > 0.0) return t0;
  return 2.0 * center_time() + 4.0 / carrier_freq;
}

double PulseModel::source(double t) const {
  const double u = t - center_time();
  const double s = envelope_sigma();
  return std::exp(-u * u / (2.0 * s * s)) * std::cos(2.0 * std::numbers::pi * carrier_freq * u);
}

ImpulseTable::ImpulseTable(const PulseModel& pulse, double tau_min, double tau_max) {
  pulse.validate();
  require(tau_min >= 0.0 && tau_max >= tau_min, "invalid delay range for impulse table");

  tau_min_ = tau_min;
  tau_step_ = 0.5 / pulse.sampling_freq;
  n_rows_ = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil((tau_max - tau_min) / tau_step_)) + 1);

  const double fs = pulse.sampling_freq * static_cast<double>(pulse.table_oversample);
  dt_ = 1.0 / fs;
  t0_ = pulse.truncation_time();
  n_window_ = static_cast<std::size_t>(std::ceil(t0_ * fs - 1e-9));
  stride_ = n_window_ + 1;

  n_fft_ = 256;
  while (n_fft_ < 16 * stride_) n_fft_ *= 2;

  std::vector<Complex> spectrum(n_fft_);
  for (std::size_t n = 0; n < n_fft_; ++n) spectrum[n] = pulse.source(static_cast<double>(n) * dt_);
  fft(spectrum);

  // |f| in MHz for each DFT bin, Nyquist bin taken as positive.
  std::vector<double> abs_f_mhz(n_fft_);
  for (std::size_t k = 0; k < n_fft_; ++k) {
    const double kk = k <= n_fft_ / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n_fft_);
    abs_f_mhz[k] = std::abs(kk) * fs / static_cast<double>(n_fft_) * 1e-6;
  }

  const double gain = -pulse.lambda * pulse.lambda;
  const double atten_rate = pulse.alpha0 * pulse.speed;
  values_.assign(n_rows_ * stride_, 0.0);
  std::vector<Complex> work(n_fft_);
  for (std::size_t r = 0; r < n_rows_; ++r) {
    const double tau = tau_at(r);
    for (std::size_t k = 0; k < n_fft_; ++k) work[k] = spectrum[k] * (gain * std::exp(-atten_rate * abs_f_mhz[k] * tau));
    fft(work, true);
    double* dst = &values_[r * stride_];
    for (std::size_t j = 0; j < stride_; ++j) dst[j] = work[j].real();
  }
}

bool ImpulseTable::covers(double tau) const {
  const double slack = 1e-9 * tau_step_;
  return tau >= tau_min_ - slack && tau <= tau_max() + slack;
}

double ImpulseTable::operator()(double tau, double t) const {
  if (!covers(tau)) {
    std::ostringstream os;
    os << "delay " << tau << " s outside impulse table range [" << tau_min_ << ", " << tau_max() << "]";
    fail(ErrorCode::OutOfRange, os.str());
  }
  if (t < 0.0 || t >= t0_) return 0.0;

  const double u = std::clamp((tau - tau_min_) / tau_step_, 0.0, static_cast<double>(n_rows_ - 1));
  const std::size_t r0 = std::min(static_cast<std::size_t>(u), n_rows_ - 2);
  const double wr = u - static_cast<double>(r0);

  const double v = t / dt_;
  const std::size_t j0 = std::min(static_cast<std::size_t>(v), n_window_ - 1);
  const double wj = v - static_cast<double>(j0);

  const double* a = row(r0);
  const double* b = row(r0 + 1);
  const double ha = a[j0] + wj * (a[j0 + 1] - a[j0]);
  const double hb = b[j0] + wj * (b[j0 + 1] - b[j0]);
  return ha + wr * (hb - ha);
}

}  // namespace unde
