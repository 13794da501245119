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
#include "unde/saft.hpp"

#include <cmath>

#include "unde/common.hpp"
#include "unde/system_matrix.hpp"

namespace unde {

std::vector<Complex> analytic_signal(std::span<const double> signal) {
  const std::size_t n = signal.size();
  require(n >= 2, "analytic signal needs at least 2 samples");
  std::vector<Complex> z(signal.begin(), signal.end());
  fft(z);
  const std::size_t half = n / 2;
  for (std::size_t k = 1; k < n; ++k) {
    if (n % 2 == 0 && k == half) continue;
    z[k] *= (k <= (n - 1) / 2) ? 2.0 : 0.0;
  }
  fft(z, true);
  return z;
}

std::vector<double> envelope(std::span<const double> signal) {
  const auto z = analytic_signal(signal);
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = std::abs(z[i]);
  return out;
}

std::vector<double> saft_reconstruct(std::span<const double> y, const ScanGeometry& geom, const ImageGrid& grid,
                                     const PulseModel& pulse, bool apodize) {
  pulse.validate();
  const std::size_t M = pulse.n_samples;
  const std::size_t K = geom.n_pairs();
  require(y.size() == M * K, "SAFT: data size does not match M*K");

  std::vector<std::vector<Complex>> analytic(K);
  for (std::size_t k = 0; k < K; ++k) analytic[k] = analytic_signal(y.subspan(k * M, M));

  const ImageGrid g = grid.slice_grid();
  const double fs = pulse.sampling_freq;
  const double lag = pulse.center_time();
  std::vector<double> image(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Vec3 nu = g.position(n);
    Complex acc{0.0, 0.0};
    for (std::size_t k = 0; k < K; ++k) {
      const double w = apodize ? apodization(geom, nu, k) : 1.0;
      if (w == 0.0) continue;
      const double u = (geom.travel_time(nu, k, pulse.speed) + lag) * fs;
      if (u < 0.0 || u > static_cast<double>(M - 1)) continue;
      const std::size_t i0 = std::min(static_cast<std::size_t>(u), M - 2);
      const double f = u - static_cast<double>(i0);
      const auto& a = analytic[k];
      acc += w * (a[i0] + f * (a[i0 + 1] - a[i0]));
    }
    image[n] = std::abs(acc);
  }
  return image;
}

}  // namespace unde
