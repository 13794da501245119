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
#ifndef UNDE_SAFT_HPP
#define UNDE_SAFT_HPP

#include <span>
#include <vector>

#include "unde/fft.hpp"
#include "unde/geometry.hpp"
#include "unde/pulse.hpp"

namespace unde {

/// Analytic signal: negative frequencies removed, positive side doubled,
/// DC (and Nyquist for even lengths) kept.
std::vector<Complex> analytic_signal(std::span<const double> signal);

/// Instantaneous envelope |analytic_signal(signal)|. Needs at least 2 samples.
std::vector<double> envelope(std::span<const double> signal);

/// Delay-and-sum reconstruction of one slice.
///
/// Each channel is converted to its analytic signal and sampled (linear
/// interpolation) at the echo time tau_k(nu) plus the pulse center delay, so
/// the focus lands on the envelope peak of the echo. Samples beyond the
/// record contribute nothing. Output is the modulus of the coherent sum,
/// without hit-count normalization or depth gain.
std::vector<double> saft_reconstruct(std::span<const double> y, const ScanGeometry& geom, const ImageGrid& grid,
                                     const PulseModel& pulse, bool apodize);

}  // namespace unde

#endif  // UNDE_SAFT_HPP
