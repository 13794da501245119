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
#ifndef UNDE_PREPROCESS_HPP
#define UNDE_PREPROCESS_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace unde {

struct PreprocessOptions {
  std::size_t skip = 27;           // trigger synchronization samples
  std::size_t record_length = 2048;
  std::size_t factor = 5;          // 1 MHz -> 200 kHz
  std::size_t taps = 64;
  double cutoff = 0.8;             // fraction of the output Nyquist frequency
  std::size_t output_length = 409;
};

/// Hamming-windowed sinc low-pass with unit DC gain. `cutoff` is in cycles per
/// input sample.
std::vector<double> lowpass_fir(std::size_t taps, double cutoff);

/// Conditions one raw A-scan: drops the trigger samples, pads the tail by
/// repeating the last sample back to the nominal record length, low-pass
/// filters and keeps every `factor`-th sample. Output sample j corresponds to
/// input sample skip + j * factor. Throws on records shorter than
/// `record_length`.
std::vector<double> preprocess_record(std::span<const double> raw, const PreprocessOptions& options = {});

/// Same for `n_records` records stored back to back, each `stride` samples.
std::vector<double> preprocess_records(std::span<const double> raw, std::size_t n_records, std::size_t stride,
                                       const PreprocessOptions& options = {});

}  // namespace unde

#endif  // UNDE_PREPROCESS_HPP
