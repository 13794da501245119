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
#include "unde/preprocess.hpp"

#include <cmath>
#include <numbers>

#include "unde/common.hpp"

namespace unde {

std::vector<double> lowpass_fir(std::size_t taps, double cutoff) {
  require(taps >= 2, "filter needs at least two taps");
  require(cutoff > 0.0 && cutoff < 0.5, "cutoff must lie in (0, 0.5) cycles per sample");
  std::vector<double> h(taps);
  const double mid = 0.5 * static_cast<double>(taps - 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < taps; ++i) {
    const double t = static_cast<double>(i) - mid;
    const double arg = 2.0 * std::numbers::pi * cutoff * t;
    const double sinc = t == 0.0 ? 1.0 : std::sin(arg) / arg;
    const double win = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / (taps - 1));
    h[i] = 2.0 * cutoff * sinc * win;
    sum += h[i];
  }
  for (double& v : h) v /= sum;
  return h;
}

std::vector<double> preprocess_record(std::span<const double> raw, const PreprocessOptions& opt) {
  require(opt.factor >= 1 && opt.output_length >= 1, "bad decimation settings");
  require(opt.record_length > opt.skip, "record length must exceed the trigger skip");
  if (raw.size() < opt.record_length) fail(ErrorCode::InvalidArgument, "record shorter than the nominal length");

  // Signal after the trigger skip, extended by edge replication so every
  // output sample has a full filter support.
  const long n_in = static_cast<long>(opt.record_length - opt.skip);
  const double* s = raw.data() + opt.skip;
  auto at = [&](long i) {
    if (i < 0) return s[0];
    if (i >= n_in) return s[n_in - 1];
    return s[i];
  };

  const auto h = lowpass_fir(opt.taps, opt.cutoff * 0.5 / static_cast<double>(opt.factor));
  // Center the even-length filter so its group delay is half a sample early.
  const long half = static_cast<long>(opt.taps / 2);
  std::vector<double> out(opt.output_length);
  for (std::size_t j = 0; j < opt.output_length; ++j) {
    const long c = static_cast<long>(j * opt.factor);
    double acc = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) acc += h[i] * at(c + static_cast<long>(i) - half);
    out[j] = acc;
  }
  return out;
}

std::vector<double> preprocess_records(std::span<const double> raw, std::size_t n_records, std::size_t stride,
                                       const PreprocessOptions& opt) {
  require(stride >= opt.record_length, "record stride shorter than the record length");
  require(raw.size() >= n_records * stride, "raw buffer too small for the record count");
  std::vector<double> out;
  out.reserve(n_records * opt.output_length);
  for (std::size_t r = 0; r < n_records; ++r) {
    const auto one = preprocess_record(raw.subspan(r * stride, stride), opt);
    out.insert(out.end(), one.begin(), one.end());
  }
  return out;
}

}  // namespace unde
