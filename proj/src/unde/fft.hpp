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
#ifndef UNDE_FFT_HPP
#define UNDE_FFT_HPP

#include <complex>
#include <vector>

namespace unde {

using Complex = std::complex<double>;

/// In-place complex DFT of arbitrary length. The inverse transform is scaled
/// by 1/n so that fft(fft(x), true) == x.
void fft(std::vector<Complex>& data, bool inverse = false);

}  // namespace unde

#endif  // UNDE_FFT_HPP
