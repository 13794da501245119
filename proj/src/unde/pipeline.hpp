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
#ifndef UNDE_PIPELINE_HPP
#define UNDE_PIPELINE_HPP

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "unde/evaluation.hpp"
#include "unde/geometry.hpp"
#include "unde/io.hpp"
#include "unde/prior.hpp"
#include "unde/pulse.hpp"
#include "unde/simulator.hpp"
#include "unde/solver.hpp"
#include "unde/stitching.hpp"
#include "unde/system_matrix.hpp"

namespace unde {

/// Everything a run needs, with defaults for the 10-transducer array on a
/// 1 cm grid. Distances in meters, times in seconds, frequencies in Hz.
struct RunSettings {
  std::size_t n_transducers = 10;
  double transducer_spacing = 0.04;
  std::size_t cols = 40;  // per scan position
  std::size_t rows = 120;
  double pitch = 0.01;
  std::size_t slices = 1;
  std::size_t positions = 1;
  std::size_t stride = 10;  // columns between positions
  bool apodize = true;
  PulseModel pulse;
  PriorParams prior;
  SolverOptions solver;
  bool joint = true;
  unsigned threads = 0;

  std::string phantom = "points";
  double snr = std::numeric_limits<double>::infinity();
  std::uint64_t sim_seed = 0;
  long max_direct_lag = 0;

  ScanLayout layout() const { return ScanLayout::uniform(positions, cols, stride); }
  ImageGrid local_grid() const { return ImageGrid::centered(cols, rows, pitch); }
  ImageGrid full_grid() const { return joint_grid(layout(), rows, pitch, slices); }
  void validate() const;
};

/// Reads every known key; throws Format on keys it does not know.
RunSettings settings_from_config(const Config& config);

/// Forward model shared by all positions and slices.
struct Problem {
  RunSettings settings;
  ScanGeometry geometry;
  ImageGrid grid;  // one position, one slice
  ImpulseTable table;
  SystemMatrix A;
  DirectArrival D;
};

Problem build_problem(const RunSettings& settings);

enum class Method { Saft, L1, Mbir2d, Mbir25d };
Method parse_method(std::string_view name);
std::string_view to_string(Method m);

struct SimulationOutput {
  Measurement measurement;
  ImageFile truth;  // on the full grid, every slice a copy of the phantom
};

/// Phantom on the full grid, then per slice and position y = A x + D g + w.
/// Slice s uses noise seed sim_seed + s.
SimulationOutput simulate(const Problem& problem);

struct ReconstructionOutput {
  ImageFile image;
  std::vector<CostTerms> history;  // empty for SAFT; last solve for per-record runs
  double sigma = 0.0;
  std::size_t iterations = 0;
};

/// Reconstructs every slice of `m` on the full grid. With joint off (or for
/// SAFT) positions are reconstructed independently and stitched by averaging.
ReconstructionOutput reconstruct(const Problem& problem, const Measurement& m, Method method);

/// Checks the measurement header against the problem.
void check_compatible(const Problem& problem, const Measurement& m);

struct EvaluationOutput {
  PRCurve pixelwise;
  PRCurve componentwise;
};

/// Both PR tests over all slices. Pixel-wise normalizes each slice by its own
/// maximum; component-wise uses `normalization`.
EvaluationOutput evaluate(const ImageFile& recon, const ImageFile& truth,
                          Normalization normalization = Normalization::PerImage, double pairing_radius = 0.10);

}  // namespace unde

#endif  // UNDE_PIPELINE_HPP
