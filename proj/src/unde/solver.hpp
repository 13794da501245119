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
#ifndef UNDE_SOLVER_HPP
#define UNDE_SOLVER_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "unde/geometry.hpp"
#include "unde/prior.hpp"
#include "unde/system_matrix.hpp"

namespace unde {

struct SolverOptions {
  std::size_t max_iterations = 30;
  double tolerance = 1e-6;  // relative cost change; 0 runs all iterations
  std::uint64_t seed = 0;
  long shift_window = 3;  // samples
  bool model_direct_arrival = true;
  bool estimate_shift = true;
  double sigma = 0.0;  // noise scale; <= 0 estimates it from the data
};

struct CostTerms {
  double data = 0.0;
  double prior = 0.0;
  double total = 0.0;
};

/// Lag l in [-window, window] maximizing sum_t y(t) d(t - l). Ties keep the
/// first maximum in increasing lag order; an all-zero correlation gives 0.
long estimate_shift(std::span<const double> channel, std::span<const double> templ, long window);

/// g_k = d_k^T (y_k - (Ax)_k) / ||d_k||^2, with g_k = 0 for empty templates.
std::vector<double> solve_gains(std::span<const double> y, const SystemMatrix& A, std::span<const double> x,
                                const DirectArrival& D);

/// Robust noise scale: residual of the direct-arrival fit at x = 0 (after
/// shift correction when `shift_window` > 0), then MAD / 0.6745. Floors at
/// machine epsilon. `D` may be null to skip the direct-arrival fit.
double estimate_noise_sigma(std::span<const double> y, const DirectArrival* D, long shift_window);

/// Exact MAP cost ||y - Ax - Dg||^2 / (2 sigma^2) + prior(x), computed from
/// scratch. `D` may be null (then g is ignored).
CostTerms map_cost(std::span<const double> x, std::span<const double> g, std::span<const double> y,
                   const SystemMatrix& A, const DirectArrival* D, const PriorModel& prior, double sigma);

/// Where a measurement record lives in the reconstructed volume.
struct RecordPlacement {
  std::size_t slice = 0;
  std::size_t col_offset = 0;  // first joint column covered by the record
};

/// ICD with per-visit majorization over one or more measurement records that
/// share a single local system matrix.
///
/// Each record is one scan position of one slice. Its local pixel n maps to
/// joint pixel (slice, col_offset + n / rows, n % rows). The joint forward
/// operator is never formed: a pixel update gathers theta1 and theta2 from
/// every record whose footprint covers the pixel. The residual of every
/// record is kept against the original data, e = y - A x - D g.
class IcdSolver {
 public:
  enum class Stage { GainSolve, Pass };
  using Observer = std::function<void(Stage, const IcdSolver&)>;

  IcdSolver(const SystemMatrix& A, const DirectArrival* D, const PriorModel& prior, const ImageGrid& joint_grid,
            std::vector<RecordPlacement> placements, std::vector<std::vector<double>> records,
            const SolverOptions& options);

  /// Shift correction, noise scale, x = 0 and the initial gain solve.
  void initialize();
  /// One g-solve followed by one full ICD pass. Returns true once the
  /// relative cost change drops below the tolerance.
  bool iterate();
  /// initialize() then iterate() until convergence or the iteration cap.
  void run();

  /// One majorized coordinate update of joint pixel v. Returns the new value.
  double update_pixel(std::size_t v);
  void solve_all_gains();

  void set_observer(Observer obs) { observer_ = std::move(obs); }
  void set_pixel(std::size_t v, double value);

  const std::vector<double>& image() const { return x_; }
  std::size_t n_records() const { return records_.size(); }
  std::span<const double> data(std::size_t r) const { return records_[r].y; }
  std::span<const double> residual(std::size_t r) const { return records_[r].e; }
  std::span<const double> gains(std::size_t r) const { return records_[r].g; }
  std::span<const long> shifts(std::size_t r) const { return records_[r].shift; }
  const DirectArrival& templates(std::size_t r) const { return records_[r].D; }
  bool models_direct_arrival() const { return use_d_; }
  const std::vector<CostTerms>& history() const { return history_; }
  double sigma() const { return sigma_; }
  std::size_t iterations() const { return iterations_; }
  const SystemMatrix& system_matrix() const { return A_; }
  const PriorModel& prior() const { return prior_; }
  const ImageGrid& grid() const { return grid_; }
  /// Joint pixel index of local pixel n of record r.
  std::size_t joint_index(std::size_t r, std::size_t n) const;

  /// Cost from the maintained residuals.
  CostTerms current_cost() const;

 private:
  struct Record {
    std::vector<double> y;
    std::vector<double> e;
    std::vector<double> g;
    std::vector<long> shift;
    DirectArrival D;
  };
  struct Cover {
    std::size_t record;
    std::size_t local;
  };

  const SystemMatrix& A_;
  const PriorModel& prior_;
  ImageGrid grid_;
  SolverOptions opt_;
  bool use_d_;
  std::vector<RecordPlacement> placements_;
  std::vector<Record> records_;
  std::vector<std::size_t> cover_ptr_;
  std::vector<Cover> covers_;
  std::vector<double> x_;
  std::vector<CostTerms> history_;
  std::vector<std::size_t> order_;
  std::mt19937_64 rng_;
  double sigma_ = 1.0;
  std::size_t iterations_ = 0;
  bool initialized_ = false;
  Observer observer_;
};

struct Reconstruction {
  std::vector<double> x;
  std::vector<std::vector<double>> gains;  // per record
  std::vector<std::vector<long>> shifts;   // per record
  std::vector<CostTerms> history;
  double sigma = 0.0;
  std::size_t iterations = 0;
};

Reconstruction collect(const IcdSolver& solver);

/// Single-position MBIR of one slice.
Reconstruction mbir_reconstruct(std::span<const double> y, const SystemMatrix& A, const DirectArrival& D,
                                const PriorModel& prior, const ImageGrid& grid, const SolverOptions& options);

/// Positivity-constrained l1 baseline: the exponential term of `params` only
/// (no Gibbs term) and no direct-arrival model.
Reconstruction l1_reconstruct(std::span<const double> y, const SystemMatrix& A, const PriorParams& params,
                              const ImageGrid& grid, SolverOptions options);

}  // namespace unde

#endif  // UNDE_SOLVER_HPP
