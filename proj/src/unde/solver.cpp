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
#include "unde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "unde/common.hpp"

namespace unde {

namespace {

double median_inplace(std::vector<double>& v) {
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  double m = *mid;
  if (n % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), mid));
  return m;
}

double mad_sigma(std::vector<double> values) {
  require(!values.empty(), "noise estimate needs at least one sample");
  const double med = median_inplace(values);
  for (double& v : values) v = std::abs(v - med);
  const double sigma = median_inplace(values) / 0.6745;
  return std::max(sigma, std::numeric_limits<double>::epsilon());
}

void check_finite(std::span<const double> y) {
  for (double v : y)
    if (!std::isfinite(v)) fail(ErrorCode::Numeric, "measurement contains non-finite values");
}

}  // namespace

long estimate_shift(std::span<const double> channel, std::span<const double> templ, long window) {
  require(window >= 0, "shift window must be nonnegative");
  const long M = static_cast<long>(std::min(channel.size(), templ.size()));
  long best_lag = 0;
  double best = -std::numeric_limits<double>::infinity();
  bool any_nonzero = false;
  for (long lag = -window; lag <= window; ++lag) {
    double acc = 0.0;
    for (long t = std::max(0L, lag); t < std::min(M, M + lag); ++t) acc += channel[t] * templ[t - lag];
    if (acc != 0.0) any_nonzero = true;
    if (acc > best) {
      best = acc;
      best_lag = lag;
    }
  }
  return any_nonzero ? best_lag : 0;
}

std::vector<double> solve_gains(std::span<const double> y, const SystemMatrix& A, std::span<const double> x,
                                const DirectArrival& D) {
  require(y.size() == A.n_rows(), "gain solve: data size mismatch");
  std::vector<double> r = A.apply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = y[i] - r[i];
  const std::size_t M = D.n_samples();
  std::vector<double> g(D.n_pairs(), 0.0);
  for (std::size_t k = 0; k < D.n_pairs(); ++k) {
    const double nn = D.column_norm2(k);
    if (nn == 0.0) continue;
    auto d = D.column(k);
    double acc = 0.0;
    for (std::size_t m = 0; m < M; ++m) acc += d[m] * r[k * M + m];
    g[k] = acc / nn;
  }
  return g;
}

double estimate_noise_sigma(std::span<const double> y, const DirectArrival* D, long shift_window) {
  require(!y.empty(), "noise estimate needs data");
  std::vector<double> e(y.begin(), y.end());
  if (D != nullptr) {
    const std::size_t M = D->n_samples();
    require(y.size() == M * D->n_pairs(), "noise estimate: data size mismatch");
    for (std::size_t k = 0; k < D->n_pairs(); ++k) {
      std::vector<double> d(D->column(k).begin(), D->column(k).end());
      std::span<const double> yk = y.subspan(k * M, M);
      if (shift_window > 0) {
        DirectArrival one(1, M);
        std::copy(d.begin(), d.end(), one.column(0).begin());
        one.shift_column(0, estimate_shift(yk, d, shift_window));
        d.assign(one.column(0).begin(), one.column(0).end());
      }
      double dd = 0.0;
      double dy = 0.0;
      for (std::size_t m = 0; m < M; ++m) {
        dd += d[m] * d[m];
        dy += d[m] * yk[m];
      }
      const double g = dd > 0.0 ? dy / dd : 0.0;
      for (std::size_t m = 0; m < M; ++m) e[k * M + m] -= g * d[m];
    }
  }
  return mad_sigma(std::move(e));
}

CostTerms map_cost(std::span<const double> x, std::span<const double> g, std::span<const double> y,
                   const SystemMatrix& A, const DirectArrival* D, const PriorModel& prior, double sigma) {
  require(sigma > 0.0, "map cost: sigma must be positive");
  for (double v : x)
    if (!(v >= 0.0)) fail(ErrorCode::InvalidArgument, "map cost: negative pixel");
  std::vector<double> r = A.apply(x);
  if (D != nullptr) {
    const std::vector<double> dg = D->apply(g);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += dg[i];
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double d = y[i] - r[i];
    ss += d * d;
  }
  CostTerms c;
  c.data = ss / (2.0 * sigma * sigma);
  c.prior = prior.cost(x);
  c.total = c.data + c.prior;
  return c;
}

IcdSolver::IcdSolver(const SystemMatrix& A, const DirectArrival* D, const PriorModel& prior,
                     const ImageGrid& joint_grid, std::vector<RecordPlacement> placements,
                     std::vector<std::vector<double>> records, const SolverOptions& options)
    : A_(A),
      prior_(prior),
      grid_(joint_grid),
      opt_(options),
      use_d_(options.model_direct_arrival && D != nullptr),
      placements_(std::move(placements)),
      rng_(options.seed) {
  require(!records.empty(), "solver needs at least one record");
  require(records.size() == placements_.size(), "one placement per record is required");
  require(prior.size() == grid_.size(), "prior was built for a different grid");
  require(grid_.n_rows > 0 && A.n_cols() % grid_.n_rows == 0, "system matrix does not match the grid height");
  const std::size_t local_cols = A.n_cols() / grid_.n_rows;

  records_.resize(records.size());
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& pl = placements_[r];
    if (records[r].size() != A.n_rows()) fail(ErrorCode::InvalidArgument, "record length does not match M*K");
    require(pl.slice < grid_.n_slices, "record slice out of range");
    require(pl.col_offset + local_cols <= grid_.n_cols, "record footprint exceeds the joint grid");
    check_finite(records[r]);
    records_[r].y = std::move(records[r]);
    if (use_d_) {
      require(D->n_pairs() * D->n_samples() == A.n_rows(), "direct-arrival matrix does not match A");
      records_[r].D = *D;
    }
  }

  // Coverage lists in CSR form, records in increasing order for each pixel.
  std::vector<std::size_t> count(grid_.size() + 1, 0);
  for (std::size_t r = 0; r < records_.size(); ++r)
    for (std::size_t n = 0; n < A.n_cols(); ++n) ++count[joint_index(r, n) + 1];
  std::partial_sum(count.begin(), count.end(), count.begin());
  cover_ptr_ = count;
  covers_.resize(cover_ptr_.back());
  std::vector<std::size_t> fill(cover_ptr_.begin(), cover_ptr_.end() - 1);
  for (std::size_t r = 0; r < records_.size(); ++r)
    for (std::size_t n = 0; n < A.n_cols(); ++n) covers_[fill[joint_index(r, n)]++] = {r, n};

  order_.resize(grid_.pixels_per_slice());
  std::iota(order_.begin(), order_.end(), 0);
  x_.assign(grid_.size(), 0.0);
}

std::size_t IcdSolver::joint_index(std::size_t r, std::size_t n) const {
  const auto& pl = placements_[r];
  const std::size_t rows = grid_.n_rows;
  return grid_.index(pl.col_offset + n / rows, n % rows, pl.slice);
}

void IcdSolver::initialize() {
  const std::size_t M = A_.n_samples();
  for (auto& rec : records_) {
    rec.e = rec.y;
    rec.g.assign(use_d_ ? rec.D.n_pairs() : 0, 0.0);
    rec.shift.assign(use_d_ ? rec.D.n_pairs() : 0, 0);
    if (use_d_ && opt_.estimate_shift && opt_.shift_window > 0) {
      for (std::size_t k = 0; k < rec.D.n_pairs(); ++k) {
        const long lag = estimate_shift(std::span<const double>(rec.y).subspan(k * M, M), rec.D.column(k),
                                        opt_.shift_window);
        rec.shift[k] = lag;
        rec.D.shift_column(k, lag);
      }
    }
  }
  std::fill(x_.begin(), x_.end(), 0.0);
  history_.clear();
  iterations_ = 0;

  // Gains at x = 0 do not depend on sigma, so the residual used for the noise
  // estimate is the same one the iterations start from.
  solve_all_gains();
  if (opt_.sigma > 0.0) {
    sigma_ = opt_.sigma;
  } else {
    std::vector<double> all;
    for (const auto& rec : records_) all.insert(all.end(), rec.e.begin(), rec.e.end());
    sigma_ = mad_sigma(std::move(all));
  }
  initialized_ = true;
  history_.push_back(current_cost());
  if (observer_) observer_(Stage::GainSolve, *this);
}

void IcdSolver::solve_all_gains() {
  if (!use_d_) return;
  const std::size_t M = A_.n_samples();
  for (auto& rec : records_) {
    for (std::size_t k = 0; k < rec.D.n_pairs(); ++k) {
      auto d = rec.D.column(k);
      const double nn = rec.D.column_norm2(k);
      double* e = &rec.e[k * M];
      // e currently holds y - Ax - g_old d, so the new gain is
      // g_old + d^T e / ||d||^2 and zero-norm templates get g = 0.
      double g_new = 0.0;
      if (nn > 0.0) {
        double acc = 0.0;
        for (std::size_t m = 0; m < M; ++m) acc += d[m] * e[m];
        g_new = rec.g[k] + acc / nn;
      }
      const double dg = g_new - rec.g[k];
      if (dg != 0.0)
        for (std::size_t m = 0; m < M; ++m) e[m] -= dg * d[m];
      rec.g[k] = g_new;
    }
  }
}

double IcdSolver::update_pixel(std::size_t v) {
  const double inv_s2 = 1.0 / (sigma_ * sigma_);
  double theta1 = 0.0;
  double theta2 = 0.0;
  for (std::size_t c = cover_ptr_[v]; c < cover_ptr_[v + 1]; ++c) {
    const auto& [rec, local] = covers_[c];
    theta1 -= A_.dot_column(local, records_[rec].e);
    theta2 += A_.column_norm2(local);
  }
  theta1 *= inv_s2;
  theta2 *= inv_s2;

  const double xs = x_[v];
  double sum_b = 0.0;
  double sum_bx = 0.0;
  const auto& prm = prior_.params();
  for (const auto& [r, b] : prior_.stencil().neighbors(v)) {
    const double bt = b * qggmrf_surrogate_coeff(xs - x_[r], prior_.sigma_g(v, r), prm);
    sum_b += bt;
    sum_bx += bt * x_[r];
  }
  const double denom = theta2 + 2.0 * sum_b;
  if (!(denom > 0.0)) return xs;
  const double num = theta2 * xs - theta1 + 2.0 * sum_bx - prior_.inv_sigma_e(v);
  const double xn = std::max(0.0, num / denom);
  if (xn != xs) set_pixel(v, xn);
  return xn;
}

void IcdSolver::set_pixel(std::size_t v, double value) {
  require(value >= 0.0, "pixel values must be nonnegative");
  const double delta = value - x_[v];
  if (delta == 0.0) return;
  for (std::size_t c = cover_ptr_[v]; c < cover_ptr_[v + 1]; ++c) {
    const auto& [rec, local] = covers_[c];
    A_.add_column(local, -delta, records_[rec].e);
  }
  x_[v] = value;
}

bool IcdSolver::iterate() {
  if (!initialized_) initialize();
  solve_all_gains();
  if (observer_) observer_(Stage::GainSolve, *this);

  std::shuffle(order_.begin(), order_.end(), rng_);
  const std::size_t pps = grid_.pixels_per_slice();
  for (std::size_t p : order_)
    for (std::size_t s = 0; s < grid_.n_slices; ++s) update_pixel(s * pps + p);
  ++iterations_;

  const double prev = history_.back().total;
  history_.push_back(current_cost());
  if (observer_) observer_(Stage::Pass, *this);
  const double cur = history_.back().total;
  const double scale = std::max(std::abs(prev), std::numeric_limits<double>::min());
  return opt_.tolerance > 0.0 && std::abs(prev - cur) < opt_.tolerance * scale;
}

void IcdSolver::run() {
  initialize();
  for (std::size_t it = 0; it < opt_.max_iterations; ++it)
    if (iterate()) break;
}

CostTerms IcdSolver::current_cost() const {
  double ss = 0.0;
  for (const auto& rec : records_)
    for (double v : rec.e) ss += v * v;
  CostTerms c;
  c.data = ss / (2.0 * sigma_ * sigma_);
  c.prior = prior_.cost(x_);
  c.total = c.data + c.prior;
  return c;
}

Reconstruction collect(const IcdSolver& solver) {
  Reconstruction out;
  out.x = solver.image();
  for (std::size_t r = 0; r < solver.n_records(); ++r) {
    out.gains.emplace_back(solver.gains(r).begin(), solver.gains(r).end());
    out.shifts.emplace_back(solver.shifts(r).begin(), solver.shifts(r).end());
  }
  out.history = solver.history();
  out.sigma = solver.sigma();
  out.iterations = solver.iterations();
  return out;
}

Reconstruction mbir_reconstruct(std::span<const double> y, const SystemMatrix& A, const DirectArrival& D,
                                const PriorModel& prior, const ImageGrid& grid, const SolverOptions& options) {
  IcdSolver solver(A, &D, prior, grid.slice_grid(), {RecordPlacement{}}, {std::vector<double>(y.begin(), y.end())},
                   options);
  solver.run();
  return collect(solver);
}

Reconstruction l1_reconstruct(std::span<const double> y, const SystemMatrix& A, const PriorParams& params,
                              const ImageGrid& grid, SolverOptions options) {
  options.model_direct_arrival = false;
  const PriorModel prior(grid.slice_grid(), params, false);
  IcdSolver solver(A, nullptr, prior, grid.slice_grid(), {RecordPlacement{}},
                   {std::vector<double>(y.begin(), y.end())}, options);
  solver.run();
  return collect(solver);
}

}  // namespace unde
