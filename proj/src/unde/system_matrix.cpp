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
#include "unde/system_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <thread>

#include "unde/common.hpp"

namespace unde {

double apodization(const ScanGeometry& geom, const Vec3& nu, std::size_t k) {
  auto cos2 = [&](const Vec3& r) {
    const Vec3 d = nu - r;
    const double dist2 = d.x * d.x + d.y * d.y + d.z * d.z;
    if (d.z <= 0.0 || dist2 == 0.0) return 0.0;
    return d.z * d.z / dist2;
  };
  return cos2(geom.transmitter(k)) * cos2(geom.receiver(k));
}

double max_travel_time(const ScanGeometry& geom, const ImageGrid& grid, double speed) {
  double tau = 0.0;
  const ImageGrid g = grid.slice_grid();
  // Travel time is convex in nu, so the maximum over the grid sits on a corner.
  const std::size_t corners[4] = {g.index(0, 0), g.index(0, g.n_rows - 1), g.index(g.n_cols - 1, 0),
                                  g.index(g.n_cols - 1, g.n_rows - 1)};
  for (std::size_t k = 0; k < geom.n_pairs(); ++k) {
    tau = std::max(tau, geom.direct_time(k, speed));
    for (std::size_t n : corners) tau = std::max(tau, geom.travel_time(g.position(n), k, speed));
  }
  return tau;
}

void SystemMatrix::add_column(std::size_t n, double scale, std::span<double> out) const {
  for (const Segment& s : column(n)) {
    const double* v = &values_[s.offset];
    double* o = &out[s.row_begin];
    for (std::uint32_t i = 0; i < s.length; ++i) o[i] += scale * v[i];
  }
}

double SystemMatrix::dot_column(std::size_t n, std::span<const double> v) const {
  double acc = 0.0;
  for (const Segment& s : column(n)) {
    const double* a = &values_[s.offset];
    const double* b = &v[s.row_begin];
    for (std::uint32_t i = 0; i < s.length; ++i) acc += a[i] * b[i];
  }
  return acc;
}

std::vector<double> SystemMatrix::apply(std::span<const double> x) const {
  require(x.size() == n_cols(), "A*x: image size does not match the system matrix");
  std::vector<double> y(n_rows_, 0.0);
  for (std::size_t n = 0; n < n_cols(); ++n)
    if (x[n] != 0.0) add_column(n, x[n], y);
  return y;
}

std::vector<double> SystemMatrix::apply_transpose(std::span<const double> v) const {
  require(v.size() == n_rows_, "A^T*v: vector size does not match the system matrix");
  std::vector<double> out(n_cols());
  for (std::size_t n = 0; n < n_cols(); ++n) out[n] = dot_column(n, v);
  return out;
}

void SystemMatrix::write_triplets(std::ostream& os) const {
  const auto prec = os.precision(17);
  for (std::size_t n = 0; n < n_cols(); ++n)
    for (const Segment& s : column(n))
      for (std::uint32_t i = 0; i < s.length; ++i)
        os << (s.row_begin + i) << ' ' << n << ' ' << values_[s.offset + i] << '\n';
  os.precision(prec);
}

namespace {

struct ColumnBuffer {
  std::vector<SystemMatrix::Segment> segments;
  std::vector<double> values;
};

void assemble_column(const ScanGeometry& geom, const Vec3& nu, const ImpulseTable& table, const PulseModel& pulse,
                     bool apodize, ColumnBuffer& out) {
  const std::size_t M = pulse.n_samples;
  const double fs = pulse.sampling_freq;
  const double t0 = table.t0();
  out.segments.clear();
  out.values.clear();
  for (std::size_t k = 0; k < geom.n_pairs(); ++k) {
    const double phi = apodize ? apodization(geom, nu, k) : 1.0;
    if (phi == 0.0) continue;
    const double tau = geom.travel_time(nu, k, pulse.speed);
    if (!table.covers(tau)) fail(ErrorCode::OutOfRange, "pixel delay outside impulse table range");
    const double m_lo = std::ceil(tau * fs);
    if (m_lo >= static_cast<double>(M)) continue;
    const std::size_t m_begin = static_cast<std::size_t>(m_lo);
    std::size_t m_end = m_begin;
    const std::size_t offset = out.values.size();
    for (std::size_t m = m_begin; m < M; ++m) {
      const double arg = static_cast<double>(m) / fs - tau;
      if (arg >= t0) break;
      out.values.push_back(phi * table(tau, arg));
      m_end = m + 1;
    }
    if (m_end == m_begin) continue;
    out.segments.push_back({static_cast<std::uint32_t>(k * M + m_begin), static_cast<std::uint32_t>(m_end - m_begin),
                            offset});
  }
}

}  // namespace

SystemMatrix build_system_matrix(const ScanGeometry& geom, const ImageGrid& grid, const ImpulseTable& table,
                                 const PulseModel& pulse, bool apodize, unsigned threads) {
  pulse.validate();
  const ImageGrid g = grid.slice_grid();
  const std::size_t N = g.size();
  const std::size_t K = geom.n_pairs();
  const std::size_t M = pulse.n_samples;

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(N, 1)));

  // Each worker owns a contiguous block of columns; blocks are concatenated
  // afterwards in column order.
  std::vector<std::vector<ColumnBuffer>> blocks(threads);
  std::vector<std::exception_ptr> errors(threads);
  auto work = [&](unsigned t) {
    try {
      const std::size_t lo = N * t / threads;
      const std::size_t hi = N * (t + 1) / threads;
      auto& cols = blocks[t];
      cols.resize(hi - lo);
      for (std::size_t n = lo; n < hi; ++n) assemble_column(geom, g.position(n), table, pulse, apodize, cols[n - lo]);
    } catch (...) {
      errors[t] = std::current_exception();
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  SystemMatrix A;
  A.n_rows_ = M * K;
  A.n_samples_ = M;
  A.col_ptr_.reserve(N + 1);
  A.col_ptr_.push_back(0);
  A.col_norm2_.reserve(N);
  for (auto& block : blocks) {
    for (auto& col : block) {
      double norm2 = 0.0;
      for (double v : col.values) norm2 += v * v;
      const std::size_t base = A.values_.size();
      for (auto s : col.segments) {
        s.offset += base;
        A.segments_.push_back(s);
      }
      A.values_.insert(A.values_.end(), col.values.begin(), col.values.end());
      A.col_ptr_.push_back(A.segments_.size());
      A.col_norm2_.push_back(norm2);
      col = {};
    }
  }
  return A;
}

DirectArrival::DirectArrival(std::size_t n_pairs, std::size_t n_samples)
    : n_pairs_(n_pairs), n_samples_(n_samples), data_(n_pairs * n_samples, 0.0) {}

double DirectArrival::column_norm2(std::size_t k) const {
  double acc = 0.0;
  for (double v : column(k)) acc += v * v;
  return acc;
}

void DirectArrival::shift_column(std::size_t k, long lag) {
  if (lag == 0) return;
  auto col = column(k);
  const long M = static_cast<long>(n_samples_);
  std::vector<double> moved(n_samples_, 0.0);
  for (long m = 0; m < M; ++m) {
    const long src = m - lag;
    if (src >= 0 && src < M) moved[m] = col[src];
  }
  std::copy(moved.begin(), moved.end(), col.begin());
}

std::vector<double> DirectArrival::apply(std::span<const double> g) const {
  require(g.size() == n_pairs_, "D*g: gain vector size does not match");
  std::vector<double> out(n_pairs_ * n_samples_);
  for (std::size_t k = 0; k < n_pairs_; ++k) {
    auto col = column(k);
    for (std::size_t m = 0; m < n_samples_; ++m) out[k * n_samples_ + m] = g[k] * col[m];
  }
  return out;
}

DirectArrival build_direct_arrival(const ScanGeometry& geom, const ImpulseTable& table, const PulseModel& pulse) {
  const std::size_t M = pulse.n_samples;
  DirectArrival D(geom.n_pairs(), M);
  for (std::size_t k = 0; k < geom.n_pairs(); ++k) {
    const double tau = geom.direct_time(k, pulse.speed);
    if (!table.covers(tau)) fail(ErrorCode::OutOfRange, "direct arrival delay outside impulse table range");
    auto col = D.column(k);
    for (std::size_t m = 0; m < M; ++m) col[m] = -table(tau, static_cast<double>(m) / pulse.sampling_freq - tau);
  }
  return D;
}

}  // namespace unde
