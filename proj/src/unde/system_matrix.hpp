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
#ifndef UNDE_SYSTEM_MATRIX_HPP
#define UNDE_SYSTEM_MATRIX_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "unde/geometry.hpp"
#include "unde/pulse.hpp"

namespace unde {

/// cos^2(theta_t) * cos^2(theta_r), angles measured from the downward normal
/// of each transducer of pair k. Points on or above the transducer plane get 0.
double apodization(const ScanGeometry& geom, const Vec3& nu, std::size_t k);

/// Smallest table range that covers every pixel delay and every direct
/// arrival delay of the given geometry.
double max_travel_time(const ScanGeometry& geom, const ImageGrid& grid, double speed);

/// Sparse forward operator A of size (M*K) x N.
///
/// Row (k, m) = k*M + m is sample m of channel k. Each column stores one
/// contiguous run of rows per channel: the samples with 0 <= t_m - tau_k < t0.
/// Immutable once built.
class SystemMatrix {
 public:
  struct Segment {
    std::uint32_t row_begin;
    std::uint32_t length;
    std::size_t offset;  // into values()
  };

  SystemMatrix() = default;

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return col_ptr_.empty() ? 0 : col_ptr_.size() - 1; }
  std::size_t n_samples() const { return n_samples_; }
  std::size_t n_pairs() const { return n_samples_ == 0 ? 0 : n_rows_ / n_samples_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const Segment> column(std::size_t n) const {
    return {segments_.data() + col_ptr_[n], segments_.data() + col_ptr_[n + 1]};
  }
  const double* values() const { return values_.data(); }
  /// ||A_{*n}||^2
  double column_norm2(std::size_t n) const { return col_norm2_[n]; }

  /// out += scale * A_{*n}
  void add_column(std::size_t n, double scale, std::span<double> out) const;
  /// A_{*n}^T v
  double dot_column(std::size_t n, std::span<const double> v) const;

  std::vector<double> apply(std::span<const double> x) const;
  std::vector<double> apply_transpose(std::span<const double> v) const;

  /// Debug dump, one "row col value" triplet per line.
  void write_triplets(std::ostream& os) const;

 private:
  friend SystemMatrix build_system_matrix(const ScanGeometry&, const ImageGrid&, const ImpulseTable&,
                                          const PulseModel&, bool, unsigned);
  std::size_t n_rows_ = 0;
  std::size_t n_samples_ = 0;
  std::vector<std::size_t> col_ptr_;
  std::vector<Segment> segments_;
  std::vector<double> values_;
  std::vector<double> col_norm2_;
};

/// A[(k, m), n] = h(tau_k(nu_n), t_m - tau_k(nu_n)) * phi_k(nu_n), phi = 1 when
/// `apodize` is false. Columns are assembled concurrently on `threads`
/// workers (0 = hardware concurrency) and merged in column order, so the
/// result does not depend on the thread count.
SystemMatrix build_system_matrix(const ScanGeometry& geom, const ImageGrid& grid, const ImpulseTable& table,
                                 const PulseModel& pulse, bool apodize, unsigned threads = 0);

/// Direct-arrival matrix D of size (M*K) x K. Column k is nonzero only in
/// channel k's rows, so it is stored as one dense M-sample template per
/// channel. Templates can be moved by an integer lag to absorb speed errors.
class DirectArrival {
 public:
  DirectArrival() = default;
  DirectArrival(std::size_t n_pairs, std::size_t n_samples);

  std::size_t n_pairs() const { return n_pairs_; }
  std::size_t n_samples() const { return n_samples_; }

  std::span<const double> column(std::size_t k) const { return {&data_[k * n_samples_], n_samples_}; }
  std::span<double> column(std::size_t k) { return {&data_[k * n_samples_], n_samples_}; }
  double column_norm2(std::size_t k) const;

  /// d_k(t) <- d_k(t - lag); samples moved past either end are dropped.
  void shift_column(std::size_t k, long lag);

  /// D g as a length M*K vector.
  std::vector<double> apply(std::span<const double> g) const;

 private:
  std::size_t n_pairs_ = 0;
  std::size_t n_samples_ = 0;
  std::vector<double> data_;
};

/// Column k holds -h(tau_k, t - tau_k) with tau_k = |r_i - r_j| / c and no
/// apodization factor.
DirectArrival build_direct_arrival(const ScanGeometry& geom, const ImpulseTable& table, const PulseModel& pulse);

}  // namespace unde

#endif  // UNDE_SYSTEM_MATRIX_HPP
