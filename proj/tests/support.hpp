// Shared fixtures and reference implementations for the tests. The oracles
// here deliberately avoid the library's fast paths (FFT, segment storage,
// residual bookkeeping).
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

#include "unde/geometry.hpp"
#include "unde/pulse.hpp"
#include "unde/system_matrix.hpp"

namespace support {

using unde::Vec3;

struct Fixture {
  unde::PulseModel pulse;
  unde::ScanGeometry geom;
  unde::ImageGrid grid;
  unde::ImpulseTable table;
  unde::SystemMatrix A;
  unde::DirectArrival D;
};

struct FixtureSpec {
  std::size_t transducers = 4;
  double spacing = 0.04;
  std::size_t cols = 8;
  std::size_t rows = 10;
  double pitch = 0.02;
  bool apodize = true;
  std::size_t samples = 200;
  std::size_t oversample = 8;
};

inline Fixture make_fixture(const FixtureSpec& s = {}) {
  unde::PulseModel pulse;
  pulse.n_samples = s.samples;
  pulse.table_oversample = s.oversample;
  auto geom = unde::ScanGeometry::linear_array(s.transducers, s.spacing);
  auto grid = unde::ImageGrid::centered(s.cols, s.rows, s.pitch);
  unde::ImpulseTable table(pulse, 0.0, unde::max_travel_time(geom, grid, pulse.speed));
  auto A = unde::build_system_matrix(geom, grid, table, pulse, s.apodize, 1);
  auto D = unde::build_direct_arrival(geom, table, pulse);
  return Fixture{pulse, std::move(geom), grid, std::move(table), std::move(A), std::move(D)};
}

/// O(N^2) DFT with exactly reduced twiddle angles. Inverse is scaled by 1/N.
inline std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& in, bool inverse = false) {
  const std::size_t n = in.size();
  std::vector<std::complex<double>> out(n);
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<long double> acc = 0.0L;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t idx = (j * k) % n;
      const long double ang = sign * 2.0L * std::numbers::pi_v<long double> * idx / n;
      acc += std::complex<long double>(in[j].real(), in[j].imag()) *
             std::complex<long double>(std::cos(ang), std::sin(ang));
    }
    out[k] = {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
    if (inverse) out[k] /= static_cast<double>(n);
  }
  return out;
}

/// cos^2 of the angle between the downward normal at `r` and `nu`, from
/// explicit angles.
inline double cos2_angle(const Vec3& r, const Vec3& nu) {
  const double dx = nu.x - r.x, dy = nu.y - r.y, dz = nu.z - r.z;
  if (dz <= 0.0) return 0.0;
  const double theta = std::atan2(std::hypot(dx, dy), dz);
  const double c = std::cos(theta);
  return c * c;
}

/// Dense MK x N copy of A built from per-entry table lookups.
inline std::vector<double> dense_forward(const Fixture& f, bool apodize, const std::vector<double>& x) {
  const std::size_t M = f.pulse.n_samples;
  const std::size_t K = f.geom.n_pairs();
  std::vector<double> y(M * K, 0.0);
  for (std::size_t n = 0; n < x.size(); ++n) {
    if (x[n] == 0.0) continue;
    const Vec3 nu = f.grid.position(n);
    for (std::size_t k = 0; k < K; ++k) {
      const Vec3 ri = f.geom.transmitter(k), rj = f.geom.receiver(k);
      const double tau =
          (std::hypot(nu.x - ri.x, nu.y - ri.y, nu.z - ri.z) + std::hypot(nu.x - rj.x, nu.y - rj.y, nu.z - rj.z)) /
          f.pulse.speed;
      const double phi = apodize ? cos2_angle(ri, nu) * cos2_angle(rj, nu) : 1.0;
      for (std::size_t m = 0; m < M; ++m)
        y[k * M + m] += x[n] * phi * f.table(tau, static_cast<double>(m) / f.pulse.sampling_freq - tau);
    }
  }
  return y;
}

inline std::vector<double> gaussian(std::size_t n, double s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, s);
  std::vector<double> v(n);
  for (double& x : v) x = nd(rng);
  return v;
}

inline double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return static_cast<double>(s);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace support
