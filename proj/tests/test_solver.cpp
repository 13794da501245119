#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "unde/common.hpp"
#include "unde/simulator.hpp"
#include "unde/solver.hpp"

using namespace unde;
using support::Fixture;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

// Lag maximizing sum_t y(t) d(t - l), scanned independently of the library.
long brute_shift(const std::vector<double>& y, const std::vector<double>& d, long window) {
  long best = 0;
  long double best_v = -INFINITY;
  const long M = static_cast<long>(y.size());
  for (long l = -window; l <= window; ++l) {
    long double v = 0.0L;
    for (long t = 0; t < M; ++t) {
      const long u = t - l;
      if (u >= 0 && u < M) v += static_cast<long double>(y[t]) * d[u];
    }
    if (v > best_v) {
      best_v = v;
      best = l;
    }
  }
  return best;
}

std::vector<double> delayed(std::span<const double> d, long lag) {
  std::vector<double> out(d.size(), 0.0);
  for (long t = 0; t < static_cast<long>(d.size()); ++t) {
    const long u = t - lag;
    if (u >= 0 && u < static_cast<long>(d.size())) out[t] = d[u];
  }
  return out;
}

std::vector<double> column_of(const Fixture& f, std::size_t n) {
  std::vector<double> e(f.grid.size(), 0.0);
  e[n] = 1.0;
  return support::dense_forward(f, true, e);
}

// Solves G x = b by Gaussian elimination with partial pivoting.
std::vector<double> dense_solve(std::vector<long double> G, std::vector<long double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::fabs(G[r * n + c]) > std::fabs(G[piv * n + c])) piv = r;
    for (std::size_t j = 0; j < n; ++j) std::swap(G[c * n + j], G[piv * n + j]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const long double f = G[r * n + c] / G[c * n + c];
      for (std::size_t j = c; j < n; ++j) G[r * n + j] -= f * G[c * n + j];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    long double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= G[i * n + j] * x[j];
    x[i] = static_cast<double>(s / G[i * n + i]);
  }
  return x;
}

std::vector<double> phantom_data(const Fixture& f, std::vector<double>& x, double snr, std::uint64_t seed) {
  x.assign(f.grid.size(), 0.0);
  x[f.grid.index(2, 4)] = 1.0;
  x[f.grid.index(5, 7)] = 0.6;
  x[f.grid.index(6, 2)] = 0.8;
  SynthesisOptions so;
  so.snr = snr;
  so.seed = seed;
  return synthesize(x, f.A, f.D, so);
}

PriorParams test_prior() {
  PriorParams p;
  p.sigma_g = 0.2;
  p.sigma_e = 0.5;
  p.c_max = 2.0;
  return p;
}

}  // namespace

TEST_CASE("shift estimation") {
  const Fixture f = support::make_fixture();
  const auto d0 = f.D.column(0);
  const std::vector<double> d(d0.begin(), d0.end());

  CHECK(estimate_shift(d, d, 3) == 0);
  CHECK(estimate_shift(delayed(d, 2), d, 3) == 2);
  CHECK(estimate_shift(delayed(d, -3), d, 3) == -3);
  CHECK(estimate_shift(std::vector<double>(d.size(), 0.0), d, 3) == 0);
  CHECK_THROWS_AS(estimate_shift(d, d, -1), Error);

  SUBCASE("matches exhaustive search on random channels") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto y = support::gaussian(64, 1.0, seed);
      const auto t = support::gaussian(64, 1.0, 1000 + seed);
      for (long w : {0L, 1L, 3L, 7L}) {
        const long l = estimate_shift(y, t, w);
        CHECK(l == brute_shift(y, t, w));
        CHECK(std::labs(l) <= w);
      }
    }
  }

  SUBCASE("recovers a two-sample delay at SNR 10") {
    const auto y0 = delayed(d, 2);
    const double power = support::dot(y0, y0);
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      auto w = support::gaussian(y0.size(), 1.0, 77 + seed);
      const double scale = std::sqrt(power / (10.0 * support::dot(w, w)));
      std::vector<double> y = y0;
      for (std::size_t i = 0; i < y.size(); ++i) y[i] += scale * w[i];
      hits += estimate_shift(y, d, 3) == 2;
    }
    CHECK(hits >= 95);
  }
}

TEST_CASE("gain solve") {
  const Fixture f = support::make_fixture();
  const std::size_t K = f.D.n_pairs();
  const std::size_t M = f.D.n_samples();
  const std::vector<double> zero(f.grid.size(), 0.0);

  SUBCASE("exact recovery") {
    const std::vector<double> g_true = {1.0, -0.5, 2.25, 0.0, 3.5, -1.75};
    const auto y = f.D.apply(g_true);
    const auto g = solve_gains(y, f.A, zero, f.D);
    for (std::size_t k = 0; k < K; ++k) CHECK(g[k] == doctest::Approx(g_true[k]).epsilon(1e-14).scale(1.0));
  }

  SUBCASE("zero template gives zero gain") {
    DirectArrival D = f.D;
    std::fill(D.column(2).begin(), D.column(2).end(), 0.0);
    const auto y = support::gaussian(M * K, 1.0, 3);
    const auto g = solve_gains(y, f.A, zero, D);
    CHECK(g[2] == 0.0);
    CHECK(g[1] != 0.0);
  }

  SUBCASE("matches the dense normal equations and is orthogonal") {
    const auto y = support::gaussian(M * K, 1.0, 5);
    std::vector<double> x(f.grid.size());
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double& v : x) v = u(rng);
    const auto g = solve_gains(y, f.A, x, f.D);

    const auto ax = support::dense_forward(f, true, x);
    std::vector<long double> G(K * K, 0.0L), b(K, 0.0L);
    for (std::size_t i = 0; i < K; ++i) {
      for (std::size_t row = 0; row < M * K; ++row) {
        const double di = row / M == i ? f.D.column(i)[row % M] : 0.0;
        if (di == 0.0) continue;
        b[i] += static_cast<long double>(di) * (y[row] - ax[row]);
        for (std::size_t j = 0; j < K; ++j) {
          const double dj = row / M == j ? f.D.column(j)[row % M] : 0.0;
          G[i * K + j] += static_cast<long double>(di) * dj;
        }
      }
    }
    const auto g_ref = dense_solve(G, b);
    for (std::size_t k = 0; k < K; ++k) CHECK(g[k] == doctest::Approx(g_ref[k]).epsilon(1e-10).scale(1.0));

    const auto dg = f.D.apply(g);
    const double ynorm = support::norm2(y);
    for (std::size_t k = 0; k < K; ++k) {
      double acc = 0.0;
      for (std::size_t m = 0; m < M; ++m) acc += f.D.column(k)[m] * (y[k * M + m] - ax[k * M + m] - dg[k * M + m]);
      CHECK(std::abs(acc) < 1e-8 * ynorm);
    }
  }
}

TEST_CASE("pixel updates") {
  const Fixture f = support::make_fixture();
  std::vector<double> x_true;
  const auto y = phantom_data(f, x_true, 30.0, 11);

  SUBCASE("scalar least squares without a prior") {
    PriorParams p;
    p.sigma_e = kInf;
    const PriorModel prior(f.grid, p, false);
    SolverOptions opt;
    opt.model_direct_arrival = false;
    opt.sigma = 0.3;
    const std::size_t n = f.grid.index(3, 3);
    const auto a = column_of(f, n);
    IcdSolver s(f.A, nullptr, prior, f.grid, {RecordPlacement{}}, {y}, opt);
    s.initialize();
    const double expect = std::max(0.0, support::dot(a, y) / support::dot(a, a));
    CHECK(s.update_pixel(n) == doctest::Approx(expect).epsilon(1e-10).scale(1.0));
    for (std::size_t i = 0; i < f.grid.size(); ++i)
      if (i != n) CHECK(s.image()[i] == 0.0);
  }

  SUBCASE("no update increases the exact cost") {
    const PriorModel prior(f.grid, test_prior());
    SolverOptions opt;
    opt.seed = 3;
    IcdSolver s(f.A, &f.D, prior, f.grid, {RecordPlacement{}}, {y}, opt);
    s.initialize();
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.5);
    for (std::size_t i = 0; i < f.grid.size(); ++i) s.set_pixel(i, u(rng) < 0.5 ? 0.0 : u(rng));
    s.solve_all_gains();
    const auto& D = s.templates(0);
    std::uniform_int_distribution<std::size_t> pick(0, f.grid.size() - 1);
    auto g = std::vector<double>(s.gains(0).begin(), s.gains(0).end());
    double before = map_cost(s.image(), g, y, f.A, &D, prior, s.sigma()).total;
    for (int i = 0; i < 200; ++i) {
      s.update_pixel(pick(rng));
      const double after = map_cost(s.image(), g, y, f.A, &D, prior, s.sigma()).total;
      CHECK(after <= before * (1 + 1e-12));
      before = after;
    }
  }

  SUBCASE("converged update matches a 1D grid search of the exact cost") {
    const PriorModel prior(f.grid, test_prior());
    SolverOptions opt;
    opt.sigma = 0.05;
    IcdSolver s(f.A, &f.D, prior, f.grid, {RecordPlacement{}}, {y}, opt);
    s.initialize();
    for (int it = 0; it < 3; ++it) s.iterate();
    const double sigma = s.sigma();
    for (std::size_t n : {f.grid.index(2, 4), f.grid.index(5, 7), f.grid.index(0, 0), f.grid.index(4, 5)}) {
      const double x0 = s.image()[n];
      const auto a = column_of(f, n);
      std::vector<double> e0(s.residual(0).begin(), s.residual(0).end());
      for (std::size_t i = 0; i < e0.size(); ++i) e0[i] += a[i] * x0;  // residual with x_n = 0

      auto cost = [&](double v) {
        long double data = 0.0L;
        for (std::size_t i = 0; i < e0.size(); ++i) {
          const long double r = e0[i] - a[i] * v;
          data += r * r;
        }
        long double c = data / (2.0L * sigma * sigma) + v * prior.inv_sigma_e(n);
        for (const auto& [r, b] : prior.stencil().neighbors(n))
          c += b * qggmrf_rho(v - s.image()[r], prior.sigma_g(n, r), prior.params());
        return c;
      };
      const double step = 1e-4;
      double best_u = 0.0;
      long double best_c = cost(0.0);
      for (int i = 1; i <= 20000; ++i) {
        const double v = i * step;
        const long double c = cost(v);
        if (c < best_c) {
          best_c = c;
          best_u = v;
        }
      }
      double v = x0;
      for (int i = 0; i < 500; ++i) v = s.update_pixel(n);
      CHECK(std::abs(v - best_u) <= step);
    }
  }
}

TEST_CASE("mbir reconstruction") {
  const Fixture f = support::make_fixture();

  SUBCASE("zero data") {
    const std::vector<double> y(f.A.n_rows(), 0.0);
    const PriorModel prior(f.grid, PriorParams{});
    const auto rec = mbir_reconstruct(y, f.A, f.D, prior, f.grid, SolverOptions{});
    CHECK(std::all_of(rec.x.begin(), rec.x.end(), [](double v) { return v == 0.0; }));
    CHECK(std::all_of(rec.gains[0].begin(), rec.gains[0].end(), [](double v) { return v == 0.0; }));
  }

  SUBCASE("non-finite data is rejected") {
    std::vector<double> y(f.A.n_rows(), 0.0);
    y[17] = std::nan("");
    const PriorModel prior(f.grid, PriorParams{});
    CHECK_THROWS_AS(mbir_reconstruct(y, f.A, f.D, prior, f.grid, SolverOptions{}), Error);
  }

  SUBCASE("recovers a sparse phantom at SNR 100") {
    std::vector<double> x_true;
    const auto y = phantom_data(f, x_true, 100.0, 2);
    PriorParams p;
    p.sigma_g = 0.05;
    p.sigma_e = 0.1;
    p.c_max = 1.0;
    const PriorModel prior(f.grid, p);
    SolverOptions opt;
    opt.tolerance = 0.0;
    const auto rec = mbir_reconstruct(y, f.A, f.D, prior, f.grid, opt);
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < x_true.size(); ++i) {
      err += (rec.x[i] - x_true[i]) * (rec.x[i] - x_true[i]);
      ref += x_true[i] * x_true[i];
    }
    CHECK(std::sqrt(err / ref) < 0.1);
    REQUIRE(rec.history.size() == 31);
    for (std::size_t i = 1; i < rec.history.size(); ++i)
      CHECK(rec.history[i].total <= rec.history[i - 1].total * (1 + 1e-9));
  }

  SUBCASE("bookkeeping, gain orthogonality and positivity at every stage") {
    std::vector<double> x_true;
    const auto y = phantom_data(f, x_true, 10.0, 4);
    const PriorModel prior(f.grid, test_prior());
    SolverOptions opt;
    opt.max_iterations = 10;
    opt.tolerance = 0.0;
    IcdSolver s(f.A, &f.D, prior, f.grid, {RecordPlacement{}}, {y}, opt);
    const double ynorm = support::norm2(y);
    const std::size_t M = f.D.n_samples();
    int passes = 0, gain_solves = 0;
    s.set_observer([&](IcdSolver::Stage stage, const IcdSolver& st) {
      const auto& x = st.image();
      CHECK(std::all_of(x.begin(), x.end(), [](double v) { return v >= 0.0; }));
      const auto ax = support::dense_forward(f, true, x);
      const auto dg = st.templates(0).apply(st.gains(0));
      double worst = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) worst = std::max(worst, std::abs(y[i] - ax[i] - dg[i] - st.residual(0)[i]));
      CHECK(worst < 1e-8 * ynorm);
      if (stage == IcdSolver::Stage::GainSolve) {
        ++gain_solves;
        for (std::size_t k = 0; k < f.D.n_pairs(); ++k) {
          double acc = 0.0;
          for (std::size_t m = 0; m < M; ++m) acc += st.templates(0).column(k)[m] * st.residual(0)[k * M + m];
          CHECK(std::abs(acc) < 1e-8 * ynorm);
        }
      } else {
        ++passes;
      }
    });
    s.run();
    CHECK(passes == 10);
    CHECK(gain_solves == 11);
  }

  SUBCASE("fixed point") {
    std::vector<double> x_true;
    const auto y = phantom_data(f, x_true, 30.0, 8);
    const PriorModel prior(f.grid, test_prior());
    SolverOptions opt;
    opt.max_iterations = 400;
    opt.tolerance = 0.0;
    opt.sigma = 0.05;
    IcdSolver s(f.A, &f.D, prior, f.grid, {RecordPlacement{}}, {y}, opt);
    s.run();
    const auto before = s.image();
    s.iterate();
    const double peak = *std::max_element(before.begin(), before.end());
    CHECK(support::max_abs_diff(before, s.image()) < 1e-8 * peak);
  }

  SUBCASE("direct-arrival shift is absorbed") {
    // Echoes arrive after the shifted templates end, so the only samples
    // that differ between lags are the ones the templates move through.
    support::FixtureSpec spec;
    spec.rows = 20;
    const Fixture f = support::make_fixture(spec);
    std::vector<double> x(f.grid.size(), 0.0);
    x[f.grid.index(3, 17)] = 1.0;
    x[f.grid.index(6, 19)] = 0.7;
    const std::vector<double> g_true = {1.0, 0.8, 1.2, 0.9, 1.1, 1.0};
    const auto ax = f.A.apply(x);
    const PriorModel prior(f.grid, test_prior());
    SolverOptions opt;
    opt.sigma = 0.05;
    opt.tolerance = 0.0;
    opt.max_iterations = 10;

    auto solve_with_lag = [&](long lag) {
      DirectArrival Ds = f.D;
      for (std::size_t k = 0; k < Ds.n_pairs(); ++k) Ds.shift_column(k, lag);
      auto y = Ds.apply(g_true);
      for (std::size_t i = 0; i < y.size(); ++i) y[i] += ax[i];
      return mbir_reconstruct(y, f.A, f.D, prior, f.grid, opt);
    };
    const auto base = solve_with_lag(0);
    for (long lag : {-2L, 1L, 3L}) {
      const auto r = solve_with_lag(lag);
      for (long s : r.shifts[0]) CHECK(s == lag);
      CHECK(support::max_abs_diff(base.x, r.x) < 1e-12);
      CHECK(support::max_abs_diff(base.gains[0], r.gains[0]) < 1e-12);
    }
  }
}

TEST_CASE("l1 baseline") {
  SUBCASE("orthogonal columns give clipped least squares") {
    support::FixtureSpec spec;
    spec.cols = 1;
    spec.rows = 3;
    spec.pitch = 0.3;
    const Fixture f = support::make_fixture(spec);
    std::vector<std::vector<double>> cols;
    for (std::size_t n = 0; n < 3; ++n) cols.push_back(column_of(f, n));
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = i + 1; j < 3; ++j) REQUIRE(support::dot(cols[i], cols[j]) == 0.0);

    auto y = support::gaussian(f.A.n_rows(), 0.1, 9);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += 0.8 * cols[0][i] - 0.5 * cols[2][i];
    PriorParams p;
    p.sigma_e = kInf;
    SolverOptions opt;
    opt.sigma = 1.0;
    opt.max_iterations = 2;
    const auto rec = l1_reconstruct(y, f.A, p, f.grid, opt);
    for (std::size_t n = 0; n < 3; ++n) {
      const double expect = std::max(0.0, support::dot(cols[n], y) / support::dot(cols[n], cols[n]));
      CHECK(rec.x[n] == doctest::Approx(expect).epsilon(1e-10).scale(1.0));
    }
  }

  SUBCASE("l1 norm shrinks with the exponential scale") {
    const Fixture f = support::make_fixture();
    std::vector<double> x_true;
    const auto y = phantom_data(f, x_true, 10.0, 12);
    SolverOptions opt;
    opt.sigma = 0.1;
    opt.tolerance = 0.0;
    opt.max_iterations = 300;
    double prev = kInf;
    for (double se : {kInf, 100.0, 10.0, 1.0, 0.3, 0.1, 0.03}) {
      PriorParams p;
      p.sigma_e = se;
      p.c_max = 1.0;
      const auto rec = l1_reconstruct(y, f.A, p, f.grid, opt);
      for (std::size_t i = 1; i < rec.history.size(); ++i)
        CHECK(rec.history[i].total <= rec.history[i - 1].total * (1 + 1e-9));
      const double l1 = std::accumulate(rec.x.begin(), rec.x.end(), 0.0);
      CHECK(l1 <= prev * (1 + 1e-6));
      prev = l1;
    }
  }
}

TEST_CASE("noise scale estimate") {
  support::FixtureSpec spec;
  spec.transducers = 10;
  spec.samples = 409;
  spec.cols = 2;
  spec.rows = 2;
  const Fixture f = support::make_fixture(spec);
  const std::size_t K = f.D.n_pairs(), M = f.D.n_samples();
  REQUIRE(M * K >= 10000);
  std::vector<double> g(K);
  for (std::size_t k = 0; k < K; ++k) g[k] = 0.5 + 0.01 * static_cast<double>(k);
  const auto clean = f.D.apply(g);

  CHECK(estimate_noise_sigma(clean, &f.D, 3) == std::numeric_limits<double>::epsilon());
  CHECK(estimate_noise_sigma(std::vector<double>(50, 2.0), nullptr, 0) == std::numeric_limits<double>::epsilon());

  for (double s : {0.01, 0.2, 3.0}) {
    const auto w = support::gaussian(M * K, s, 100 + static_cast<std::uint64_t>(s * 100));
    auto y = clean;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += w[i];
    const double est = estimate_noise_sigma(y, &f.D, 3);
    CHECK(std::abs(est - s) < 0.1 * s);

    // Permute the channels and their templates together.
    std::vector<std::size_t> perm(K);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), std::mt19937_64(5));
    DirectArrival Dp(K, M);
    std::vector<double> yp(y.size());
    for (std::size_t k = 0; k < K; ++k) {
      std::copy(f.D.column(perm[k]).begin(), f.D.column(perm[k]).end(), Dp.column(k).begin());
      std::copy(y.begin() + perm[k] * M, y.begin() + (perm[k] + 1) * M, yp.begin() + k * M);
    }
    CHECK(estimate_noise_sigma(yp, &Dp, 3) == est);
  }
}

TEST_CASE("map cost") {
  const Fixture f = support::make_fixture();
  const PriorModel prior(f.grid, test_prior());
  const auto y = support::gaussian(f.A.n_rows(), 1.0, 31);
  const std::vector<double> zero(f.grid.size(), 0.0);
  const std::vector<double> g0(f.D.n_pairs(), 0.0);

  const auto c0 = map_cost(zero, g0, y, f.A, &f.D, prior, 0.7);
  CHECK(c0.data == doctest::Approx(support::dot(y, y) / (2 * 0.49)).epsilon(1e-13));
  CHECK(c0.prior == 0.0);

  std::vector<double> x(f.grid.size());
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (double& v : x) v = u(rng);
  const std::vector<double> g = {0.3, -0.2, 1.0, 0.0, 0.5, 2.0};
  const auto c = map_cost(x, g, y, f.A, &f.D, prior, 0.7);

  auto ys = y;
  for (double& v : ys) v += 0.25;
  const auto cs = map_cost(x, g, ys, f.A, &f.D, prior, 0.7);
  CHECK(cs.prior == c.prior);
  CHECK(cs.data != c.data);

  const auto ax = support::dense_forward(f, true, x);
  const auto dg = f.D.apply(g);
  long double ss = 0.0L;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const long double r = y[i] - ax[i] - dg[i];
    ss += r * r;
  }
  CHECK(c.data == doctest::Approx(static_cast<double>(ss / (2.0L * 0.49L))).epsilon(1e-11));
  CHECK(c.total == doctest::Approx(c.data + c.prior).epsilon(1e-15));

  x[3] = -0.1;
  CHECK_THROWS_AS(map_cost(x, g, y, f.A, &f.D, prior, 0.7), Error);
}
