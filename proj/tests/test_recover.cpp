#include <doctest.h>

#include <cmath>

#include "fdecnl/recover.hpp"
#include "fdecnl/rng.hpp"

using namespace fdecnl;
using namespace fdecnl::recover;

TEST_CASE("baseline_rank: counts and monotonicity") {
  spectra::SpectrumSample s;
  s.p = s.d = 3;
  s.eigenvalues = Vector(3);
  s.eigenvalues << 0.05, 0.2, 0.3;
  CHECK(baseline_rank(s, 0.1) == 2);
  CHECK(baseline_rank(s, 0.4) == 0);
  CHECK(baseline_rank(s, 0.01) == 3);

  double prev = 1e9;
  int last = 4;
  for (double delta : {0.01, 0.07, 0.25, 0.5}) {
    const int r = baseline_rank(s, delta);
    CHECK(r <= last);
    last = r;
    prev = delta;
  }
  (void)prev;
}

TEST_CASE("rank_from_signal: threshold count") {
  Vector a(4);
  a << 0.0, 1e-4, -0.5, 2e-3;
  CHECK(rank_from_signal(a, 1e-3) == 2);
  CHECK(rank_from_signal(Vector::Zero(6), 1e-3) == 0);
}

TEST_CASE("validation losses: sorting and spot values") {
  Vector b(2), bt(2);
  b << 1.0, 0.0;
  bt << 0.0, 1.0;
  CHECK(v_cw(b, bt) == 0.0);

  Vector a = Vector::Constant(3, 0.4);
  CHECK(v_spn(a, 0.15, a, 0.1) == doctest::Approx(0.05));

  Vector c(4), shifted(4);
  c << 0.1, -0.2, 0.5, 0.9;
  shifted = c.array() + 0.25;
  CHECK(v_cw(shifted, c) == doctest::Approx(0.25 * 2.0));  // |c| sqrt(p)

  // Triangle inequality on sorted vectors.
  Rng rng(201);
  for (int trial = 0; trial < 20; ++trial) {
    Vector x(5), y(5), z(5);
    for (int i = 0; i < 5; ++i) {
      x[i] = rng.uniform(-1, 1);
      y[i] = rng.uniform(-1, 1);
      z[i] = rng.uniform(-1, 1);
    }
    CHECK(v_cw(x, z) <= v_cw(x, y) + v_cw(y, z) + 1e-12);
  }
}

TEST_CASE("recover_rank: requires a positive penalty weight") {
  spectra::SpectrumSample s;
  s.p = s.d = 2;
  s.eigenvalues = Vector::Zero(2);
  optim::RunConfig cfg;
  cfg.n_iterations = 1;
  CHECK_THROWS_AS(recover_rank(s, cfg, 1e-3), std::invalid_argument);
}

TEST_CASE("recover_rank: pure noise shrinks to rank zero") {
  // d_true = 0 at sigma_true = 0.1: all eigenvalues sit in the noise bulk and
  // the penalty drives every coordinate below the threshold.
  auto [truth, sample] = spectra::sample_true_spn_experiment(30, 30, 0, 0.3, 0.1, 3);
  optim::RunConfig cfg;
  cfg.gamma = 0.1;
  cfg.xi = 1e-3;
  cfg.bound = 1.2;
  cfg.seed = 3;
  cfg.n_iterations = 400 * 30;
  const auto res = recover_rank(sample, cfg, 1e-3);
  CHECK(res.estimated_rank == 0);
  CHECK(res.a_hat.cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("recover_rank: smoke cell recovers the true rank") {
  optim::RunConfig cfg;
  cfg.gamma = 0.1;
  cfg.xi = 1e-3;
  cfg.bound = 1.2;
  cfg.n_iterations = 400 * 50;
  for (int seed : {0, 1}) {
    const auto cell = run_recovery_cell(50, 50, 10, 0.4, 0.1, 0.1, cfg, 1e-3, seed);
    CHECK(std::abs(cell.estimated_rank - 10) <= 2);
    CHECK(cell.runtime_seconds > 0.0);
    CHECK(cell.baseline >= 0);
  }
}

TEST_CASE("determination_gap: degenerate model has only quadrature error") {
  // theta = theta0 = 0 for the compound Wishart model: the sample spectrum is
  // exactly delta_0, so the empirical and deterministic references coincide.
  const Vector zero = Vector::Zero(20);
  loss::QuadratureConfig quad;
  fde::FixedPointConfig fp;
  const auto rep = determination_gap(zero, zero, Model::Cw, 0.1, 20, 20, 5, quad, fp);
  CHECK(std::abs(rep.gap) < 1e-3);
  CHECK(rep.quadrature_bound > 0.0);
}

TEST_CASE("determination_gap: invariant under permuting the candidate") {
  Rng rng(203);
  const int d = 15;
  Vector th0(d), th(d);
  for (int i = 0; i < d; ++i) th0[i] = rng.uniform(-1.0, 1.0);
  for (int i = 0; i < d; ++i) th[i] = rng.uniform(-1.0, 1.0);
  Vector th_perm = th.reverse();
  loss::QuadratureConfig quad;
  quad.points = 801;
  fde::FixedPointConfig fp;
  const auto a = determination_gap(th0, th, Model::Cw, 0.1, d, d, 7, quad, fp);
  const auto b = determination_gap(th0, th_perm, Model::Cw, 0.1, d, d, 7, quad, fp);
  CHECK(a.gap == doctest::Approx(b.gap).epsilon(1e-9));
}
