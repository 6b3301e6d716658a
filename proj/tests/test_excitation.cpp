#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "kspec/excitation.hpp"
#include "kspec/plants.hpp"
#include "oracles.hpp"

using namespace kspec;

namespace {

const double kPi = 3.14159265358979323846;

Signal sinusoid(std::size_t t_len, double cycles, double phase = 0.0) {
  Signal u(t_len);
  for (std::size_t t = 0; t < t_len; ++t) {
    u[t] = std::sin(2.0 * kPi * cycles * static_cast<double>(t) /
                        static_cast<double>(t_len) +
                    phase);
  }
  return u;
}

Signal white_noise(std::size_t t_len, Rng& rng) {
  Signal u(t_len);
  for (double& v : u) v = rng.gaussian();
  return u;
}

}  // namespace

TEST_CASE("autocovariance: constant signal") {
  const auto cov = autocovariance({5, 5, 5, 5}, 2);
  CHECK(cov.mean == doctest::Approx(5.0));
  REQUIRE(cov.r.size() == 3);
  for (double r : cov.r) CHECK(r == doctest::Approx(0.0).scale(1));
}

TEST_CASE("autocovariance: full-period sinusoid has r(0) = 1/2") {
  const auto cov = autocovariance(sinusoid(1000, 3.0), 0);
  CHECK(cov.r[0] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("autocovariance: white noise") {
  Rng rng(77);
  const auto cov = autocovariance(white_noise(100000, rng), 5);
  CHECK(std::abs(cov.r[0] - 1.0) < 0.05);
  for (std::size_t l = 1; l < cov.r.size(); ++l) {
    CHECK(std::abs(cov.r[l]) < 0.05);
  }
}

TEST_CASE("autocovariance: lag bound and r(0) dominance") {
  CHECK_THROWS_AS(autocovariance({1, 2, 3}, 3), LagTooLarge);
  Rng rng(5);
  const auto cov = autocovariance(oracles::random_signal(500, rng), 20);
  for (double r : cov.r) CHECK(std::abs(r) <= cov.r[0] + 1e-9);
}

// The truncated finite-sample covariance carries an O(r(0)*l/T) bias, so the
// eigenvalue cutoff for "theoretical" PE orders has to sit above that floor.
const double kPeTol = 1e-2;

TEST_CASE("pe_order: single sinusoid is exciting of order two") {
  CHECK(pe_order(sinusoid(1000, 230.0), 10, kPeTol) == 2);
}

TEST_CASE("pe_order: sum of three sinusoids gives order six") {
  Signal u = sinusoid(10000, 600.0);
  const Signal b = sinusoid(10000, 1700.0, 0.7);
  const Signal c = sinusoid(10000, 4100.0, 1.9);
  for (std::size_t t = 0; t < u.size(); ++t) u[t] += b[t] + c[t];
  CHECK(pe_order(u, 12, kPeTol) == 6);
}

TEST_CASE("pe_order: constant signal fails at every order") {
  CHECK(pe_order(Signal(100, 3.0), 5) == 0);
}

TEST_CASE("pe_order: white noise reaches the cap") {
  Rng rng(13);
  CHECK(pe_order(white_noise(10000, rng), 20) == 20);
}

TEST_CASE("pe_order is monotone in the tested order") {
  const Signal u = sinusoid(800, 170.0);
  const int full = pe_order(u, 10, kPeTol);
  for (int cap = 1; cap <= 10; ++cap) {
    CHECK(pe_order(u, cap, kPeTol) == std::min(cap, full));
  }
}

TEST_CASE("pe_matrix is symmetric Toeplitz") {
  Rng rng(21);
  const auto cov = autocovariance(oracles::random_signal(300, rng), 7);
  const Eigen::MatrixXd m = pe_matrix(cov, 6);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      CHECK(m(i, j) == m(j, i));
      CHECK(m(i, j) == cov.r[static_cast<std::size_t>(std::abs(i - j))]);
    }
  }
}

TEST_CASE("estimate_fir_ls: recovers a 2-tap filter from white noise") {
  Rng rng(33);
  const Signal u = white_noise(500, rng);
  FirCoefficients truth;
  truth.theta = {0.0, 1.0, 2.0};
  const Signal y = fir_convolve(truth, u);
  const FirLsResult res = estimate_fir_ls(u, y, 2);
  CHECK(res.coeffs.theta[1] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(res.coeffs.theta[2] == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(res.residual_norm < 1e-8);
}

TEST_CASE("estimate_fir_ls: constant input is rank deficient") {
  CHECK_THROWS_AS(estimate_fir_ls(Signal(100, 1.0), Signal(100, 3.0), 2),
                  RankDeficient);
}

TEST_CASE("estimate_fir_ls: input validation") {
  CHECK_THROWS_AS(estimate_fir_ls({1, 2}, {1, 2, 3}, 1), LengthMismatch);
  CHECK_THROWS_AS(estimate_fir_ls({1, 2, 3, 4}, {1, 2, 3, 4}, 2),
                  DimensionMismatch);
}

TEST_CASE("estimate_fir_ls: recovers the cubic plant's 8 FIR taps") {
  // noiseless output of the 8-tap block driven by its internal nonlinearity
  Rng rng(55);
  const Signal u = white_noise(4000, rng);
  Signal v(u.size());
  for (std::size_t t = 0; t < u.size(); ++t) {
    v[t] = u[t] + 3.0 * u[t] * u[t] + 2.0 * u[t] * u[t] * u[t];
  }
  NoiseConfig noiseless{0.0, 0};
  const Signal y = hammerstein_response(u, noiseless);
  const std::vector<double> truth = {1, 2, 0.3, 4, 1, 1, 1, 0.5};
  const FirLsResult res = estimate_fir_ls(v, y, 8);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    CHECK(res.coeffs.theta[i + 1] == doctest::Approx(truth[i]).epsilon(1e-6));
  }
}

TEST_CASE("fim_fir_time: interior unit impulse gives I/sigma") {
  // every regressor column sees the impulse exactly once
  Signal u(200, 0.0);
  u[100] = 1.0;
  const double sigma = 0.25;
  const Fim f = fim_fir_time(u, 2, sigma);
  CHECK(f.M(0, 0) == doctest::Approx(1.0 / sigma));
  CHECK(f.M(1, 1) == doctest::Approx(1.0 / sigma));
  CHECK(f.M(0, 1) == doctest::Approx(0.0).scale(1));
  CHECK(a_optimality(f) == doctest::Approx(2.0 / sigma));
}

TEST_CASE("fim_fir_time: quadratic in u, inverse in sigma") {
  Rng rng(61);
  const Signal u = white_noise(300, rng);
  Signal u2(u);
  for (double& v : u2) v *= 2.0;
  const Fim base = fim_fir_time(u, 4, 1.0);
  CHECK(a_optimality(fim_fir_time(u2, 4, 1.0)) ==
        doctest::Approx(4.0 * a_optimality(base)).epsilon(1e-12));
  CHECK(a_optimality(fim_fir_time(u, 4, 2.0)) ==
        doctest::Approx(0.5 * a_optimality(base)).epsilon(1e-12));
  CHECK_THROWS_AS(fim_fir_time(u, 4, 0.0), ConfigError);
}

TEST_CASE("fim_fir_freq: flat spectrum is proportional to identity") {
  Spectrum sp;
  sp.source_length = 64;
  sp.magnitudes.assign(64, 3.0);
  const Fim f = fim_fir_freq(sp, 4, 1.0);
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 4; ++k) {
      if (i == k) {
        CHECK(f.M(i, k) == doctest::Approx(9.0).epsilon(1e-9));
      } else {
        CHECK(f.M(i, k) == doctest::Approx(0.0).scale(10).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("fim_fir_freq: DC-only spectrum gives a rank-1 all-equal matrix") {
  Spectrum sp;
  sp.source_length = 32;
  sp.magnitudes.assign(32, 0.0);
  sp.magnitudes[0] = 4.0;
  const Fim f = fim_fir_freq(sp, 3, 1.0);
  const double expect = 16.0 / 32.0;
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) {
      CHECK(f.M(i, k) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f.M);
  CHECK(es.eigenvalues()[0] == doctest::Approx(0.0).scale(1).epsilon(1e-10));
  CHECK(es.eigenvalues()[1] == doctest::Approx(0.0).scale(1).epsilon(1e-10));
}

TEST_CASE("time and frequency FIMs agree for long white noise") {
  Rng rng(71);
  const Signal u = white_noise(4096, rng);
  const Fim ft = fim_fir_time(u, 8, 1.0);
  const Fim ff = fim_fir_freq(dft_magnitudes(u), 8, 1.0);
  CHECK(std::abs(a_optimality(ft) - a_optimality(ff)) <
        0.01 * std::abs(a_optimality(ft)));
  const double scale = ft.M.cwiseAbs().maxCoeff();
  for (int i = 0; i < 8; ++i) {
    for (int k = 0; k < 8; ++k) {
      CHECK(std::abs(ft.M(i, k) - ff.M(i, k)) < 0.01 * scale);
    }
  }
}

TEST_CASE("a_optimality: identity trace") {
  Fim f;
  f.M = Eigen::MatrixXd::Identity(2, 2);
  CHECK(a_optimality(f) == doctest::Approx(2.0));
}

TEST_CASE("gen_multisine: norm, bin count, determinism") {
  const auto res = gen_multisine(1, 100, 100.0, 9, /*integer_bins=*/true);
  CHECK(l2_norm(res.signal) == doctest::Approx(100.0).epsilon(1e-9));

  const Spectrum sp = dft_magnitudes(res.signal);
  int live = 0;
  for (double m : sp.magnitudes) {
    if (m > 1e-6 * 100.0) ++live;
  }
  CHECK(live == 2);  // bin and its conjugate

  const auto again = gen_multisine(1, 100, 100.0, 9, true);
  CHECK(res.signal == again.signal);
}

TEST_CASE("gen_multisine: three integer bins give PE order six") {
  const auto res = gen_multisine(3, 2000, 100.0, 11, true);
  std::set<double> bins(res.spec.frequencies.begin(),
                        res.spec.frequencies.end());
  CHECK(bins.size() == 3);
  CHECK(pe_order(res.signal, 10, 2e-3) == 6);
}

TEST_CASE("gen_multisine: continuous mode matches its rendered spec") {
  const auto res = gen_multisine(5, 500, 100.0, 123);
  CHECK(l2_norm(res.signal) == doctest::Approx(100.0).epsilon(1e-9));
  for (double w : res.spec.frequencies) {
    CHECK(w >= 0.0);
    CHECK(w <= 250.0);
  }
  CHECK(render_multisine(res.spec) == res.signal);

  const MultisineSpec round = multisine_from_json(to_json(res.spec));
  CHECK(render_multisine(round) == res.signal);
}

TEST_CASE("gen_multisine: argument validation") {
  CHECK_THROWS_AS(gen_multisine(0, 100, 100.0, 1), ConfigError);
  CHECK_THROWS_AS(gen_multisine(1, 1, 100.0, 1), ConfigError);
}

TEST_CASE("gen_piecewise_constant: levels, norm, determinism") {
  const Signal u = gen_piecewise_constant(40, 20, 100.0, 8);
  CHECK(l2_norm(u) == doctest::Approx(100.0).epsilon(1e-9));
  std::set<double> levels(u.begin(), u.end());
  CHECK(levels.size() == 2);
  for (std::size_t t = 1; t < 20; ++t) CHECK(u[t] == u[0]);
  for (std::size_t t = 21; t < 40; ++t) CHECK(u[t] == u[20]);

  CHECK(gen_piecewise_constant(40, 20, 100.0, 8) == u);
  CHECK(gen_piecewise_constant(40, 20, 100.0, 9) != u);
  CHECK_THROWS_AS(gen_piecewise_constant(40, 0, 100.0, 8), ConfigError);
}

TEST_CASE("doubling input power reduces LS parameter error on average") {
  // Cramer-Rao direction: larger tr(M) -> tighter estimates. Statistical
  // comparison over repeated noisy trials.
  const int trials = 200;
  const int d = 3;
  const std::vector<double> truth = {0.0, 1.0, -0.7, 0.4};
  double err_lo = 0.0, err_hi = 0.0;
  for (int s = 0; s < trials; ++s) {
    Rng rng(mix_seed(999, static_cast<std::uint64_t>(s)));
    Signal u = white_noise(400, rng);
    FirCoefficients fir;
    fir.theta = truth;
    for (int scale = 0; scale < 2; ++scale) {
      Signal us(u);
      if (scale == 1) {
        for (double& v : us) v *= 2.0;
      }
      Signal y = fir_convolve(fir, us);
      Rng noise(mix_seed(1999, static_cast<std::uint64_t>(s)));
      for (double& v : y) v += 0.5 * noise.gaussian();
      const FirLsResult res = estimate_fir_ls(us, y, d);
      double err = 0.0;
      for (int i = 1; i <= d; ++i) {
        const double delta =
            res.coeffs.theta[static_cast<std::size_t>(i)] -
            truth[static_cast<std::size_t>(i)] * (scale == 1 ? 1.0 : 1.0);
        err += delta * delta;
      }
      (scale == 0 ? err_lo : err_hi) += err;
    }
  }
  CHECK(err_hi < err_lo);
}
