#include "wptim/secrecy_analysis.hpp"

#include <doctest.h>

using namespace wptim;

namespace {

// BPSK +-a in CN(0, sigma2): only the real axis carries information, with
// LLR 4 a y / sigma2. Trapezoid over the real noise density.
double bpsk_mi(double a, double sigma2) {
  const double s = std::sqrt(sigma2 / 2);
  const int steps = 20000;
  const double lo = -12 * s, dx = 24 * s / steps;
  double acc = 0;
  for (int i = 0; i <= steps; ++i) {
    const double n = lo + i * dx;
    const double pdf = std::exp(-n * n / (2 * s * s)) / (s * std::sqrt(2 * kPi));
    const double f = pdf * std::log2(1 + std::exp(-4 * a * (a + n) / sigma2));
    acc += (i == 0 || i == steps) ? f / 2 : f;
  }
  return 1 - acc * dx;
}

EsrSetup small_setup() {
  EsrSetup s;
  s.scheme = {SchemeKind::SSK, 4, 1, 1};
  s.n_channels = 150;
  s.n_noise = 200;
  s.snr_db = 10;
  return s;
}

}  // namespace

TEST_CASE("secrecy rate is the positive part of the MI gap") {
  MiEstimate<double> ir, eve;
  ir.value = 2.0;
  eve.value = 1.5;
  CHECK(secrecy_rate(ir, eve) == doctest::Approx(0.5));
  std::swap(ir, eve);
  CHECK(secrecy_rate(ir, eve) == 0.0);
}

TEST_CASE("binary MI matches a quadrature oracle") {
  Engine rng(51);
  CMatrix<double> pts(1, 2);
  for (double a : {0.3, 0.8, 1.5}) {
    pts << Complex<double>(a, 0), Complex<double>(-a, 0);
    const auto est = mutual_info_points(pts, 1.0, 40000, rng);
    CAPTURE(a);
    CHECK(std::abs(est.raw_value - bpsk_mi(a, 1.0)) < 4 * est.std_err + 1e-4);
    CHECK(est.n_noise_samples == 40000u);
  }
}

TEST_CASE("MI stays within [0, log2 L] and saturates at the ends") {
  Engine rng(52);
  const auto book = build_codebook<double>({SchemeKind::SM, 4, 1, 4});
  const auto h = draw_channel<double>(rng, Link::IR, 2, 4, 1, true, std::nullopt);
  const auto hi = mutual_info(book, h.gains, 1.0, 1e-4, 500, rng);
  CHECK(hi.value == doctest::Approx(4.0).epsilon(1e-3));
  const auto lo = mutual_info(book, h.gains, 1.0, 1e4, 500, rng);
  CHECK(lo.value < 0.01);
  for (double s2 : {0.03, 0.3, 3.0}) {
    const auto mid = mutual_info(book, h.gains, 1.0, s2, 300, rng);
    CHECK(mid.value >= 0.0);
    CHECK(mid.value <= 4.0);
  }
  CHECK_THROWS_AS(mutual_info(book, h.gains, 1.0, 1.0, 50, rng), std::invalid_argument);
  CHECK_THROWS_AS(mutual_info(book, h.gains, 1.0, 0.0, 500, rng), std::invalid_argument);
}

TEST_CASE("symmetric receivers without AN have no MI gap on average") {
  const auto setup = small_setup();
  const auto book = build_codebook<double>(setup.scheme);
  std::vector<std::array<double, 4>> detail;
  secrecy_rate_samples(setup, book, 7, 3, 1, &detail);
  MomentSum gap;
  for (const auto& d : detail) gap.add(d[1] - d[2]);
  CHECK(std::abs(gap.mean()) < 4 * gap.std_err());
}

TEST_CASE("a whitening Eve extracts at least as much as a mismatched one") {
  auto setup = small_setup();
  setup.rho = 0.5;
  setup.snr_db = 15;
  const auto book = build_codebook<double>(setup.scheme);
  std::vector<std::array<double, 4>> white, plain;
  secrecy_rate_samples(setup, book, 8, 3, 1, &white);
  setup.whiten_eve = false;
  secrecy_rate_samples(setup, book, 8, 3, 1, &plain);
  double sw = 0, sp = 0;
  for (std::size_t c = 0; c < white.size(); ++c) {
    CHECK(white[c][1] == plain[c][1]);  // the IR side is untouched
    sw += white[c][2];
    sp += plain[c][2];
  }
  CHECK(sw >= sp);
}

TEST_CASE("more AN power raises the ergodic secrecy rate") {
  auto setup = small_setup();
  setup.scheme = {SchemeKind::QSSK, 4, 1, 1};
  setup.snr_db = 20;
  const auto none = ergodic_secrecy_rate(setup, 9, 3);
  setup.rho = 0.6;
  const auto heavy = ergodic_secrecy_rate(setup, 9, 3);
  CHECK(heavy.esr > none.esr + 4 * std::hypot(heavy.std_err, none.std_err));
  CHECK(heavy.eta == 4);
  CHECK(heavy.n_channels == 150u);
  CHECK(heavy.worst_bound_excursion < 5.0);
}

TEST_CASE("ESR needs enough channels and a nullspace") {
  auto setup = small_setup();
  setup.n_channels = 50;
  CHECK_THROWS_AS(ergodic_secrecy_rate(setup, 1), std::invalid_argument);
  setup = small_setup();
  setup.n_ir = 4;
  setup.rho = 0.2;
  CHECK_THROWS_AS(ergodic_secrecy_rate(setup, 1), std::invalid_argument);
}

TEST_CASE("ESR samples do not depend on the thread count") {
  auto setup = small_setup();
  setup.n_channels = 40;
  setup.rho = 0.3;
  const auto book = build_codebook<double>(setup.scheme);
  CHECK(secrecy_rate_samples(setup, book, 11, 3, 1) == secrecy_rate_samples(setup, book, 11, 3, 3));
}
