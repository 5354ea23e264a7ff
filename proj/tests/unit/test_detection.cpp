#include "wptim/error_analysis.hpp"
#include "wptim/ml_detection.hpp"
#include "wptim/parallel.hpp"
#include "wptim/waveform_power.hpp"

#include <doctest.h>

using namespace wptim;

namespace {

// Direct sum over subbands of ||y_n - scale H_n x_l||^2, no stacking.
Label brute_force(const Codebook<double>& book, const ChannelTensor<double>& h, const Subbands<double>& y, double scale) {
  Label best = 0;
  double best_m = 1e300;
  for (std::size_t l = 0; l < book.size(); ++l) {
    double m = 0;
    for (std::size_t n = 0; n < y.size(); ++n) m += (y[n] - scale * h[n] * book[l].tx_vector).squaredNorm();
    if (m < best_m) {
      best_m = m;
      best = Label(l);
    }
  }
  return best;
}

}  // namespace

TEST_CASE("ML detection agrees with a brute-force search") {
  Engine rng(31);
  for (const SchemeSpec spec : {SchemeSpec{SchemeKind::GSM, 4, 2, 4}, SchemeSpec{SchemeKind::QSM, 4, 1, 4},
                                SchemeSpec{SchemeKind::GQSSK, 5, 2, 1}}) {
    const auto book = build_codebook<double>(spec);
    for (int t = 0; t < 300; ++t) {
      const auto h = draw_channel<double>(rng, Link::IR, 2, spec.n_t, 2, false, std::nullopt);
      const Label sent = Label(rng() % book.size());
      const auto y = observe(rng, h, compose_transmit(book[sent], PowerSplit<double>::make(1.0, 0.0), 2), {}, 0.3);
      const auto d = ml_detect(book, h, y, std::sqrt(0.5));
      CHECK(d.label_hat == brute_force(book, h, y, std::sqrt(0.5)));
      CHECK(d.metric_evaluations == book.size());
    }
  }
}

TEST_CASE("noiseless observations are always recovered") {
  Engine rng(32);
  const auto book = build_codebook<double>({SchemeKind::GQSM, 4, 2, 4});
  const auto h = draw_channel<double>(rng, Link::IR, 2, 4, 1, true, std::nullopt);
  for (std::size_t l = 0; l < book.size(); ++l) {
    const Subbands<double> y{2.0 * h[0] * book[l].tx_vector};
    CHECK(ml_detect(book, h, y, 2.0).label_hat == Label(l));
  }
}

TEST_CASE("ties go to the smallest label") {
  CMatrix<double> pts(1, 3);
  pts << Complex<double>(1, 0), Complex<double>(-1, 0), Complex<double>(1, 0);
  const CVector<double> y = CVector<double>::Constant(1, Complex<double>(0.9, 0));
  CHECK(detect_nearest(pts, y).label_hat == 0);
  const CVector<double> mid = CVector<double>::Zero(1);
  CHECK(detect_nearest(pts, mid).label_hat == 0);
  CHECK_THROWS_AS(detect_nearest(pts, CVector<double>(CVector<double>::Zero(2))), std::invalid_argument);
}

TEST_CASE("detection is invariant to a common scale") {
  Engine rng(33);
  const auto book = build_codebook<double>({SchemeKind::SM, 4, 1, 4});
  for (int t = 0; t < 200; ++t) {
    const auto h = draw_channel<double>(rng, Link::IR, 2, 4, 1, true, std::nullopt);
    Subbands<double> y{complex_normal_matrix<double>(rng, 2, 1, 1.0)};
    const auto a = ml_detect(book, h, y, 0.8).label_hat;
    y[0] *= 7.0;
    CHECK(ml_detect(book, h, y, 5.6).label_hat == a);
  }
}

TEST_CASE("Eve without AN or whitening is the IR detector") {
  Engine rng(34);
  const auto book = build_codebook<double>({SchemeKind::QSSK, 4, 1, 1});
  for (int t = 0; t < 100; ++t) {
    const auto g = draw_channel<double>(rng, Link::Eve, 2, 4, 1, true, std::nullopt);
    const Subbands<double> y{complex_normal_matrix<double>(rng, 2, 1, 1.0)};
    CHECK(ml_detect_eve(book, g, y, 1.0).label_hat == ml_detect(book, g, y, 1.0).label_hat);
    // Identity whitening changes nothing either.
    const SubbandMatrices<double> eye{CMatrix<double>::Identity(2, 2)};
    CHECK(ml_detect_eve(book, g, y, 1.0, std::optional(eye)).label_hat == ml_detect(book, g, y, 1.0).label_hat);
  }
}

TEST_CASE("a whitening Eve makes fewer errors than one ignoring the AN structure") {
  Engine rng(35);
  const auto book = build_codebook<double>({SchemeKind::SSK, 4, 1, 1});
  const auto split = PowerSplit<double>::make(1.0, 0.5);
  const double sigma2 = 0.01;
  long err_white = 0, err_plain = 0;
  for (int t = 0; t < 20000; ++t) {
    const auto h = draw_channel<double>(rng, Link::IR, 2, 4, 1, true, std::nullopt);
    const auto g = draw_channel<double>(rng, Link::Eve, 2, 4, 1, true, std::nullopt);
    const auto bases = nullspace_bases(h);
    const Label sent = Label(rng() % book.size());
    const auto eps = generate_an(rng, bases, split.lambda_u2);
    const auto y = observe(rng, g, compose_transmit(book[sent], split, 1), eps, sigma2);
    const SubbandMatrices<double> psi{whitening_matrix<double>(eve_covariance<double>(g[0], bases[0], split.lambda_u2, sigma2, 1), sigma2)};
    const double scale = split.subband_scale(1);
    err_white += bit_errors(sent, ml_detect_eve(book, g, y, scale, std::optional(psi)).label_hat);
    err_plain += bit_errors(sent, ml_detect_eve(book, g, y, scale).label_hat);
  }
  CHECK(err_white < err_plain);
}
