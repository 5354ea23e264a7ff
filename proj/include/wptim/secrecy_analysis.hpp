// Discrete-input mutual information by Monte Carlo over the noise, and the
// ergodic secrecy rate between the IR and an AN-whitening eavesdropper.
#pragma once

#include "wptim/channel_model.hpp"
#include "wptim/error_analysis.hpp"
#include "wptim/ml_detection.hpp"
#include "wptim/parallel.hpp"
#include "wptim/scheme_codebook.hpp"
#include "wptim/waveform_power.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace wptim {

template <typename Scalar = double>
struct MiEstimate {
  Scalar value = 0;      // clamped to [0, log2 L]
  Scalar raw_value = 0;  // before clamping
  Scalar std_err = 0;
  std::size_t n_noise_samples = 0;
  std::size_t n_channel_draws = 1;
};

// I = log2 L - (1/L) sum_l E_z[ log2 sum_m exp(-(||P_l - P_m + z||^2 - ||z||^2) / sigma^2) ]
// for equiprobable points P (columns) in CN(0, sigma^2 I) noise. The same noise
// draws are shared by every transmitted point.
template <typename Scalar, typename Rng>
MiEstimate<Scalar> mutual_info_points(const CMatrix<Scalar>& points, Scalar sigma2, int n_noise, Rng& rng) {
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using RVec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (!(sigma2 > 0)) throw std::invalid_argument("noise variance must be positive");
  if (n_noise < 100) throw std::invalid_argument("need at least 100 noise samples");
  const Eigen::Index dim = points.rows();
  const Eigen::Index n_pts = points.cols();
  if (n_pts < 1) throw std::invalid_argument("empty point set");

  // ||P_l - P_m||^2 via the Gram matrix.
  const CMatrix<Scalar> gram = points.adjoint() * points;
  const RVec norms = gram.diagonal().real();
  Array base = (norms.replicate(1, n_pts) + norms.transpose().replicate(n_pts, 1) - Scalar(2) * gram.real()).array();
  base = base.max(Scalar(0));

  const Scalar log2_l = std::log2(Scalar(n_pts));
  MomentSum acc;
  Array expo(n_pts, n_pts);
  for (int t = 0; t < n_noise; ++t) {
    const CVector<Scalar> z = complex_normal_matrix<Scalar>(rng, dim, 1, sigma2);
    // q_m = Re(P_m^H z); Re((P_l - P_m)^H z) = q_l - q_m.
    const RVec q = (points.adjoint() * z).real();
    expo = -(base + Scalar(2) * (q.replicate(1, n_pts) - q.transpose().replicate(n_pts, 1)).array()) / sigma2;
    const auto row_max = expo.rowwise().maxCoeff().eval();
    const auto lse = (row_max + (expo.colwise() - row_max).exp().rowwise().sum().log()).eval();
    acc.add(double(lse.mean() / std::log(Scalar(2))));
  }
  MiEstimate<Scalar> est;
  est.raw_value = log2_l - Scalar(acc.mean());
  est.value = std::clamp(est.raw_value, Scalar(0), log2_l);
  est.std_err = Scalar(acc.std_err());
  est.n_noise_samples = std::size_t(n_noise);
  return est;
}

// MI of a codebook through per-subband effective channels (already whitened
// for the eavesdropper); subbands are concatenated into one observation.
template <typename Scalar, typename Rng>
MiEstimate<Scalar> mutual_info(const Codebook<Scalar>& book, const SubbandMatrices<Scalar>& channel, Scalar scale,
                               Scalar sigma2, int n_noise, Rng& rng) {
  return mutual_info_points(received_constellation(book, channel, scale), sigma2, n_noise, rng);
}

template <typename Scalar>
Scalar secrecy_rate(const MiEstimate<Scalar>& ir, const MiEstimate<Scalar>& eve) {
  return std::max(Scalar(0), ir.value - eve.value);
}

struct EsrSetup {
  SchemeSpec scheme;
  int n_ir = 2;
  int n_eve = 2;
  int n_subbands = 1;
  double p_t = dbm_to_watts(36.0);
  double rho = 0.0;
  double snr_db = 20.0;  // P_T / N0
  std::optional<double> d_ir;
  std::optional<double> d_eve;
  bool flat_subbands = true;
  int n_channels = 200;
  int n_noise = 1000;
  bool whiten_eve = true;

  double sigma2() const { return p_t / db_to_linear(snr_db); }
};

struct EsrPoint {
  double esr = 0;
  double std_err = 0;
  double mi_ir = 0;
  double mi_eve = 0;
  int eta = 0;
  std::size_t n_channels = 0;
  // Largest raw (unclamped) MI excursion beyond [0, eta], in units of its std_err.
  double worst_bound_excursion = 0;
};

// Per-channel secrecy rate samples; channel c uses stream (seed, experiment, c).
inline std::vector<double> secrecy_rate_samples(const EsrSetup& setup, const Codebook<double>& book, std::uint64_t seed,
                                                std::uint64_t experiment, unsigned threads,
                                                std::vector<std::array<double, 4>>* detail = nullptr) {
  if (setup.n_channels < 1) throw std::invalid_argument("need at least one channel draw");
  const auto split = PowerSplit<double>::make(setup.p_t, setup.rho);
  const double sigma2 = setup.sigma2();
  const int n_sub = setup.n_subbands;
  const double obs_sigma2 = observation_disturbance_factor(std::size_t(n_sub)) * sigma2;
  const double scale = split.subband_scale(n_sub);

  auto one = [&](std::size_t c) {
    Engine rng = make_stream(seed, experiment, c);
    const auto h = draw_channel<double>(rng, Link::IR, setup.n_ir, setup.scheme.n_t, n_sub, setup.flat_subbands, setup.d_ir);
    const auto g = draw_channel<double>(rng, Link::Eve, setup.n_eve, setup.scheme.n_t, n_sub, setup.flat_subbands, setup.d_eve);
    const auto mi_ir = mutual_info(book, h.gains, scale, obs_sigma2, setup.n_noise, rng);

    SubbandMatrices<double> eve_eff;
    eve_eff.reserve(std::size_t(n_sub));
    const auto bases = nullspace_bases(h);
    for (int n = 0; n < n_sub; ++n) {
      if (split.lambda_u2 > 0 && bases[std::size_t(n)].cols() == 0) {
        throw std::invalid_argument("artificial noise needs n_ir < n_t");
      }
      if (setup.whiten_eve) {
        const auto cov = eve_covariance<double>(g[std::size_t(n)], bases[std::size_t(n)], split.lambda_u2, sigma2, n_sub);
        eve_eff.push_back(whitening_matrix<double>(cov, sigma2) * g[std::size_t(n)]);
      } else {
        eve_eff.push_back(g[std::size_t(n)]);
      }
    }
    // Whitened disturbance is white with the observation variance N sigma^2.
    double eve_sigma2 = obs_sigma2;
    if (!setup.whiten_eve) {
      // Mismatched receiver: AN folded into white noise of equal total power.
      double tr = 0;
      for (int n = 0; n < n_sub; ++n) {
        tr += eve_covariance<double>(g[std::size_t(n)], bases[std::size_t(n)], split.lambda_u2, sigma2, n_sub).trace().real();
      }
      eve_sigma2 = observation_disturbance_factor(std::size_t(n_sub)) * tr / double(n_sub * setup.n_eve);
    }
    const auto mi_eve = mutual_info(book, eve_eff, scale, eve_sigma2, setup.n_noise, rng);
    return std::array<double, 4>{secrecy_rate(mi_ir, mi_eve), mi_ir.value, mi_eve.value,
                                 std::max({(mi_ir.raw_value - book.eta) / std::max(mi_ir.std_err, 1e-300),
                                           -mi_ir.raw_value / std::max(mi_ir.std_err, 1e-300),
                                           (mi_eve.raw_value - book.eta) / std::max(mi_eve.std_err, 1e-300),
                                           -mi_eve.raw_value / std::max(mi_eve.std_err, 1e-300)})};
  };
  auto rows = parallel_map(std::size_t(setup.n_channels), threads, one);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[0]);
  if (detail) *detail = std::move(rows);
  return out;
}

// Mean secrecy rate over channel realizations, with its standard error.
inline EsrPoint ergodic_secrecy_rate(const EsrSetup& setup, std::uint64_t seed, std::uint64_t experiment = 0,
                                     unsigned threads = 1) {
  if (setup.n_channels < 100) throw std::invalid_argument("ergodic averaging needs at least 100 channel draws");
  const auto book = build_codebook<double>(setup.scheme);
  std::vector<std::array<double, 4>> detail;
  secrecy_rate_samples(setup, book, seed, experiment, threads, &detail);
  MomentSum esr, ir, eve;
  EsrPoint p;
  p.worst_bound_excursion = -1e300;
  for (const auto& d : detail) {
    esr.add(d[0]);
    ir.add(d[1]);
    eve.add(d[2]);
    p.worst_bound_excursion = std::max(p.worst_bound_excursion, d[3]);
  }
  p.esr = esr.mean();
  p.std_err = esr.std_err();
  p.mi_ir = ir.mean();
  p.mi_eve = eve.mean();
  p.eta = book.eta;
  p.n_channels = detail.size();
  return p;
}

}  // namespace wptim
