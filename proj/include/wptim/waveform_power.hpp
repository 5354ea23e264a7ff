// Power split, nullspace artificial noise, and the received signals at the
// information receiver, eavesdropper, and energy harvester.
#pragma once

#include "wptim/channel_model.hpp"
#include "wptim/core.hpp"
#include "wptim/scheme_codebook.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

namespace wptim {

template <typename Scalar = double>
struct PowerSplit {
  Scalar p_t = 0;
  Scalar rho = 0;
  Scalar lambda_s2 = 0;  // IM power, (1 - rho) p_t
  Scalar lambda_u2 = 0;  // AN power, rho p_t

  static PowerSplit make(Scalar p_t, Scalar rho) {
    if (!(p_t > Scalar(0))) throw std::invalid_argument("transmit power must be positive");
    if (!(rho >= Scalar(0) && rho <= Scalar(1))) throw std::invalid_argument("rho must lie in [0, 1]");
    PowerSplit s;
    s.p_t = p_t;
    s.rho = rho;
    s.lambda_u2 = rho * p_t;
    s.lambda_s2 = p_t - s.lambda_u2;
    return s;
  }

  // Per-subband IM amplitude sqrt(lambda_s^2 / N).
  Scalar subband_scale(int n_subbands) const { return std::sqrt(lambda_s2 / Scalar(n_subbands)); }
};

inline constexpr double kRankTolerance = 1e-10;

// Right-singular vectors spanning null(H): columns r+1..n_t of V where
// r counts singular values above kRankTolerance * max. Empty (n_t x 0) when H
// has full column rank.
template <typename Derived>
CMatrix<typename Derived::RealScalar> nullspace_basis(const Eigen::MatrixBase<Derived>& h) {
  using Scalar = typename Derived::RealScalar;
  const Eigen::Index n_t = h.cols();
  Eigen::JacobiSVD<CMatrix<Scalar>> svd(h.eval(), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  if (sv.size() > 0 && sv(0) > Scalar(0)) {
    const Scalar cut = sv(0) * Scalar(kRankTolerance);
    for (Eigen::Index i = 0; i < sv.size(); ++i) rank += sv(i) > cut ? 1 : 0;
  }
  return svd.matrixV().rightCols(n_t - rank);
}

template <typename Scalar>
SubbandMatrices<Scalar> nullspace_bases(const ChannelTensor<Scalar>& h_ir) {
  SubbandMatrices<Scalar> bases;
  bases.reserve(h_ir.n_subbands());
  for (std::size_t n = 0; n < h_ir.n_subbands(); ++n) {
    // Flat subbands share one decomposition.
    if (n > 0 && h_ir[n] == h_ir[n - 1]) {
      bases.push_back(bases.back());
    } else {
      bases.push_back(nullspace_basis(h_ir[n]));
    }
  }
  return bases;
}

// AN per subband: eps_n = sum_i delta_i v_i u_i with u_i ~ CN(0, lambda_u^2/N)
// drawn fresh per subband. Default weights are delta_i = 1/sqrt(n_t - r).
template <typename Scalar, typename Rng>
Subbands<Scalar> generate_an(Rng& rng, const SubbandMatrices<Scalar>& bases, Scalar lambda_u2,
                             const std::optional<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& weights = std::nullopt) {
  const auto n_subbands = Scalar(bases.size());
  Subbands<Scalar> eps;
  eps.reserve(bases.size());
  for (const auto& v : bases) {
    if (v.cols() == 0) throw std::invalid_argument("artificial noise needs a non-empty nullspace (n_ir < n_t)");
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> delta =
        weights ? *weights : Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Constant(v.cols(), Scalar(1) / std::sqrt(Scalar(v.cols())));
    if (delta.size() != v.cols()) throw std::invalid_argument("AN weight count must match the nullspace dimension");
    CVector<Scalar> u = complex_normal_matrix<Scalar>(rng, v.cols(), 1, lambda_u2 / n_subbands);
    eps.push_back(v * (delta.template cast<Complex<Scalar>>().cwiseProduct(u)));
  }
  return eps;
}

// w_n = sqrt(lambda_s^2 / N) * tx_vector, identical on every subband.
template <typename Scalar>
Subbands<Scalar> compose_transmit(const Codeword<Scalar>& word, const PowerSplit<Scalar>& split, int n_subbands) {
  const Scalar scale = split.subband_scale(n_subbands);
  return Subbands<Scalar>(std::size_t(n_subbands), CVector<Scalar>(scale * word.tx_vector));
}

// y_n = H_n (w_n + eps_n) + z_n. An empty eps means no artificial noise.
template <typename Scalar>
Subbands<Scalar> receive_baseband(const ChannelTensor<Scalar>& link, const Subbands<Scalar>& w,
                                  const Subbands<Scalar>& eps, const NoiseDraw<Scalar>& noise) {
  const std::size_t n_sub = link.n_subbands();
  if (w.size() != n_sub || noise.samples.size() != n_sub || (!eps.empty() && eps.size() != n_sub)) {
    throw std::invalid_argument("subband count mismatch");
  }
  Subbands<Scalar> y;
  y.reserve(n_sub);
  for (std::size_t n = 0; n < n_sub; ++n) {
    if (eps.empty()) {
      y.push_back(link[n] * w[n] + noise.samples[n]);
    } else {
      y.push_back(link[n] * (w[n] + eps[n]) + noise.samples[n]);
    }
  }
  return y;
}

// Disturbance factor of a per-subband baseband observation. Each subband
// observation passes the receiver's full N-tone front end, so it carries N
// times the single-tone noise and AN power: sigma_obs^2 = N sigma_n^2.
inline double observation_disturbance_factor(std::size_t n_subbands) { return double(n_subbands); }

// Draws the baseband observation of one channel use at a receiver, with
// disturbance scaled by observation_disturbance_factor(N).
template <typename Scalar, typename Rng>
Subbands<Scalar> observe(Rng& rng, const ChannelTensor<Scalar>& link, const Subbands<Scalar>& w,
                         const Subbands<Scalar>& eps, Scalar sigma2) {
  const auto factor = Scalar(observation_disturbance_factor(link.n_subbands()));
  Subbands<Scalar> scaled_eps;
  if (!eps.empty()) {
    scaled_eps.reserve(eps.size());
    for (const auto& e : eps) scaled_eps.push_back(std::sqrt(factor) * e);
  }
  const auto noise = draw_noise<Scalar>(rng, int(link.n_rx()), int(link.n_subbands()), factor * sigma2);
  return receive_baseband(link, w, scaled_eps, noise);
}

// Uniform sampling grid for the energy-harvester passband waveform.
struct PassbandPlan {
  double f1_hz = 1e5;
  double delta_f_hz = 1e3;
  double sample_rate = 0;
  double duration_s = 0;

  // 10x oversampling of the highest tone over one beat period 1/delta_f.
  static PassbandPlan make(int n_subbands, double f1_hz = 1e5, double delta_f_hz = 1e3) {
    PassbandPlan p;
    p.f1_hz = f1_hz;
    p.delta_f_hz = delta_f_hz;
    p.sample_rate = 10.0 * (f1_hz + double(n_subbands - 1) * delta_f_hz);
    p.duration_s = 1.0 / delta_f_hz;
    return p;
  }

  double tone_hz(int n) const { return f1_hz + double(n) * delta_f_hz; }
  Eigen::Index sample_count() const { return Eigen::Index(std::llround(sample_rate * duration_s)); }

  void validate(int n_subbands) const {
    const double f_max = tone_hz(n_subbands - 1);
    if (sample_rate < 10.0 * f_max * (1.0 - 1e-12)) throw std::invalid_argument("passband grid is undersampled");
    if (n_subbands > 1 && duration_s < (1.0 / delta_f_hz) * (1.0 - 1e-12)) {
      throw std::invalid_argument("passband window shorter than one beat period");
    }
    if (n_subbands == 1) {
      const double periods = duration_s * f1_hz;
      if (periods < 1.0 - 1e-9 || std::abs(periods - std::round(periods)) > 1e-9) {
        throw std::invalid_argument("single-tone window must hold an integer number of carrier periods");
      }
    }
    if (sample_count() < 1) throw std::invalid_argument("empty passband grid");
  }
};

// y_q(t) = Re{ sum_n [G_n (w_n e^{j2 pi f_n t} + eps_n e^{j2 pi f_1 t})] }_q.
// Rows are EH antennas, columns are time samples.
template <typename Scalar>
RMatrix<Scalar> passband_samples_eh(const ChannelTensor<Scalar>& g_eh, const Subbands<Scalar>& w,
                                    const Subbands<Scalar>& eps, const PassbandPlan& plan) {
  const int n_sub = int(g_eh.n_subbands());
  plan.validate(n_sub);
  if (int(w.size()) != n_sub || (!eps.empty() && int(eps.size()) != n_sub)) throw std::invalid_argument("subband count mismatch");

  // Complex tone amplitudes per antenna: column n for f_n, last column is AN at f_1.
  const Eigen::Index n_rx = g_eh.n_rx();
  CMatrix<Scalar> tones(n_rx, n_sub);
  CVector<Scalar> an = CVector<Scalar>::Zero(n_rx);
  for (int n = 0; n < n_sub; ++n) {
    tones.col(n) = g_eh[std::size_t(n)] * w[std::size_t(n)];
    if (!eps.empty()) an += g_eh[std::size_t(n)] * eps[std::size_t(n)];
  }
  tones.col(0) += an;

  const Eigen::Index n_samples = plan.sample_count();
  RMatrix<Scalar> y(n_rx, n_samples);
  CVector<Scalar> phasor(n_sub);
  for (Eigen::Index s = 0; s < n_samples; ++s) {
    const double t = double(s) / plan.sample_rate;
    for (int n = 0; n < n_sub; ++n) {
      // Reduce the phase to one period before the trig call.
      const double cycles = plan.tone_hz(n) * t;
      const double phase = 2.0 * kPi * (cycles - std::floor(cycles));
      phasor[n] = Complex<Scalar>(Scalar(std::cos(phase)), Scalar(std::sin(phase)));
    }
    y.col(s) = (tones * phasor).real();
  }
  return y;
}

}  // namespace wptim
