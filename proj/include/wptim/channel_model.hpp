// Rayleigh block-fading links and receiver noise.
#pragma once

#include "wptim/core.hpp"

#include <optional>
#include <stdexcept>

namespace wptim {

enum class Link { IR, EH, Eve };

// 35.3 + 37.6 log10(d), d in meters.
double path_loss_db(double distance_m);

// Linear amplitude factor 10^(-PL/20); 1 when the link is distance-normalized.
double path_gain_amplitude(std::optional<double> distance_m);

// Per-subband gains of one link. gains[n] is (n_rx x n_t).
template <typename Scalar = double>
struct ChannelTensor {
  Link link = Link::IR;
  SubbandMatrices<Scalar> gains;
  std::optional<double> distance_m;

  Eigen::Index n_rx() const { return gains.empty() ? 0 : gains.front().rows(); }
  Eigen::Index n_t() const { return gains.empty() ? 0 : gains.front().cols(); }
  std::size_t n_subbands() const { return gains.size(); }
  const CMatrix<Scalar>& operator[](std::size_t n) const { return gains[n]; }

  // Mean power gain of each entry (path loss only).
  Scalar power_gain() const {
    const Scalar a = Scalar(path_gain_amplitude(distance_m));
    return a * a;
  }
};

// i.i.d. CN(0,1) small-scale fading scaled by the path-loss amplitude. With
// flat_subbands one (n_rx x n_t) draw is replicated across all N subbands.
template <typename Scalar = double, typename Rng>
ChannelTensor<Scalar> draw_channel(Rng& rng, Link link, int n_rx, int n_t, int n_subbands, bool flat_subbands,
                                   std::optional<double> distance_m) {
  if (n_rx < 1 || n_t < 1 || n_subbands < 1) throw std::invalid_argument("channel dimensions must be >= 1");
  ChannelTensor<Scalar> ch;
  ch.link = link;
  ch.distance_m = distance_m;
  const Scalar amp = Scalar(path_gain_amplitude(distance_m));
  ch.gains.reserve(std::size_t(n_subbands));
  for (int n = 0; n < n_subbands; ++n) {
    if (flat_subbands && n > 0) {
      ch.gains.push_back(ch.gains.front());
    } else {
      ch.gains.push_back(amp * complex_normal_matrix<Scalar>(rng, n_rx, n_t, Scalar(1)));
    }
  }
  return ch;
}

template <typename Scalar = double>
struct NoiseDraw {
  Subbands<Scalar> samples;  // samples[n] has n_rx entries
  Scalar sigma2_per_subband = 0;
};

template <typename Scalar = double, typename Rng>
NoiseDraw<Scalar> draw_noise(Rng& rng, int n_rx, int n_subbands, Scalar sigma2) {
  if (!(sigma2 > Scalar(0))) throw std::invalid_argument("noise variance must be positive");
  NoiseDraw<Scalar> z;
  z.sigma2_per_subband = sigma2;
  z.samples.reserve(std::size_t(n_subbands));
  for (int n = 0; n < n_subbands; ++n) z.samples.push_back(complex_normal_matrix<Scalar>(rng, n_rx, 1, sigma2));
  return z;
}

}  // namespace wptim
