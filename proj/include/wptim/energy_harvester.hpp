// Rectenna output model and the fourth-order harvesting metric z_DC.
#pragma once

#include "wptim/core.hpp"

#include <stdexcept>

namespace wptim {

template <typename Scalar = double>
struct RectennaParams {
  Scalar k2 = Scalar(0.0034);
  Scalar k4 = Scalar(0.3829);
  Scalar r_ant = Scalar(50);
  Scalar gamma_in = Scalar(dbm_to_watts(-20.0));   // sensitivity, W
  Scalar gamma_sat = Scalar(dbm_to_watts(10.0));   // saturation, W
  Scalar beta2 = Scalar(1);
  Scalar beta4 = Scalar(0.1);
  Scalar r_load = Scalar(1000);
  int n_eh = 4;

  void validate() const {
    if (!(k2 > 0 && k4 > 0 && r_ant > 0 && gamma_in > 0 && gamma_sat > 0 && beta2 > 0 && beta4 > 0 && r_load > 0)) {
      throw std::invalid_argument("rectenna parameters must be positive");
    }
    if (!(gamma_in < gamma_sat)) throw std::invalid_argument("rectenna sensitivity must lie below saturation");
    if (n_eh < 1) throw std::invalid_argument("n_eh must be >= 1");
  }
};

template <typename Scalar = double>
struct SignalMoments {
  Scalar m2 = 0;  // E[y^2]
  Scalar m4 = 0;  // E[y^4]
};

// Piecewise rectenna output: dead below the sensitivity, beta2 p + beta4 p^2
// in the operating region, clamped at the saturation input above it.
template <typename Scalar>
Scalar vout(Scalar p_r, const RectennaParams<Scalar>& params) {
  if (p_r < Scalar(0)) throw std::invalid_argument("received power must be non-negative");
  if (p_r < params.gamma_in) return Scalar(0);
  const Scalar p = p_r < params.gamma_sat ? p_r : params.gamma_sat;
  return params.beta2 * p + params.beta4 * p * p;
}

// Time averages of y^2 and y^4 over the window.
template <typename Derived>
SignalMoments<typename Derived::Scalar> signal_moments(const Eigen::DenseBase<Derived>& samples) {
  using Scalar = typename Derived::Scalar;
  if (samples.size() == 0) throw std::invalid_argument("no samples");
  const auto sq = samples.derived().array().square();
  return {Scalar(sq.mean()), Scalar(sq.square().mean())};
}

// k2 R m2 + k4 R^2 m4 for one rectenna.
template <typename Scalar>
Scalar z_dc(const SignalMoments<Scalar>& m, const RectennaParams<Scalar>& params) {
  return params.k2 * params.r_ant * m.m2 + params.k4 * params.r_ant * params.r_ant * m.m4;
}

template <typename Scalar = double>
struct HarvestReport {
  Scalar z_dc = 0;          // DC-combined over rectennas
  Scalar p_dc_total = 0;    // sum_q v_out,q^2 / R_L
};

// Rows of `samples` are rectennas.
template <typename Derived>
HarvestReport<typename Derived::Scalar> harvest(const Eigen::MatrixBase<Derived>& samples,
                                                const RectennaParams<typename Derived::Scalar>& params) {
  using Scalar = typename Derived::Scalar;
  HarvestReport<Scalar> r;
  for (Eigen::Index q = 0; q < samples.rows(); ++q) {
    const auto m = signal_moments(samples.row(q));
    r.z_dc += z_dc(m, params);
    const Scalar v = vout(m.m2, params);
    r.p_dc_total += v * v / params.r_load;
  }
  return r;
}

}  // namespace wptim
