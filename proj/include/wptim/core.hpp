// Dense type aliases and random draws shared by every module.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace wptim {

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
using CVector = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
using CMatrix = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using RMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// One vector (or matrix) per subband, index n = 0..N-1.
template <typename Scalar>
using Subbands = std::vector<CVector<Scalar>>;

template <typename Scalar>
using SubbandMatrices = std::vector<CMatrix<Scalar>>;

using Label = std::uint32_t;

// Engine used for every Monte Carlo stream.
using Engine = std::mt19937_64;

inline constexpr double kPi = 3.14159265358979323846;

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// Circularly-symmetric complex Gaussian CN(0, variance).
template <typename Scalar, typename Rng>
Complex<Scalar> complex_normal(Rng& rng, Scalar variance) {
  std::normal_distribution<Scalar> dist(Scalar(0), std::sqrt(variance / Scalar(2)));
  const Scalar re = dist(rng);
  const Scalar im = dist(rng);
  return {re, im};
}

template <typename Scalar, typename Rng>
CMatrix<Scalar> complex_normal_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, Scalar variance) {
  std::normal_distribution<Scalar> dist(Scalar(0), std::sqrt(variance / Scalar(2)));
  CMatrix<Scalar> m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Scalar re = dist(rng);
      const Scalar im = dist(rng);
      m(r, c) = Complex<Scalar>(re, im);
    }
  }
  return m;
}

// Concatenates per-subband vectors into one column (subband-major).
template <typename Scalar>
CVector<Scalar> stack(const Subbands<Scalar>& parts) {
  Eigen::Index total = 0;
  for (const auto& p : parts) total += p.size();
  CVector<Scalar> out(total);
  Eigen::Index offset = 0;
  for (const auto& p : parts) {
    out.segment(offset, p.size()) = p;
    offset += p.size();
  }
  return out;
}

}  // namespace wptim
