// Exhaustive maximum-likelihood detection over an IM codebook.
//
// Every scheme reduces to one search: the candidate for label l on subband n
// is scale * H_n * tx_vector(l), because the transmit vector already encodes
// the active-column sums, the in-phase/quadrature routing, and the symbol.
#pragma once

#include "wptim/channel_model.hpp"
#include "wptim/scheme_codebook.hpp"

#include <limits>
#include <optional>
#include <stdexcept>

namespace wptim {

template <typename Scalar = double>
struct DetectionResult {
  Label label_hat = 0;
  Scalar metric = 0;  // sum_n ||y_n - scale H_n x||^2 at label_hat
  std::size_t metric_evaluations = 0;
};

// Noiseless received points for every codeword, subbands stacked:
// column l is [W_1 scale H_1 x_l; ...; W_N scale H_N x_l], with W_n an
// optional per-subband whitening matrix.
template <typename Scalar>
CMatrix<Scalar> received_constellation(const Codebook<Scalar>& book, const SubbandMatrices<Scalar>& h, Scalar scale,
                                       const SubbandMatrices<Scalar>* whiten = nullptr) {
  if (h.empty()) throw std::invalid_argument("channel has no subbands");
  if (whiten && whiten->size() != h.size()) throw std::invalid_argument("one whitening matrix per subband required");
  const CMatrix<Scalar> x = book.tx_matrix();
  const Eigen::Index n_rx = h.front().rows();
  CMatrix<Scalar> points(n_rx * Eigen::Index(h.size()), x.cols());
  for (std::size_t n = 0; n < h.size(); ++n) {
    if (h[n].cols() != x.rows()) throw std::invalid_argument("channel width does not match n_t");
    auto block = points.middleRows(Eigen::Index(n) * n_rx, n_rx);
    if (whiten) {
      block.noalias() = scale * ((*whiten)[n] * h[n]) * x;
    } else {
      block.noalias() = scale * h[n] * x;
    }
  }
  return points;
}

// argmin_l ||y - points.col(l)||^2, ties to the smallest label.
template <typename Derived, typename Scalar = typename Derived::RealScalar>
DetectionResult<Scalar> detect_nearest(const CMatrix<Scalar>& points, const Eigen::MatrixBase<Derived>& y) {
  if (points.cols() == 0) throw std::invalid_argument("empty codebook");
  if (points.rows() != y.size()) throw std::invalid_argument("observation length does not match the constellation");
  DetectionResult<Scalar> best;
  best.metric = std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index l = 0; l < points.cols(); ++l) {
    const Scalar m = (y - points.col(l)).squaredNorm();
    if (m < best.metric) {
      best.metric = m;
      best.label_hat = Label(l);
    }
  }
  best.metric_evaluations = std::size_t(points.cols());
  return best;
}

template <typename Scalar>
DetectionResult<Scalar> ml_detect(const Codebook<Scalar>& book, const ChannelTensor<Scalar>& h, const Subbands<Scalar>& y,
                                  Scalar scale) {
  if (y.size() != h.n_subbands()) throw std::invalid_argument("subband count mismatch");
  return detect_nearest(received_constellation(book, h.gains, scale), stack(y));
}

// Eavesdropper detection. With whitening matrices W_n = sigma_n C_n^{-1/2}
// both y_n and G_n x are whitened; without them AN is unmodeled interference.
template <typename Scalar>
DetectionResult<Scalar> ml_detect_eve(const Codebook<Scalar>& book, const ChannelTensor<Scalar>& g,
                                      const Subbands<Scalar>& y, Scalar scale,
                                      const std::optional<SubbandMatrices<Scalar>>& whiten = std::nullopt) {
  if (y.size() != g.n_subbands()) throw std::invalid_argument("subband count mismatch");
  if (!whiten) return ml_detect(book, g, y, scale);
  Subbands<Scalar> yw;
  yw.reserve(y.size());
  for (std::size_t n = 0; n < y.size(); ++n) yw.push_back((*whiten)[n] * y[n]);
  return detect_nearest(received_constellation(book, g.gains, scale, &*whiten), stack(yw));
}

}  // namespace wptim
