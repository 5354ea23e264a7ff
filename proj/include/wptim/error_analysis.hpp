// Closed-form pairwise and union-bound error rates at the IR and Eve.
#pragma once

#include "wptim/core.hpp"
#include "wptim/scheme_codebook.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace wptim {

// Gaussian tail Q(x) = erfc(x / sqrt 2) / 2.
template <typename Scalar>
Scalar q_function(Scalar x) {
  return Scalar(0.5) * std::erfc(x / std::sqrt(Scalar(2)));
}

// Phi = H_n (x_j - x_k). Effective-channel column sums and symbol factors are
// carried by the transmit vectors, so this covers every scheme.
template <typename Scalar, typename Derived>
CVector<Scalar> phi_vector(const Codebook<Scalar>& book, const Eigen::MatrixBase<Derived>& h_n, Label j, Label k) {
  return h_n * (book[j].tx_vector - book[k].tx_vector);
}

template <typename Scalar>
Subbands<Scalar> phi_subbands(const Codebook<Scalar>& book, const SubbandMatrices<Scalar>& h, Label j, Label k) {
  Subbands<Scalar> out;
  out.reserve(h.size());
  for (const auto& hn : h) out.push_back(phi_vector(book, hn, j, k));
  return out;
}

// gamma = sum_n ||scale Phi_n||^2 / (2 N sigma^2).
template <typename Scalar>
Scalar gamma_ir(const Subbands<Scalar>& phi, Scalar scale, Scalar sigma2) {
  if (!(sigma2 > 0)) throw std::invalid_argument("noise variance must be positive");
  Scalar acc = 0;
  for (const auto& p : phi) acc += p.squaredNorm();
  return scale * scale * acc / (Scalar(2) * Scalar(phi.size()) * sigma2);
}

template <typename Scalar>
Scalar cpep(const Subbands<Scalar>& phi, Scalar scale, Scalar sigma2) {
  return q_function(std::sqrt(gamma_ir(phi, scale, sigma2)));
}

// Rayleigh-averaged PEP for an n_rx-branch chi-square gamma with per-branch
// mean nu_bar.
template <typename Scalar>
Scalar average_pep(Scalar nu_bar, int n_rx) {
  if (nu_bar < 0) throw std::invalid_argument("nu_bar must be non-negative");
  if (n_rx < 1) throw std::invalid_argument("n_rx must be >= 1");
  const Scalar half = nu_bar / Scalar(2);
  const Scalar xi = (Scalar(1) - std::sqrt(half / (Scalar(1) + half))) / Scalar(2);
  Scalar sum = 0;
  Scalar binom = 1;  // C(n_rx - 1 + i, i)
  Scalar pw = 1;     // (1 - xi)^i
  for (int i = 0; i < n_rx; ++i) {
    if (i > 0) {
      binom *= Scalar(n_rx - 1 + i) / Scalar(i);
      pw *= Scalar(1) - xi;
    }
    sum += binom * pw;
  }
  return std::pow(xi, Scalar(n_rx)) * sum;
}

// Per-branch mean of gamma at the IR for flat i.i.d. Rayleigh rows:
// lambda_s^2 ||x_j - x_k||^2 PL / (2 N sigma^2).
template <typename Scalar>
Scalar nu_bar_ir(const Codebook<Scalar>& book, Label j, Label k, Scalar lambda_s2, Scalar sigma2, int n_subbands,
                 Scalar power_gain = Scalar(1)) {
  const Scalar d2 = (book[j].tx_vector - book[k].tx_vector).squaredNorm();
  return lambda_s2 * d2 * power_gain / (Scalar(2) * Scalar(n_subbands) * sigma2);
}

// Eve counterpart with the AN treated as white: the denominator becomes
// 2 (N sigma^2 + lambda_u^2 PL).
template <typename Scalar>
Scalar nu_bar_eve(const Codebook<Scalar>& book, Label j, Label k, Scalar lambda_s2, Scalar lambda_u2, Scalar sigma2,
                  int n_subbands, Scalar power_gain = Scalar(1)) {
  const Scalar d2 = (book[j].tx_vector - book[k].tx_vector).squaredNorm();
  return lambda_s2 * d2 * power_gain / (Scalar(2) * (Scalar(n_subbands) * sigma2 + lambda_u2 * power_gain));
}

// (1/eta)(1/L) sum_j sum_{k != j} e(j,k) P(x_j -> x_k).
template <typename Scalar>
Scalar aber_union_bound(const Codebook<Scalar>& book, const std::function<Scalar(Label, Label)>& nu_bar, int n_rx) {
  const std::size_t n = book.size();
  Scalar total = 0;
  for (std::size_t j = 0; j < n; ++j) {
    Scalar row = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (j == k) continue;
      row += Scalar(bit_errors(Label(j), Label(k))) * average_pep(nu_bar(Label(j), Label(k)), n_rx);
    }
    total += row;
  }
  return total / (Scalar(book.eta) * Scalar(n));
}

// C = lambda_u^2 / (N (n_t - r)) G V V^H G^H + sigma^2 I.
template <typename Scalar>
CMatrix<Scalar> eve_covariance(const CMatrix<Scalar>& g_n, const CMatrix<Scalar>& basis, Scalar lambda_u2, Scalar sigma2,
                               int n_subbands) {
  const Eigen::Index n_eve = g_n.rows();
  CMatrix<Scalar> c = sigma2 * CMatrix<Scalar>::Identity(n_eve, n_eve);
  if (basis.cols() > 0 && lambda_u2 > 0) {
    const CMatrix<Scalar> gv = g_n * basis;
    c.noalias() += (lambda_u2 / (Scalar(n_subbands) * Scalar(basis.cols()))) * gv * gv.adjoint();
  }
  return c;
}

// Hermitian C^{-1/2} by eigendecomposition; eigenvalues are floored at
// 1e-12 trace. Throws when C is not positive definite.
template <typename Scalar>
CMatrix<Scalar> inverse_sqrt_hermitian(const CMatrix<Scalar>& c) {
  Eigen::SelfAdjointEigenSolver<CMatrix<Scalar>> es(c);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  auto ev = es.eigenvalues();
  if (!(ev.minCoeff() > 0)) throw std::invalid_argument("covariance is not positive definite");
  const Scalar floor = Scalar(1e-12) * c.trace().real();
  ev = ev.cwiseMax(floor);
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> inv_sqrt = ev.cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * inv_sqrt.template cast<Complex<Scalar>>().asDiagonal() * es.eigenvectors().adjoint();
}

// Psi = sigma C^{-1/2}.
template <typename Scalar>
CMatrix<Scalar> whitening_matrix(const CMatrix<Scalar>& c, Scalar sigma2) {
  return std::sqrt(sigma2) * inverse_sqrt_hermitian(c);
}

// gamma_Eve = sum_n ||Psi_n scale Phi_n||^2 / (2 N sigma^2).
template <typename Scalar>
Scalar gamma_eve(const Subbands<Scalar>& phi, const SubbandMatrices<Scalar>& covariance, Scalar scale, Scalar sigma2) {
  if (phi.size() != covariance.size()) throw std::invalid_argument("one covariance per subband required");
  Scalar acc = 0;
  for (std::size_t n = 0; n < phi.size(); ++n) acc += (whitening_matrix(covariance[n], sigma2) * phi[n]).squaredNorm();
  return scale * scale * acc / (Scalar(2) * Scalar(phi.size()) * sigma2);
}

template <typename Scalar>
Scalar cpep_eve(const Subbands<Scalar>& phi, const SubbandMatrices<Scalar>& covariance, Scalar scale, Scalar sigma2) {
  return q_function(std::sqrt(gamma_eve(phi, covariance, scale, sigma2)));
}

}  // namespace wptim
