// Index-modulation codebooks: bit label -> unit-power transmit vector.
//
// Label layout (most significant first):
//   non-quadrature:  [activation index | symbol bits]
//   quadrature:      [in-phase activation | quadrature activation | symbol bits]
// Activation indices use natural binary over the lexicographically ordered
// legal antenna subsets; only the QAM symbol bits are Gray coded.
#pragma once

#include "wptim/core.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wptim {

enum class SchemeKind { SSK, GSSK, SM, GSM, QSSK, GQSSK, QSM, GQSM };

inline constexpr SchemeKind kAllSchemes[] = {SchemeKind::SSK,  SchemeKind::GSSK,  SchemeKind::SM,  SchemeKind::GSM,
                                             SchemeKind::QSSK, SchemeKind::GQSSK, SchemeKind::QSM, SchemeKind::GQSM};

bool is_quadrature(SchemeKind kind);
bool carries_symbol(SchemeKind kind);
bool is_generalized(SchemeKind kind);
std::string_view to_string(SchemeKind kind);
SchemeKind parse_scheme(std::string_view name);

struct SchemeSpec {
  SchemeKind kind = SchemeKind::SSK;
  int n_t = 2;
  int n_a = 1;
  // Constellation order; forced to 1 for the shift-keying schemes.
  int m = 1;

  // Throws std::invalid_argument when the combination is not a usable scheme.
  void validate() const;
  int symbol_bits() const;
  std::string describe() const;
};

// floor(log2(C(n_t, n_a))).
int index_bits(int n_t, int n_a);
int spectral_efficiency(const SchemeSpec& spec);

// Zero-based antenna indices, ascending.
using AntennaSet = std::vector<int>;

// Size-n_a subsets in lexicographic order, truncated to the first 2^index_bits.
std::vector<AntennaSet> enumerate_legal_activations(int n_t, int n_a);

int bit_errors(Label j, Label k);

// Square (even bit count) or rectangular (odd bit count) M-QAM with Gray
// coding per axis, normalized to unit average energy. Element i is the point
// for symbol bits i. m == 1 yields the single point 1.
template <typename Scalar>
std::vector<Complex<Scalar>> qam_constellation(int m) {
  if (m < 1 || (m & (m - 1)) != 0) throw std::invalid_argument("constellation order must be a power of 2");
  if (m == 1) return {Complex<Scalar>(1, 0)};
  int bits = 0;
  while ((1 << bits) < m) ++bits;
  const int bits_i = (bits + 1) / 2;
  const int bits_q = bits / 2;
  const int levels_i = 1 << bits_i;
  const int levels_q = 1 << bits_q;
  auto gray_to_binary = [](int g) {
    int b = 0;
    for (; g; g >>= 1) b ^= g;
    return b;
  };
  std::vector<Complex<Scalar>> points(m);
  Scalar energy = 0;
  for (int s = 0; s < m; ++s) {
    const int gi = s >> bits_q;
    const int gq = s & (levels_q - 1);
    const Scalar re = Scalar(2 * gray_to_binary(gi) - (levels_i - 1));
    const Scalar im = bits_q == 0 ? Scalar(0) : Scalar(2 * gray_to_binary(gq) - (levels_q - 1));
    points[s] = Complex<Scalar>(re, im);
    energy += std::norm(points[s]);
  }
  const Scalar scale = std::sqrt(Scalar(m) / energy);
  for (auto& p : points) p *= scale;
  return points;
}

template <typename Scalar>
struct Codeword {
  Label label = 0;
  AntennaSet active_re;
  AntennaSet active_im;  // equal to active_re for non-quadrature schemes
  int symbol_index = 0;
  Complex<Scalar> symbol;
  CVector<Scalar> tx_vector;
};

template <typename Scalar>
struct Codebook {
  SchemeSpec spec;
  int eta = 0;
  std::vector<Codeword<Scalar>> words;
  std::vector<AntennaSet> legal_activations;

  std::size_t size() const { return words.size(); }
  const Codeword<Scalar>& operator[](std::size_t l) const { return words[l]; }

  // Inverse of the label layout. Throws if the sets are not legal activations.
  Label label_for(const AntennaSet& active_re, const AntennaSet& active_im, int symbol_index) const {
    const Label re = activation_index(active_re);
    const int sym_bits = spec.symbol_bits();
    if (!is_quadrature(spec.kind)) {
      if (active_im != active_re) throw std::invalid_argument("non-quadrature codeword needs equal index sets");
      return (re << sym_bits) | Label(symbol_index);
    }
    const int idx_bits = index_bits(spec.n_t, spec.n_a);
    const Label im = activation_index(active_im);
    return (((re << idx_bits) | im) << sym_bits) | Label(symbol_index);
  }

  // Matrix whose columns are the transmit vectors in label order.
  CMatrix<Scalar> tx_matrix() const {
    CMatrix<Scalar> x(spec.n_t, Eigen::Index(words.size()));
    for (std::size_t l = 0; l < words.size(); ++l) x.col(Eigen::Index(l)) = words[l].tx_vector;
    return x;
  }

 private:
  Label activation_index(const AntennaSet& set) const {
    for (std::size_t i = 0; i < legal_activations.size(); ++i) {
      if (legal_activations[i] == set) return Label(i);
    }
    throw std::invalid_argument("antenna set is not a legal activation");
  }
};

// Codebooks above this many bits per channel use are refused (exhaustive ML
// and the pairwise analyses scale with 2^eta or 4^eta).
inline constexpr int kMaxCodebookBits = 16;

template <typename Scalar = double>
Codebook<Scalar> build_codebook(const SchemeSpec& spec) {
  spec.validate();
  Codebook<Scalar> book;
  book.spec = spec;
  book.eta = spectral_efficiency(spec);
  if (book.eta > kMaxCodebookBits) throw std::invalid_argument("codebook too large for exhaustive search: " + spec.describe());
  book.legal_activations = enumerate_legal_activations(spec.n_t, spec.n_a);

  const bool quadrature = is_quadrature(spec.kind);
  std::vector<Complex<Scalar>> symbols;
  if (carries_symbol(spec.kind)) {
    symbols = qam_constellation<Scalar>(spec.m);
  } else if (quadrature) {
    symbols = {Complex<Scalar>(1, 1) / std::sqrt(Scalar(2))};
  } else {
    symbols = {Complex<Scalar>(1, 0)};
  }

  const Scalar amp = Scalar(1) / std::sqrt(Scalar(spec.n_a));
  const auto& acts = book.legal_activations;
  const std::size_t n_sets = acts.size();
  const std::size_t n_im = quadrature ? n_sets : 1;
  book.words.reserve(n_sets * n_im * symbols.size());
  for (std::size_t re = 0; re < n_sets; ++re) {
    for (std::size_t im = 0; im < n_im; ++im) {
      for (std::size_t s = 0; s < symbols.size(); ++s) {
        Codeword<Scalar> w;
        w.label = Label(book.words.size());
        w.active_re = acts[re];
        w.active_im = quadrature ? acts[im] : acts[re];
        w.symbol_index = int(s);
        w.symbol = symbols[s];
        w.tx_vector = CVector<Scalar>::Zero(spec.n_t);
        if (quadrature) {
          for (int a : w.active_re) w.tx_vector[a] += Complex<Scalar>(w.symbol.real() * amp, 0);
          for (int a : w.active_im) w.tx_vector[a] += Complex<Scalar>(0, w.symbol.imag() * amp);
        } else {
          for (int a : w.active_re) w.tx_vector[a] = w.symbol * amp;
        }
        book.words.push_back(std::move(w));
      }
    }
  }
  return book;
}

}  // namespace wptim
