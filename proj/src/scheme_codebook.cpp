#include "wptim/scheme_codebook.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <limits>

namespace wptim {

bool is_quadrature(SchemeKind kind) {
  return kind == SchemeKind::QSSK || kind == SchemeKind::GQSSK || kind == SchemeKind::QSM || kind == SchemeKind::GQSM;
}

bool carries_symbol(SchemeKind kind) {
  return kind == SchemeKind::SM || kind == SchemeKind::GSM || kind == SchemeKind::QSM || kind == SchemeKind::GQSM;
}

bool is_generalized(SchemeKind kind) {
  return kind == SchemeKind::GSSK || kind == SchemeKind::GSM || kind == SchemeKind::GQSSK || kind == SchemeKind::GQSM;
}

std::string_view to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::SSK: return "SSK";
    case SchemeKind::GSSK: return "GSSK";
    case SchemeKind::SM: return "SM";
    case SchemeKind::GSM: return "GSM";
    case SchemeKind::QSSK: return "QSSK";
    case SchemeKind::GQSSK: return "GQSSK";
    case SchemeKind::QSM: return "QSM";
    case SchemeKind::GQSM: return "GQSM";
  }
  return "?";
}

SchemeKind parse_scheme(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return char(std::toupper(c)); });
  for (SchemeKind k : kAllSchemes) {
    if (to_string(k) == upper) return k;
  }
  throw std::invalid_argument("unknown scheme: " + std::string(name));
}

namespace {

// C(n, k), saturating at the largest uint64.
std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (int i = 1; i <= k; ++i) {
    c = c * unsigned(n - k + i) / unsigned(i);
    if (c > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return std::uint64_t(c);
}

}  // namespace

int index_bits(int n_t, int n_a) {
  if (n_a < 1 || n_a > n_t) throw std::invalid_argument("need 1 <= n_a <= n_t");
  const std::uint64_t c = binomial(n_t, n_a);
  return int(std::bit_width(c)) - 1;
}

int SchemeSpec::symbol_bits() const {
  if (!carries_symbol(kind)) return 0;
  return int(std::bit_width(unsigned(m))) - 1;
}

std::string SchemeSpec::describe() const {
  std::string s(to_string(kind));
  s += " nt=" + std::to_string(n_t) + " na=" + std::to_string(n_a);
  if (carries_symbol(kind)) s += " M=" + std::to_string(m);
  return s;
}

void SchemeSpec::validate() const {
  if (n_t < 2) throw std::invalid_argument("n_t must be at least 2");
  if (n_a < 1 || n_a > n_t) throw std::invalid_argument("need 1 <= n_a <= n_t");
  if (m < 1 || (m & (m - 1)) != 0) throw std::invalid_argument("constellation order must be a power of 2");
  if (!is_generalized(kind) && n_a != 1) throw std::invalid_argument(std::string(to_string(kind)) + " activates one antenna per index group");
  if (carries_symbol(kind)) {
    if (m < 2) throw std::invalid_argument(std::string(to_string(kind)) + " needs a constellation order >= 2");
    // A real-valued constellation leaves the quadrature index group silent.
    if (is_quadrature(kind) && m < 4) throw std::invalid_argument("quadrature schemes need M >= 4");
  } else if (m != 1) {
    throw std::invalid_argument(std::string(to_string(kind)) + " carries no constellation symbol; use M = 1");
  }
  if (index_bits(n_t, n_a) < 1) throw std::invalid_argument("scheme carries no index bits");
}

int spectral_efficiency(const SchemeSpec& spec) {
  spec.validate();
  const int idx = index_bits(spec.n_t, spec.n_a);
  return (is_quadrature(spec.kind) ? 2 * idx : idx) + spec.symbol_bits();
}

std::vector<AntennaSet> enumerate_legal_activations(int n_t, int n_a) {
  const int bits = index_bits(n_t, n_a);
  if (bits > 30) throw std::invalid_argument("too many legal activations to enumerate");
  const std::size_t wanted = std::size_t(1) << bits;
  std::vector<AntennaSet> out;
  out.reserve(wanted);
  AntennaSet cur(n_a);
  for (int i = 0; i < n_a; ++i) cur[i] = i;
  while (out.size() < wanted) {
    out.push_back(cur);
    // Advance to the next combination in lexicographic order.
    int i = n_a - 1;
    while (i >= 0 && cur[i] == n_t - n_a + i) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < n_a; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

int bit_errors(Label j, Label k) { return std::popcount(j ^ k); }

}  // namespace wptim
