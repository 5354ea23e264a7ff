#include "wptim/experiment_harness.hpp"

#include "wptim/channel_model.hpp"
#include "wptim/energy_harvester.hpp"
#include "wptim/error_analysis.hpp"
#include "wptim/ml_detection.hpp"
#include "wptim/parallel.hpp"
#include "wptim/secrecy_analysis.hpp"
#include "wptim/waveform_power.hpp"

#include <cstdio>
#include <set>
#include <sstream>

namespace wptim {

namespace {

std::string fmt(const char* f, double a, double b = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

const std::vector<SchemeSpec>& small_schemes() {
  static const std::vector<SchemeSpec> specs = {
      {SchemeKind::SSK, 4, 1, 1},  {SchemeKind::GSSK, 5, 2, 1}, {SchemeKind::SM, 4, 1, 4},   {SchemeKind::GSM, 4, 2, 4},
      {SchemeKind::QSSK, 4, 1, 1}, {SchemeKind::GQSSK, 4, 2, 1}, {SchemeKind::QSM, 4, 1, 4}, {SchemeKind::GQSM, 4, 2, 4},
  };
  return specs;
}

CheckResult check_codebooks() {
  CheckResult r{"codebook_bijectivity", true, ""};
  for (const auto& spec : small_schemes()) {
    const auto book = build_codebook<double>(spec);
    const bool size_ok = book.size() == (std::size_t(1) << book.eta);
    std::set<std::string> seen;
    double power = 0;
    bool round_trip = true;
    for (std::size_t l = 0; l < book.size(); ++l) {
      const auto& w = book[l];
      std::ostringstream key;
      for (Eigen::Index i = 0; i < w.tx_vector.size(); ++i) {
        key << std::llround(w.tx_vector[i].real() * 1e9) << ':' << std::llround(w.tx_vector[i].imag() * 1e9) << ';';
      }
      seen.insert(key.str());
      power += w.tx_vector.squaredNorm();
      round_trip = round_trip && book.label_for(w.active_re, w.active_im, w.symbol_index) == Label(l);
    }
    power /= double(book.size());
    if (!size_ok || seen.size() != book.size() || !round_trip || std::abs(power - 1.0) > 1e-12) {
      r.passed = false;
      r.detail = spec.describe();
      return r;
    }
  }
  r.detail = "8 schemes";
  return r;
}

CheckResult check_nullspace(Engine& rng) {
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const auto h = draw_channel<double>(rng, Link::IR, 2, 4, 1, true, std::nullopt);
    const auto eps = generate_an(rng, nullspace_bases(h), 1.0);
    worst = std::max(worst, (h[0] * eps[0]).norm() / eps[0].norm());
  }
  return {"nullspace_residual", worst <= 1e-10, fmt("max |H eps|/|eps| = %.3e", worst)};
}

CheckResult check_an_power(Engine& rng, const std::optional<std::vector<double>>& weights) {
  const double lambda_u2 = 2.0;
  const int n_sub = 3;
  const auto h = draw_channel<double>(rng, Link::IR, 2, 4, n_sub, false, std::nullopt);
  const auto bases = nullspace_bases(h);
  std::optional<Eigen::VectorXd> delta;
  if (weights) delta = Eigen::Map<const Eigen::VectorXd>(weights->data(), Eigen::Index(weights->size()));
  MomentSum power;
  const int draws = 20000;
  for (int t = 0; t < draws; ++t) {
    const auto eps = generate_an(rng, bases, lambda_u2, delta);
    double p = 0;
    for (const auto& e : eps) p += e.squaredNorm();
    power.add(p);
  }
  const double rel = std::abs(power.mean() - lambda_u2) / lambda_u2;
  const bool ok = std::abs(power.mean() - lambda_u2) <= 4.0 * power.std_err() + 1e-12;
  return {"an_power", ok, fmt("E|eps|^2 relative error %.3e", rel)};
}

CheckResult check_transmit_power() {
  const double p_t = dbm_to_watts(36.0);
  const auto split = PowerSplit<double>::make(p_t, 0.3);
  double worst = 0;
  for (const auto& spec : small_schemes()) {
    const auto book = build_codebook<double>(spec);
    for (int n_sub : {1, 3}) {
      double total = 0;
      for (std::size_t l = 0; l < book.size(); ++l) {
        for (const auto& w : compose_transmit(book[l], split, n_sub)) total += w.squaredNorm();
      }
      total /= double(book.size());
      worst = std::max(worst, std::abs(total - split.lambda_s2) / split.lambda_s2);
    }
  }
  return {"transmit_power", worst <= 1e-12, fmt("max relative error %.3e", worst)};
}

CheckResult check_passband_moments() {
  // One tone of amplitude A at f1 on a single antenna: E[y^2] = A^2/2, E[y^4] = 3A^4/8.
  ChannelTensor<double> g;
  g.link = Link::EH;
  g.gains = {CMatrix<double>::Identity(1, 1)};
  const double a = 0.7;
  const Subbands<double> w = {CVector<double>::Constant(1, Complex<double>(0, a))};
  const auto y = passband_samples_eh(g, w, {}, PassbandPlan::make(1));
  const auto m = signal_moments(y.row(0));
  const double e2 = std::abs(m.m2 - a * a / 2) / (a * a / 2);
  const double e4 = std::abs(m.m4 - 3 * a * a * a * a / 8) / (3 * a * a * a * a / 8);
  return {"passband_moments", e2 <= 1e-9 && e4 <= 1e-9, fmt("relative errors %.2e, %.2e", e2, e4)};
}

CheckResult check_channel_moments(Engine& rng) {
  MomentSum p;
  for (int i = 0; i < 500; ++i) {
    const auto h = draw_channel<double>(rng, Link::IR, 4, 8, 1, true, std::nullopt);
    for (Eigen::Index k = 0; k < h[0].size(); ++k) p.add(std::norm(h[0].data()[k]));
  }
  const bool ok = std::abs(p.mean() - 1.0) <= 4.0 * p.std_err();
  return {"channel_moments", ok, fmt("E|h|^2 = %.4f", p.mean())};
}

CheckResult check_cpep(Engine& rng, bool eve) {
  const SchemeSpec spec{SchemeKind::SM, 4, 1, 4};
  const auto book = build_codebook<double>(spec);
  const auto split = PowerSplit<double>::make(1.0, eve ? 0.4 : 0.0);
  const int n_sub = 2;
  const double scale = split.subband_scale(n_sub);
  const double sigma2 = 0.5;
  const auto h = draw_channel<double>(rng, Link::IR, 2, 4, n_sub, false, std::nullopt);
  const auto g = draw_channel<double>(rng, Link::Eve, 2, 4, n_sub, false, std::nullopt);
  const Label j = 3, k = 6;

  const auto& link = eve ? g : h;
  const auto phi = phi_subbands(book, link.gains, j, k);
  SubbandMatrices<double> bases, covs, psi;
  double expected = 0;
  if (eve) {
    bases = nullspace_bases(h);
    for (int n = 0; n < n_sub; ++n) {
      covs.push_back(eve_covariance<double>(g[n], bases[n], split.lambda_u2, sigma2, n_sub));
      psi.push_back(whitening_matrix<double>(covs.back(), sigma2));
    }
    expected = cpep_eve(phi, covs, scale, sigma2);
  } else {
    expected = cpep(phi, scale, sigma2);
  }

  // Pairwise decision between x_j and x_k only.
  SubbandMatrices<double> eff = link.gains;
  if (eve) {
    for (int n = 0; n < n_sub; ++n) eff[n] = psi[n] * link[n];
  }
  const auto pts = received_constellation(book, eff, scale);
  const CVector<double> pj = pts.col(j), pk = pts.col(k);
  const auto w = compose_transmit(book[j], split, n_sub);
  const int draws = 200000;
  std::int64_t errors = 0;
  for (int t = 0; t < draws; ++t) {
    Subbands<double> eps;
    if (eve) eps = generate_an(rng, bases, split.lambda_u2);
    auto y = observe(rng, link, w, eps, sigma2);
    if (eve) {
      for (int n = 0; n < n_sub; ++n) y[n] = psi[n] * y[n];
    }
    const CVector<double> ys = stack(y);
    errors += (ys - pk).squaredNorm() < (ys - pj).squaredNorm();
  }
  const double p_hat = double(errors) / draws;
  const double se = std::sqrt(expected * (1 - expected) / draws);
  return {eve ? "cpep_oracle_eve" : "cpep_oracle_ir", std::abs(p_hat - expected) <= 4.0 * se + 1e-12,
          fmt("empirical %.5f vs Q(sqrt(gamma)) %.5f", p_hat, expected)};
}

CheckResult check_mi_bounds(Engine& rng) {
  const auto book = build_codebook<double>({SchemeKind::SM, 4, 1, 4});
  const auto h = draw_channel<double>(rng, Link::IR, 2, 4, 1, true, std::nullopt);
  bool ok = true;
  std::string detail;
  for (double sigma2 : {100.0, 1.0, 1e-3}) {
    const auto est = mutual_info(book, h.gains, 1.0, sigma2, 400, rng);
    const double lo = -3 * est.std_err, hi = book.eta + 3 * est.std_err;
    ok = ok && est.raw_value >= lo && est.raw_value <= hi;
    detail += fmt("%.3g:%.4f ", sigma2, est.raw_value);
  }
  const auto quiet = mutual_info(book, h.gains, 1.0, 1e-4, 200, rng);
  ok = ok && std::abs(quiet.value - book.eta) < 1e-3;
  return {"mi_bounds", ok, detail};
}

CheckResult check_detector(Engine& rng) {
  std::int64_t errors = 0;
  for (const auto& spec : small_schemes()) {
    const auto book = build_codebook<double>(spec);
    for (int t = 0; t < 50; ++t) {
      const auto h = draw_channel<double>(rng, Link::IR, 2, spec.n_t, 2, false, std::nullopt);
      const Label l = Label(std::uniform_int_distribution<std::size_t>(0, book.size() - 1)(rng));
      Subbands<double> y;
      for (int n = 0; n < 2; ++n) y.push_back(0.5 * h[n] * book[l].tx_vector);
      errors += ml_detect(book, h, y, 0.5).label_hat != l;
    }
  }
  return {"detector_roundtrip", errors == 0, std::to_string(errors) + " errors"};
}

}  // namespace

std::vector<CheckResult> validate(const ValidationOptions& options) {
  std::vector<CheckResult> out;
  auto guarded = [&](std::uint64_t id, auto&& check) {
    Engine rng = make_stream(options.seed, std::uint64_t(Experiment::Validate), id);
    try {
      out.push_back(check(rng));
    } catch (const std::exception& e) {
      out.push_back({"check_" + std::to_string(id), false, std::string("threw: ") + e.what()});
    }
  };
  guarded(0, [](Engine&) { return check_codebooks(); });
  guarded(1, [](Engine& rng) { return check_nullspace(rng); });
  guarded(2, [&](Engine& rng) { return check_an_power(rng, options.an_weights); });
  guarded(3, [](Engine&) { return check_transmit_power(); });
  guarded(4, [](Engine&) { return check_passband_moments(); });
  guarded(5, [](Engine& rng) { return check_channel_moments(rng); });
  guarded(6, [](Engine& rng) { return check_cpep(rng, false); });
  guarded(7, [](Engine& rng) { return check_cpep(rng, true); });
  guarded(8, [](Engine& rng) { return check_mi_bounds(rng); });
  guarded(9, [](Engine& rng) { return check_detector(rng); });
  return out;
}

std::string format_report(const std::vector<CheckResult>& results) {
  std::string out;
  for (const auto& r : results) {
    out += std::string(r.passed ? "PASS " : "FAIL ") + r.name;
    if (!r.detail.empty()) out += "  (" + r.detail + ")";
    out += "\n";
  }
  return out;
}

}  // namespace wptim
