#include "wptim/experiment_harness.hpp"

#include "wptim/channel_model.hpp"
#include "wptim/error_analysis.hpp"
#include "wptim/ml_detection.hpp"
#include "wptim/parallel.hpp"
#include "wptim/secrecy_analysis.hpp"
#include "wptim/waveform_power.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>

namespace wptim {

namespace {

// Trials per parallel task. Streams stay keyed per trial, so this only
// affects scheduling granularity.
constexpr std::int64_t kChunk = 256;

void require_an_support(const ExperimentConfig& c) {
  const bool any_an = c.rho.back() > 0;
  if (any_an && c.n_ir >= c.scheme.n_t) throw std::invalid_argument("artificial noise needs n_ir < n_t");
}

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Scheme column, e.g. "SM/nt=16/na=1/M=16".
std::string scheme_tag(const SchemeSpec& spec) {
  auto s = spec.describe();
  std::replace(s.begin(), s.end(), ' ', '/');
  return s;
}

std::string prob(double v) {
  if (std::isnan(v)) return "nan";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

// Exact integer error moments of one chunk; merging is order-free.
struct ErrorCounts {
  std::int64_t trials = 0;
  std::int64_t s1_ir = 0, s2_ir = 0;
  std::int64_t s1_eve = 0, s2_eve = 0;
};

std::pair<double, double> ber_mean_se(std::int64_t s1, std::int64_t s2, std::int64_t n, int eta) {
  const double t = double(n);
  const double mean = double(s1) / t;
  double var = n > 1 ? (double(s2) / t - mean * mean) * t / (t - 1.0) : 0.0;
  var = std::max(var, 0.0);
  return {mean / eta, std::sqrt(var / t) / eta};
}

}  // namespace

std::vector<BerRow> run_ber_sweep(const ExperimentConfig& config, unsigned threads) {
  config.validate();
  require_an_support(config);
  const auto book = build_codebook<double>(config.scheme);
  const std::string name = scheme_tag(config.scheme);
  const double p_t = config.p_t();
  const auto L = std::uniform_int_distribution<Label>::param_type(0, Label(book.size() - 1));

  std::vector<BerRow> rows;
  for (double rho : config.rho) {
    const auto split = PowerSplit<double>::make(p_t, rho);
    for (int n_sub : config.n_subbands) {
      const double scale = split.subband_scale(n_sub);
      for (double snr : config.snr_db) {
        const double sigma2 = p_t / db_to_linear(snr);

        auto chunk = [&](std::size_t c) {
          ErrorCounts acc;
          const std::int64_t begin = std::int64_t(c) * kChunk;
          const std::int64_t end = std::min(config.trials, begin + kChunk);
          for (std::int64_t t = begin; t < end; ++t) {
            Engine rng = make_stream(config.seed, std::uint64_t(Experiment::Ber), std::uint64_t(t));
            const auto h = draw_channel<double>(rng, Link::IR, config.n_ir, config.scheme.n_t, n_sub, config.flat_subbands,
                                                config.d_ir);
            const Label label = std::uniform_int_distribution<Label>(L)(rng);
            const auto w = compose_transmit(book[label], split, n_sub);
            SubbandMatrices<double> bases;
            Subbands<double> eps;
            if (split.lambda_u2 > 0) {
              bases = nullspace_bases(h);
              eps = generate_an(rng, bases, split.lambda_u2);
            }

            Subbands<double> y;
            if (config.noiseless) {
              NoiseDraw<double> quiet;
              quiet.samples.assign(std::size_t(n_sub), CVector<double>::Zero(config.n_ir));
              y = receive_baseband(h, w, eps, quiet);
            } else {
              y = observe(rng, h, w, eps, sigma2);
            }
            const int e_ir = bit_errors(label, ml_detect(book, h, y, scale).label_hat);
            acc.s1_ir += e_ir;
            acc.s2_ir += std::int64_t(e_ir) * e_ir;

            if (config.simulate_eve) {
              const auto g = draw_channel<double>(rng, Link::Eve, config.n_eve, config.scheme.n_t, n_sub,
                                                  config.flat_subbands, config.d_eve);
              Subbands<double> ye;
              std::optional<SubbandMatrices<double>> psi;
              if (config.noiseless) {
                NoiseDraw<double> quiet;
                quiet.samples.assign(std::size_t(n_sub), CVector<double>::Zero(config.n_eve));
                ye = receive_baseband(g, w, eps, quiet);
              } else {
                ye = observe(rng, g, w, eps, sigma2);
                if (config.eve_whiten && split.lambda_u2 > 0) {
                  psi.emplace();
                  for (int n = 0; n < n_sub; ++n) {
                    const auto cov = eve_covariance<double>(g[std::size_t(n)], bases[std::size_t(n)], split.lambda_u2,
                                                            sigma2, n_sub);
                    psi->push_back(whitening_matrix<double>(cov, sigma2));
                  }
                }
              }
              const int e_eve = bit_errors(label, ml_detect_eve(book, g, ye, scale, psi).label_hat);
              acc.s1_eve += e_eve;
              acc.s2_eve += std::int64_t(e_eve) * e_eve;
            }
            ++acc.trials;
          }
          return acc;
        };
        const auto n_chunks = std::size_t((config.trials + kChunk - 1) / kChunk);
        const auto parts = parallel_map(n_chunks, threads, chunk);
        ErrorCounts total;
        for (const auto& p : parts) {
          total.trials += p.trials;
          total.s1_ir += p.s1_ir;
          total.s2_ir += p.s2_ir;
          total.s1_eve += p.s1_eve;
          total.s2_eve += p.s2_eve;
        }

        BerRow row;
        row.scheme = name;
        row.rho = rho;
        row.n_subbands = n_sub;
        row.snr_db = snr;
        row.n_trials = total.trials;
        row.bit_errors_ir = total.s1_ir;
        row.bit_errors_eve = total.s1_eve;
        std::tie(row.ber_ir, row.ber_ir_std_err) = ber_mean_se(total.s1_ir, total.s2_ir, total.trials, book.eta);
        row.eve_simulated = config.simulate_eve;
        if (config.simulate_eve) {
          std::tie(row.ber_eve, row.ber_eve_std_err) = ber_mean_se(total.s1_eve, total.s2_eve, total.trials, book.eta);
        }
        if (!config.noiseless) {
          const double pg_ir = path_gain_amplitude(config.d_ir) * path_gain_amplitude(config.d_ir);
          const double pg_eve = path_gain_amplitude(config.d_eve) * path_gain_amplitude(config.d_eve);
          row.aber_ir_analytic = aber_union_bound<double>(
              book, [&](Label j, Label k) { return nu_bar_ir(book, j, k, split.lambda_s2, sigma2, n_sub, pg_ir); },
              config.n_ir);
          row.aber_eve_analytic = aber_union_bound<double>(
              book,
              [&](Label j, Label k) {
                return nu_bar_eve(book, j, k, split.lambda_s2, split.lambda_u2, sigma2, n_sub, pg_eve);
              },
              config.n_eve);
        }
        row.low_confidence = row.ber_ir <= 0 || double(total.trials) * row.ber_ir < 100.0;
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::vector<ZdcRow> run_zdc_sweep(const ExperimentConfig& config, unsigned threads) {
  config.validate();
  require_an_support(config);
  const auto book = build_codebook<double>(config.scheme);
  const std::string name = scheme_tag(config.scheme);
  const double p_t = config.p_t();
  const auto L = std::uniform_int_distribution<Label>::param_type(0, Label(book.size() - 1));
  auto params = config.rectenna;
  params.n_eh = config.n_eh;

  std::vector<ZdcRow> rows;
  for (double rho : config.rho) {
    const auto split = PowerSplit<double>::make(p_t, rho);
    for (int n_sub : config.n_subbands) {
      const auto plan = PassbandPlan::make(n_sub, config.f1_hz, config.delta_f_hz);
      // Realization r draws the same channels and codeword at every grid point.
      auto one = [&](std::size_t r) {
        Engine rng = make_stream(config.seed, std::uint64_t(Experiment::Zdc), r);
        const auto g = draw_channel<double>(rng, Link::EH, config.n_eh, config.scheme.n_t, n_sub, config.flat_subbands,
                                            config.d_eh);
        const auto h = draw_channel<double>(rng, Link::IR, config.n_ir, config.scheme.n_t, n_sub, config.flat_subbands,
                                            config.d_ir);
        const Label label = std::uniform_int_distribution<Label>(L)(rng);
        const auto w = compose_transmit(book[label], split, n_sub);
        Subbands<double> eps;
        if (split.lambda_u2 > 0) eps = generate_an(rng, nullspace_bases(h), split.lambda_u2);
        return harvest(passband_samples_eh(g, w, eps, plan), params);
      };
      const auto reports = parallel_map(std::size_t(config.realizations), threads, one);
      MomentSum z, p;
      ZdcRow row;
      row.samples.reserve(reports.size());
      for (const auto& rep : reports) {
        z.add(rep.z_dc);
        p.add(rep.p_dc_total);
        row.samples.push_back(rep.z_dc);
      }
      row.scheme = name;
      row.rho = rho;
      row.n_subbands = n_sub;
      row.z_dc = z.mean();
      row.std_err = z.std_err();
      row.p_dc_w = p.mean();
      row.n_realizations = int(reports.size());
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<EsrRow> run_esr_sweep(const ExperimentConfig& config, unsigned threads) {
  config.validate();
  require_an_support(config);
  if (config.n_channels < 100) throw std::invalid_argument("ergodic averaging needs n_channels >= 100");
  if (config.n_noise < 100) throw std::invalid_argument("MI estimation needs n_noise >= 100");
  const auto book = build_codebook<double>(config.scheme);
  const std::string name = scheme_tag(config.scheme);

  std::vector<EsrRow> rows;
  for (double rho : config.rho) {
    for (int n_sub : config.n_subbands) {
      for (double snr : config.snr_db) {
        EsrSetup setup;
        setup.scheme = config.scheme;
        setup.n_ir = config.n_ir;
        setup.n_eve = config.n_eve;
        setup.n_subbands = n_sub;
        setup.p_t = config.p_t();
        setup.rho = rho;
        setup.snr_db = snr;
        setup.d_ir = config.d_ir;
        setup.d_eve = config.d_eve;
        setup.flat_subbands = config.flat_subbands;
        setup.n_channels = config.n_channels;
        setup.n_noise = config.n_noise;
        setup.whiten_eve = true;

        std::vector<std::array<double, 4>> detail;
        auto samples = secrecy_rate_samples(setup, book, config.seed, std::uint64_t(Experiment::Esr), threads, &detail);
        MomentSum esr, ir, eve;
        EsrRow row;
        row.worst_bound_excursion = -1e300;
        for (const auto& d : detail) {
          esr.add(d[0]);
          ir.add(d[1]);
          eve.add(d[2]);
          row.worst_bound_excursion = std::max(row.worst_bound_excursion, d[3]);
        }
        row.scheme = name;
        row.rho = rho;
        row.n_subbands = n_sub;
        row.snr_db = snr;
        row.esr_bits = esr.mean();
        row.std_err = esr.std_err();
        row.mi_ir = ir.mean();
        row.mi_eve = eve.mean();
        row.eta = book.eta;
        row.n_channels = int(samples.size());
        row.samples = std::move(samples);
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::string ber_csv(const std::vector<BerRow>& rows) {
  std::string out =
      "scheme,rho,n_subbands,snr_db,ber_ir,ber_ir_std_err,aber_ir_analytic,ber_eve,ber_eve_std_err,aber_eve_analytic,"
      "n_trials,low_confidence\n";
  for (const auto& r : rows) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out += r.scheme + "," + num(r.rho) + "," + std::to_string(r.n_subbands) + "," + num(r.snr_db) + "," + prob(r.ber_ir) +
           "," + prob(r.ber_ir_std_err) + "," + prob(r.aber_ir_analytic) + "," + prob(r.eve_simulated ? r.ber_eve : nan) +
           "," + prob(r.eve_simulated ? r.ber_eve_std_err : nan) + "," + prob(r.aber_eve_analytic) + "," + std::to_string(r.n_trials) + "," +
           (r.low_confidence ? "1" : "0") + "\n";
  }
  return out;
}

std::string zdc_csv(const std::vector<ZdcRow>& rows) {
  std::string out = "scheme,rho,n_subbands,z_dc,std_err,p_dc_w,n_realizations\n";
  for (const auto& r : rows) {
    out += r.scheme + "," + num(r.rho) + "," + std::to_string(r.n_subbands) + "," + prob(r.z_dc) + "," + prob(r.std_err) +
           "," + prob(r.p_dc_w) + "," + std::to_string(r.n_realizations) + "\n";
  }
  return out;
}

std::string esr_csv(const std::vector<EsrRow>& rows) {
  std::string out = "scheme,rho,n_subbands,snr_db,esr_bits,std_err\n";
  for (const auto& r : rows) {
    out += r.scheme + "," + num(r.rho) + "," + std::to_string(r.n_subbands) + "," + num(r.snr_db) + "," +
           prob(r.esr_bits) + "," + prob(r.std_err) + "\n";
  }
  return out;
}

std::string analysis_csv(const std::vector<BerRow>& rows) {
  std::string out = "scheme,snr_db,aber_analytic,aber_simulated,aber_eve_analytic,aber_eve_simulated\n";
  if (rows.empty()) return out;
  const double rho = rows.front().rho;
  const int n_sub = rows.front().n_subbands;
  for (const auto& r : rows) {
    if (r.rho != rho || r.n_subbands != n_sub) continue;
    const double eve = r.eve_simulated ? r.ber_eve : std::numeric_limits<double>::quiet_NaN();
    out += r.scheme + "," + num(r.snr_db) + "," + prob(r.aber_ir_analytic) + "," + prob(r.ber_ir) + "," +
           prob(r.aber_eve_analytic) + "," + prob(eve) + "\n";
  }
  return out;
}

}  // namespace wptim
