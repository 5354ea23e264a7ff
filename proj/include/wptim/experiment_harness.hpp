// Configuration, seeded Monte Carlo sweeps, CSV emission, and the invariant
// suite behind the `simlab` command line.
#pragma once

#include "wptim/energy_harvester.hpp"
#include "wptim/scheme_codebook.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wptim {

struct ExperimentConfig {
  SchemeSpec scheme{SchemeKind::SSK, 4, 1, 1};
  int n_ir = 2;
  int n_eh = 4;
  int n_eve = 2;
  double d_eh = 1.5;
  // Unset distances leave the link normalized (no path loss).
  std::optional<double> d_ir;
  std::optional<double> d_eve;
  bool flat_subbands = true;
  std::vector<double> rho{0.2};
  std::vector<double> snr_db{0, 5, 10, 15, 20, 25, 30};  // P_T / N0
  std::vector<int> n_subbands{1, 3, 5};
  double pt_dbm = 36.0;
  double f1_hz = 1e5;
  double delta_f_hz = 1e3;
  RectennaParams<double> rectenna;
  std::int64_t trials = 10000;  // BER trials per operating point
  int realizations = 500;       // z_DC realizations per operating point
  int n_channels = 200;         // ESR channel draws
  int n_noise = 1000;           // ESR noise samples per channel
  bool simulate_eve = true;
  bool eve_whiten = false;  // BER only: Eve whitens the AN covariance instead of treating it as noise
  bool noiseless = false;
  std::uint64_t seed = 1;
  std::string output;

  double p_t() const { return dbm_to_watts(pt_dbm); }
  void validate() const;
};

// Flat `key = value` lines, `#` comments, comma-separated grids. Unknown keys
// and malformed values throw std::invalid_argument naming the line.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

struct BerRow {
  std::string scheme;
  double rho = 0;
  int n_subbands = 1;
  double snr_db = 0;
  double ber_ir = 0;
  double ber_ir_std_err = 0;
  double aber_ir_analytic = 0;
  double ber_eve = 0;
  double ber_eve_std_err = 0;
  double aber_eve_analytic = 0;
  std::int64_t n_trials = 0;
  std::int64_t bit_errors_ir = 0;
  std::int64_t bit_errors_eve = 0;
  bool eve_simulated = false;
  // Fewer than 100 / BER trials at this point.
  bool low_confidence = false;
};

struct ZdcRow {
  std::string scheme;
  double rho = 0;
  int n_subbands = 1;
  double z_dc = 0;
  double std_err = 0;
  double p_dc_w = 0;
  int n_realizations = 0;
  // Per-realization z_DC, kept for paired comparisons between points.
  std::vector<double> samples;
};

struct EsrRow {
  std::string scheme;
  double rho = 0;
  int n_subbands = 1;
  double snr_db = 0;
  double esr_bits = 0;
  double std_err = 0;
  double mi_ir = 0;
  double mi_eve = 0;
  int eta = 0;
  int n_channels = 0;
  double worst_bound_excursion = 0;
  std::vector<double> samples;
};

// Experiment ids separating the RNG streams of each sweep family.
enum class Experiment : std::uint64_t { Ber = 1, Zdc = 2, Esr = 3, Validate = 4 };

std::vector<BerRow> run_ber_sweep(const ExperimentConfig& config, unsigned threads = 1);
std::vector<ZdcRow> run_zdc_sweep(const ExperimentConfig& config, unsigned threads = 1);
std::vector<EsrRow> run_esr_sweep(const ExperimentConfig& config, unsigned threads = 1);

std::string ber_csv(const std::vector<BerRow>& rows);
std::string zdc_csv(const std::vector<ZdcRow>& rows);
std::string esr_csv(const std::vector<EsrRow>& rows);
// scheme, snr_db, aber_analytic, aber_simulated, aber_eve_analytic, aber_eve_simulated
// for the first rho and first subband count of the configuration.
std::string analysis_csv(const std::vector<BerRow>& rows);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationOptions {
  std::uint64_t seed = 1;
  // Overrides the AN weights delta_i used by the power checks (fault injection).
  std::optional<std::vector<double>> an_weights;
};

std::vector<CheckResult> validate(const ValidationOptions& options = {});
std::string format_report(const std::vector<CheckResult>& results);

// Schemes of the eta = 8 harvesting comparison (n_a = 2 for generalized variants).
std::vector<SchemeSpec> harvesting_presets();

}  // namespace wptim
