#include "wptim/experiment_harness.hpp"

#include <doctest.h>

#include <sstream>

using namespace wptim;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

ExperimentConfig tiny_ber() {
  return parse(
      "scheme = SSK\nnt = 2\nn_ir = 1\nn_eve = 1\nrho = 0\n"
      "snr_db = 0, 10, 20\nn_subbands = 1\ntrials = 4000\nseed = 3\n");
}

}  // namespace

TEST_CASE("config parsing fills every field") {
  const auto c = parse(
      "# comment line\n"
      "scheme = gsm   # trailing comment\n"
      "nt = 8\nna = 2\nmod_order = 16\n"
      "n_ir = 3\nn_eh = 2\nn_eve = 4\n"
      "d_eh = 2.0\nd_ir = 1.0\n"
      "flat_subbands = false\n"
      "rho = 0, 0.25, 0.5\n"
      "snr_db = -5, 5\n"
      "n_subbands = 1, 2\n"
      "pt_dbm = 30\n"
      "gamma_in_dbm = -30\n"
      "trials = 123\nrealizations = 7\nn_channels = 100\nn_noise = 200\n"
      "simulate_eve = no\neve_whiten = yes\nnoiseless = off\n"
      "seed = 42\noutput = out.csv\n");
  CHECK(c.scheme.kind == SchemeKind::GSM);
  CHECK(c.scheme.n_t == 8);
  CHECK(c.scheme.n_a == 2);
  CHECK(c.scheme.m == 16);
  CHECK(c.n_ir == 3);
  CHECK(c.n_eh == 2);
  CHECK(c.rectenna.n_eh == 2);
  CHECK(c.n_eve == 4);
  CHECK(c.d_eh == 2.0);
  CHECK(c.d_ir == 1.0);
  CHECK_FALSE(c.d_eve.has_value());
  CHECK_FALSE(c.flat_subbands);
  CHECK(c.rho == std::vector<double>{0, 0.25, 0.5});
  CHECK(c.snr_db == std::vector<double>{-5, 5});
  CHECK(c.n_subbands == std::vector<int>{1, 2});
  CHECK(c.p_t() == doctest::Approx(1.0));
  CHECK(c.rectenna.gamma_in == doctest::Approx(1e-6));
  CHECK(c.trials == 123);
  CHECK(c.realizations == 7);
  CHECK_FALSE(c.simulate_eve);
  CHECK(c.eve_whiten);
  CHECK_FALSE(c.noiseless);
  CHECK(c.seed == 42u);
  CHECK(c.output == "out.csv");
}

TEST_CASE("config errors name the offending line") {
  auto message = [](const std::string& text) {
    try {
      parse(text);
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("nt = 4\nbogus = 1\n").find("line 2") != std::string::npos);
  CHECK(message("nt = 4\nbogus = 1\n").find("bogus") != std::string::npos);
  CHECK(message("nt = four\n").find("line 1") != std::string::npos);
  CHECK(message("no equals sign\n").find("line 1") != std::string::npos);
  CHECK(message("rho = 0.5, 0.2\n") != "no error");
  CHECK(message("rho = 1.5\n") != "no error");
  CHECK(message("rho = 0.1,,0.2\n") != "no error");
  CHECK(message("n_subbands = 0\n") != "no error");
  CHECK(message("scheme = SM\n") != "no error");  // M = 1 is not a modulated scheme
  CHECK(message("simulate_eve = maybe\n") != "no error");
  CHECK(message("d_eh = -1\n") != "no error");
  CHECK(message("trials = 2.5\n") != "no error");
  CHECK(message("") == "no error");
  CHECK_THROWS_AS(load_config("/nonexistent/config.cfg"), std::invalid_argument);
}

TEST_CASE("noiseless links make no IR errors") {
  auto c = tiny_ber();
  c.noiseless = true;
  c.trials = 500;
  for (const auto& r : run_ber_sweep(c)) CHECK(r.bit_errors_ir == 0);
}

TEST_CASE("simulated BER falls with SNR and tracks the analytic curve") {
  const auto rows = run_ber_sweep(tiny_ber());
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].ber_ir > rows[1].ber_ir);
  CHECK(rows[1].ber_ir > rows[2].ber_ir);
  for (const auto& r : rows) {
    CHECK(r.n_trials == 4000);
    CHECK(r.scheme == "SSK/nt=2/na=1");
    CHECK(r.eve_simulated);
    // Two codewords: the union bound is exact.
    if (r.bit_errors_ir >= 100) CHECK(std::abs(r.ber_ir - r.aber_ir_analytic) < 4 * r.ber_ir_std_err);
  }
}

TEST_CASE("sweep output does not depend on the thread count") {
  auto c = tiny_ber();
  c.trials = 1500;
  c.rho = {0.0};
  CHECK(ber_csv(run_ber_sweep(c, 1)) == ber_csv(run_ber_sweep(c, 4)));

  auto z = parse("scheme = QSSK\nnt = 4\nrho = 0, 0.5\nn_subbands = 1, 2\nrealizations = 6\n");
  CHECK(zdc_csv(run_zdc_sweep(z, 1)) == zdc_csv(run_zdc_sweep(z, 3)));

  auto e = parse("scheme = SSK\nnt = 4\nrho = 0.3\nsnr_db = 10\nn_subbands = 1\nn_channels = 100\nn_noise = 100\n");
  CHECK(esr_csv(run_esr_sweep(e, 1)) == esr_csv(run_esr_sweep(e, 2)));
}

TEST_CASE("CSV headers") {
  auto c = tiny_ber();
  c.trials = 100;
  c.snr_db = {10};
  const auto rows = run_ber_sweep(c);
  CHECK(first_line(analysis_csv(rows)) == "scheme,snr_db,aber_analytic,aber_simulated,aber_eve_analytic,aber_eve_simulated");
  CHECK(first_line(ber_csv(rows)).rfind("scheme,rho,n_subbands,snr_db,ber_ir,", 0) == 0);
  CHECK(first_line(esr_csv({})) == "scheme,rho,n_subbands,snr_db,esr_bits,std_err");
  CHECK(first_line(zdc_csv({})) == "scheme,rho,n_subbands,z_dc,std_err,p_dc_w,n_realizations");
}

TEST_CASE("Eve columns read nan when Eve is not simulated") {
  auto c = tiny_ber();
  c.trials = 100;
  c.snr_db = {10};
  c.simulate_eve = false;
  const auto csv = analysis_csv(run_ber_sweep(c));
  const auto row = csv.substr(csv.find('\n') + 1);
  CHECK(row.find(",nan") != std::string::npos);
}

TEST_CASE("ESR sweep rows are non-negative and bounded by eta") {
  const auto e = parse("scheme = SM\nnt = 4\nmod_order = 2\nrho = 0, 0.4\nsnr_db = 0, 20\nn_subbands = 1\nn_channels = 100\nn_noise = 100\n");
  const auto rows = run_esr_sweep(e);
  CHECK(rows.size() == 4);
  for (const auto& r : rows) {
    CHECK(r.esr_bits >= 0.0);
    CHECK(r.esr_bits <= r.eta);
    CHECK(int(r.samples.size()) == r.n_channels);
  }
}

TEST_CASE("z_DC sweep keeps paired samples per realization") {
  const auto z = parse("scheme = GSSK\nnt = 5\nna = 2\nrho = 0, 1\nn_subbands = 1\nrealizations = 5\n");
  const auto rows = run_zdc_sweep(z);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.samples.size() == 5u);
    CHECK(r.z_dc > 0.0);
  }
}

TEST_CASE("AN without a nullspace is refused") {
  auto c = tiny_ber();
  c.rho = {0.2};
  c.n_ir = 2;  // n_ir = n_t
  CHECK_THROWS_AS(run_ber_sweep(c), std::invalid_argument);
}

TEST_CASE("invariant suite passes and catches a wrong AN weighting") {
  const auto ok = validate();
  for (const auto& r : ok) {
    CAPTURE(r.name);
    CAPTURE(r.detail);
    CHECK(r.passed);
  }
  CHECK(format_report(ok).find("FAIL") == std::string::npos);

  ValidationOptions bad;
  bad.an_weights = std::vector<double>{1.0, 1.0};
  bool flagged = false;
  for (const auto& r : validate(bad)) flagged = flagged || (r.name == "an_power" && !r.passed);
  CHECK(flagged);
}

TEST_CASE("harvesting presets all carry 8 bits") {
  const auto presets = harvesting_presets();
  CHECK(presets.size() == 8);
  for (const auto& s : presets) CHECK(spectral_efficiency(s) == 8);
}
