#include "wptim/experiment_harness.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace wptim {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double to_double(const std::string& v) {
  std::size_t used = 0;
  double d = 0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + v + "'");
  }
  if (used != v.size()) throw std::invalid_argument("not a number: '" + v + "'");
  return d;
}

std::int64_t to_int(const std::string& v) {
  std::int64_t i = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), i);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw std::invalid_argument("not an integer: '" + v + "'");
  return i;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("not a boolean: '" + v + "'");
}

template <typename T, typename Conv>
std::vector<T> to_list(const std::string& v, Conv conv) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto t = trim(item);
    if (t.empty()) throw std::invalid_argument("empty grid entry in '" + v + "'");
    out.push_back(T(conv(t)));
  }
  if (out.empty()) throw std::invalid_argument("empty grid");
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"scheme", [](auto& c, const auto& v) { c.scheme.kind = parse_scheme(v); }},
      {"nt", [](auto& c, const auto& v) { c.scheme.n_t = int(to_int(v)); }},
      {"na", [](auto& c, const auto& v) { c.scheme.n_a = int(to_int(v)); }},
      {"mod_order", [](auto& c, const auto& v) { c.scheme.m = int(to_int(v)); }},
      {"n_ir", [](auto& c, const auto& v) { c.n_ir = int(to_int(v)); }},
      {"n_eh", [](auto& c, const auto& v) {
         c.n_eh = int(to_int(v));
         c.rectenna.n_eh = c.n_eh;
       }},
      {"n_eve", [](auto& c, const auto& v) { c.n_eve = int(to_int(v)); }},
      {"d_eh", [](auto& c, const auto& v) { c.d_eh = to_double(v); }},
      {"d_ir", [](auto& c, const auto& v) { c.d_ir = to_double(v); }},
      {"d_eve", [](auto& c, const auto& v) { c.d_eve = to_double(v); }},
      {"flat_subbands", [](auto& c, const auto& v) { c.flat_subbands = to_bool(v); }},
      {"rho", [](auto& c, const auto& v) { c.rho = to_list<double>(v, to_double); }},
      {"snr_db", [](auto& c, const auto& v) { c.snr_db = to_list<double>(v, to_double); }},
      {"n_subbands", [](auto& c, const auto& v) { c.n_subbands = to_list<int>(v, to_int); }},
      {"pt_dbm", [](auto& c, const auto& v) { c.pt_dbm = to_double(v); }},
      {"f1_hz", [](auto& c, const auto& v) { c.f1_hz = to_double(v); }},
      {"delta_f_hz", [](auto& c, const auto& v) { c.delta_f_hz = to_double(v); }},
      {"k2", [](auto& c, const auto& v) { c.rectenna.k2 = to_double(v); }},
      {"k4", [](auto& c, const auto& v) { c.rectenna.k4 = to_double(v); }},
      {"r_ant", [](auto& c, const auto& v) { c.rectenna.r_ant = to_double(v); }},
      {"gamma_in_dbm", [](auto& c, const auto& v) { c.rectenna.gamma_in = dbm_to_watts(to_double(v)); }},
      {"gamma_sat_dbm", [](auto& c, const auto& v) { c.rectenna.gamma_sat = dbm_to_watts(to_double(v)); }},
      {"beta2", [](auto& c, const auto& v) { c.rectenna.beta2 = to_double(v); }},
      {"beta4", [](auto& c, const auto& v) { c.rectenna.beta4 = to_double(v); }},
      {"r_load", [](auto& c, const auto& v) { c.rectenna.r_load = to_double(v); }},
      {"trials", [](auto& c, const auto& v) { c.trials = to_int(v); }},
      {"realizations", [](auto& c, const auto& v) { c.realizations = int(to_int(v)); }},
      {"n_channels", [](auto& c, const auto& v) { c.n_channels = int(to_int(v)); }},
      {"n_noise", [](auto& c, const auto& v) { c.n_noise = int(to_int(v)); }},
      {"simulate_eve", [](auto& c, const auto& v) { c.simulate_eve = to_bool(v); }},
      {"eve_whiten", [](auto& c, const auto& v) { c.eve_whiten = to_bool(v); }},
      {"noiseless", [](auto& c, const auto& v) { c.noiseless = to_bool(v); }},
      {"seed", [](auto& c, const auto& v) { c.seed = std::uint64_t(to_int(v)); }},
      {"output", [](auto& c, const auto& v) { c.output = v; }},
  };
  return table;
}

template <typename T>
void require_sorted(const std::vector<T>& grid, const char* name) {
  if (grid.empty()) throw std::invalid_argument(std::string(name) + " grid is empty");
  if (!std::is_sorted(grid.begin(), grid.end())) throw std::invalid_argument(std::string(name) + " grid must be ascending");
}

}  // namespace

void ExperimentConfig::validate() const {
  scheme.validate();
  if (n_ir < 1 || n_eh < 1 || n_eve < 1) throw std::invalid_argument("antenna counts must be >= 1");
  if (!(d_eh > 0) || (d_ir && !(*d_ir > 0)) || (d_eve && !(*d_eve > 0))) throw std::invalid_argument("distances must be positive");
  require_sorted(rho, "rho");
  require_sorted(snr_db, "snr_db");
  require_sorted(n_subbands, "n_subbands");
  for (double r : rho) {
    if (r < 0 || r > 1) throw std::invalid_argument("rho must lie in [0, 1]");
  }
  for (int n : n_subbands) {
    if (n < 1) throw std::invalid_argument("n_subbands must be >= 1");
  }
  if (!(f1_hz > 0 && delta_f_hz > 0)) throw std::invalid_argument("tone frequencies must be positive");
  if (trials < 1 || realizations < 1 || n_channels < 1 || n_noise < 1) throw std::invalid_argument("trial counts must be >= 1");
  rectenna.validate();
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("line " + std::to_string(line_no) + ": expected key = value");
    const auto key = trim(std::string_view(body).substr(0, eq));
    const auto value = trim(std::string_view(body).substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw std::invalid_argument("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    try {
      it->second(c, value);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("line " + std::to_string(line_no) + " (" + key + "): " + e.what());
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config: " + path);
  return parse_config(in);
}

std::vector<SchemeSpec> harvesting_presets() {
  return {
      {SchemeKind::GSSK, 24, 2, 1},  {SchemeKind::GSM, 8, 2, 16}, {SchemeKind::SM, 16, 1, 16},
      {SchemeKind::SM, 64, 1, 4},    {SchemeKind::QSM, 8, 1, 4},  {SchemeKind::QSSK, 16, 1, 1},
      {SchemeKind::GQSM, 5, 2, 4},   {SchemeKind::GQSSK, 7, 2, 1},
  };
}

}  // namespace wptim
