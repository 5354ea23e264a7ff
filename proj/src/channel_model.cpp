#include "wptim/channel_model.hpp"

#include <cmath>

namespace wptim {

double path_loss_db(double distance_m) {
  if (!(distance_m > 0.0)) throw std::invalid_argument("distance must be positive");
  return 35.3 + 37.6 * std::log10(distance_m);
}

double path_gain_amplitude(std::optional<double> distance_m) {
  if (!distance_m) return 1.0;
  return std::pow(10.0, -path_loss_db(*distance_m) / 20.0);
}

}  // namespace wptim
