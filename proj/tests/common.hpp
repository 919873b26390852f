#pragma once

#include <string>

#include "paraswap/config.hpp"

namespace paraswap::test {

inline std::string reference_config_path() {
  return std::string(PARASWAP_SOURCE_DIR) + "/configs/reference.json";
}

inline const RunConfig& reference() {
  static const RunConfig cfg = load_config(reference_config_path());
  return cfg;
}

inline const DeviceParams& device() { return reference().device; }

inline double point_phi(int i) {
  return device().coupler_flux_map.to_phi(reference().points.at(i).flux_mv);
}

}  // namespace paraswap::test
