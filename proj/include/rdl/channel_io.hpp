#pragma once

// JSON form of a channel:
//   {"n": int, "sigma": real, "peaks": [{"w": [re, im], "center": [[re, im], ...]}]}
// A peak may carry an optional "width" when it differs from the common sigma.

#include <cstdint>
#include <cstdio>
#include <string>

#include <json.hpp>

#include "rdl/channels.hpp"

namespace rdl {

inline nlohmann::json to_json(const ChannelSpec& spec) {
  nlohmann::json peaks = nlohmann::json::array();
  for (const auto& p : spec.peaks()) {
    nlohmann::json center = nlohmann::json::array();
    for (const auto& z : p.center) center.push_back({z.real(), z.imag()});
    nlohmann::json entry = {{"w", {p.weight.real(), p.weight.imag()}}, {"center", std::move(center)}};
    if (p.width != spec.sigma()) entry["width"] = p.width;
    peaks.push_back(std::move(entry));
  }
  return {{"n", spec.modes()}, {"sigma", spec.sigma()}, {"peaks", std::move(peaks)}};
}

inline ChannelSpec channel_from_json(const nlohmann::json& j) {
  try {
    const auto n = j.at("n").get<std::size_t>();
    const double sigma = j.at("sigma").get<double>();
    std::vector<Peak> peaks;
    for (const auto& entry : j.at("peaks")) {
      const auto& w = entry.at("w");
      std::vector<cplx> center;
      for (const auto& z : entry.at("center")) center.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
      peaks.push_back(Peak{{w.at(0).get<double>(), w.at(1).get<double>()},
                           ComplexVec(std::move(center)),
                           entry.contains("width") ? entry.at("width").get<double>() : 0.0});
    }
    return ChannelSpec(n, sigma, std::move(peaks));
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("channel JSON: ") + e.what());
  }
}

/// 64-bit FNV-1a over the canonical JSON text.
inline std::uint64_t channel_digest(const ChannelSpec& spec) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : to_json(spec).dump()) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string digest_hex(std::uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
  return buf;
}

}  // namespace rdl
