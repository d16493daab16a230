#pragma once

// Outcome file: one JSON header line, then N rows of 2n little-endian doubles
// (Re ζ₁, Im ζ₁, ..., Re ζₙ, Im ζₙ).

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include <json.hpp>

#include "rdl/channel_io.hpp"
#include "rdl/errors.hpp"
#include "rdl/measurement.hpp"

namespace rdl {

namespace detail {

inline std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t out = 0;
  for (int i = 0; i < 8; ++i) out |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
  return out;
}

inline nlohmann::json scheme_json(const SchemeConfig& s) {
  nlohmann::json j = {{"r", s.r}, {"T_b", s.t_before}, {"T_a", s.t_after}};
  if (std::isinf(s.s))
    j["s"] = nullptr;  // +inf
  else
    j["s"] = s.s;
  return j;
}

inline SchemeConfig scheme_from_json(const nlohmann::json& j) {
  SchemeConfig s;
  s.r = j.value("r", 0.0);
  s.t_before = j.value("T_b", 1.0);
  s.t_after = j.value("T_a", 1.0);
  if (j.contains("s") && !j.at("s").is_null()) s.s = j.at("s").get<double>();
  return s;
}

}  // namespace detail

inline nlohmann::json outcome_header(const OutcomeSamples& samples) {
  return {{"n", samples.n},
          {"N", samples.size()},
          {"scheme", detail::scheme_json(samples.scheme)},
          {"seed", samples.seed},
          {"substream", samples.substream},
          {"chunk_size", samples.chunk_size},
          {"channel_digest", digest_hex(samples.channel_id)}};
}

inline void write_outcomes(const std::string& path, const OutcomeSamples& samples) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << outcome_header(samples).dump() << '\n';
  for (const auto& z : samples.zeta) {
    for (double part : {z.real(), z.imag()}) {
      const std::uint64_t le = detail::to_little(std::bit_cast<std::uint64_t>(part));
      char buf[8];
      std::memcpy(buf, &le, 8);
      os.write(buf, 8);
    }
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

inline OutcomeSamples read_outcomes(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw config_error("cannot open " + path);
  std::string line;
  std::getline(is, line);
  OutcomeSamples out;
  std::size_t count = 0;
  try {
    const auto h = nlohmann::json::parse(line);
    out.n = h.at("n").get<std::size_t>();
    count = h.at("N").get<std::size_t>();
    out.scheme = detail::scheme_from_json(h.at("scheme"));
    out.seed = h.at("seed").get<std::uint64_t>();
    out.substream = h.at("substream").get<std::uint64_t>();
    out.chunk_size = h.at("chunk_size").get<std::size_t>();
    out.channel_id = std::stoull(h.at("channel_digest").get<std::string>(), nullptr, 16);
  } catch (const std::exception& e) {
    throw config_error(path + ": malformed outcome header: " + e.what());
  }
  // Check the payload size before allocating; a bad header must not trigger a huge resize.
  const auto data_start = is.tellg();
  is.seekg(0, std::ios::end);
  const auto available = static_cast<std::uint64_t>(is.tellg() - data_start);
  is.seekg(data_start);
  if (out.n == 0 || (count != 0 && out.n > std::numeric_limits<std::uint64_t>::max() / 16 / count))
    throw config_error(path + ": outcome header has an invalid shape");
  const std::uint64_t expected = static_cast<std::uint64_t>(count) * out.n * 16;
  if (available < expected) throw config_error(path + ": truncated outcome data");
  if (available > expected) throw config_error(path + ": trailing bytes after outcome data");
  out.zeta.resize(count * out.n);
  for (auto& z : out.zeta) {
    double parts[2];
    for (double& part : parts) {
      char buf[8];
      if (!is.read(buf, 8)) throw config_error(path + ": truncated outcome data");
      std::uint64_t le = 0;
      std::memcpy(&le, buf, 8);
      part = std::bit_cast<double>(detail::to_little(le));
    }
    z = {parts[0], parts[1]};
  }
  return out;
}

}  // namespace rdl
