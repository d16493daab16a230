#pragma once

// Table layouts shared by the CLI and the plotting scripts.

#include <string>
#include <vector>

#include "rdl/estimation.hpp"
#include "rdl/table.hpp"

namespace rdl {

/// beta_re_1..n, beta_im_1..n, lambda_re, lambda_im, se, N, envelope.
inline Table estimates_table(const std::vector<EstimateResult>& results, std::size_t n) {
  std::vector<std::string> cols;
  for (std::size_t j = 1; j <= n; ++j) cols.push_back("beta_re_" + std::to_string(j));
  for (std::size_t j = 1; j <= n; ++j) cols.push_back("beta_im_" + std::to_string(j));
  for (const char* c : {"lambda_re", "lambda_im", "se", "N", "envelope"}) cols.emplace_back(c);
  Table t(std::move(cols));
  for (const auto& r : results) {
    require_same_length(r.beta.size(), n, "estimates_table");
    std::vector<nlohmann::json> row;
    for (const auto& b : r.beta) row.emplace_back(b.real());
    for (const auto& b : r.beta) row.emplace_back(b.imag());
    row.emplace_back(r.lambda_hat.real());
    row.emplace_back(r.lambda_hat.imag());
    row.emplace_back(r.std_error);
    row.emplace_back(r.N);
    row.emplace_back(r.envelope);
    t.add_row(std::move(row));
  }
  return t;
}

inline const std::vector<std::string>& bounds_columns() {
  static const std::vector<std::string> cols = {"n",     "kappa", "eps",           "delta",         "sigma",
                                                "r",     "T_b",   "T_a",           "log10_N_lower", "log10_N_upper",
                                                "log10_ratio", "valid_flags"};
  return cols;
}

inline const std::vector<std::string>& noise_columns() {
  static const std::vector<std::string> cols = {"beta_norm_sq", "shape_tag", "r", "delta_deg", "theta_deg",
                                                "g_sq",         "overhead"};
  return cols;
}

}  // namespace rdl
