#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "siadmm/problem.hpp"

namespace siadmm {

struct RunRow {
  long k = 0;
  std::uint64_t samples_x = 0;
  std::uint64_t samples_y = 0;
  std::optional<double> wall_ms;
  std::optional<double> err_u_G;
  std::optional<double> err_x;
  std::optional<double> err_y;
  std::optional<Iterate> u;

  std::uint64_t samples_total() const { return samples_x + samples_y; }
};

struct RunRecord {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::vector<RunRow> rows;
  Iterate final_iterate;
  double wall_seconds = 0.0;
};

}  // namespace siadmm
