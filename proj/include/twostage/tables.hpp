#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace twostage {

/// Grid of sample sizes at which the worked examples report risks and
/// required sample sizes.
struct ExampleGrid {
  int id = 0;
  std::string model_name;
  std::vector<std::pair<std::int64_t, std::int64_t>> risk_points;  // (n, n*)
  std::vector<std::int64_t> rss_n0;  // n0, with n0* = n0 for present-vs-pooled
};

/// Grids for examples 1-3. Throws DomainError for any other id.
const ExampleGrid& example_grid(int id);

}  // namespace twostage
