#include "twostage/tables.hpp"

#include "twostage/error.hpp"

namespace twostage {

namespace {

ExampleGrid make_example1() {
  ExampleGrid grid{1, "example1-uniform100x2", {}, {}};
  for (std::int64_t n : {100, 150, 200, 250, 300}) grid.risk_points.emplace_back(n, 100'000);
  for (std::int64_t n = 200; n <= 1000; n += 200) grid.risk_points.emplace_back(n, n);
  for (std::int64_t n_star = 100; n_star <= 1000; n_star += 100) grid.risk_points.emplace_back(90, n_star);
  for (std::int64_t n0 = 400; n0 <= 2000; n0 += 200) grid.rss_n0.push_back(n0);
  return grid;
}

ExampleGrid make_square(int id, std::string model, std::vector<std::int64_t> sizes,
                        std::vector<std::int64_t> rss_n0) {
  ExampleGrid grid{id, std::move(model), {}, std::move(rss_n0)};
  for (std::int64_t n : sizes) {
    for (std::int64_t n_star : sizes) grid.risk_points.emplace_back(n, n_star);
  }
  return grid;
}

}  // namespace

const ExampleGrid& example_grid(int id) {
  static const ExampleGrid grids[] = {
      make_example1(),
      make_square(2, "example2-breast-cancer", {200, 600, 1000}, {200, 400, 600, 800, 1000}),
      make_square(3, "example3-household", {1000, 2000, 3000}, {1000, 1500, 2000, 2500, 3000}),
  };
  if (id < 1 || id > 3) throw Error(ErrorCode::DomainError, "examples are numbered 1 to 3");
  return grids[id - 1];
}

}  // namespace twostage
