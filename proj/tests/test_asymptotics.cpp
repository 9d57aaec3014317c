#include <doctest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "twostage/asymptotics.hpp"
#include "twostage/error.hpp"
#include "twostage/model_io.hpp"

using namespace twostage;

namespace {

DerivedQuantities uniform_100x2() { return derive(*bundled_model("example1-uniform100x2")); }

double total(EstimatorKind kind, const DerivedQuantities& dq, std::int64_t n, std::int64_t ns) {
  return risk_app(kind, dq, n, ns).total;
}

// Present minus Pooled written out term by term from the two expansions.
double hand_gap_present_pooled(const DerivedQuantities& dq, double n, double ns) {
  const double I = static_cast<double>(dq.group_count());
  const double N = n + ns;
  double correction = 0.0;
  for (std::size_t i = 0; i < dq.group_count(); ++i) {
    correction += (1.0 - dq.marginals[i]) * dq.s[i] / dq.marginals[i];
  }
  return (I - 1) / 2 * (1 / n - 1 / N) + (dq.M_f - 1) / 12 * (1 / (n * n) - 1 / (N * N)) -
         correction * (ns / N) / (2 * n * n);
}

}  // namespace

TEST_CASE("risk_full_model") {
  CHECK(risk_full_model(199, 40000.0, 200) == doctest::Approx(0.4975 + 39999.0 / 480000.0).epsilon(1e-15));
  CHECK(std::abs(risk_full_model(199, 40000.0, 200) - 0.580831) < 5e-7);
  CHECK(risk_full_model(1, 4.0, 10) == doctest::Approx(0.0525).epsilon(1e-15));
  CHECK(std::abs(risk_full_model(199, 40000.0, 1000) - 0.102833) < 5e-7);

  CHECK_THROWS_AS(risk_full_model(0, 4.0, 10), Error);
  CHECK_THROWS_AS(risk_full_model(1, 4.0, 0), Error);
  CHECK_THROWS_AS(risk_full_model(1, 3.9, 10), Error);  // below (p+1)^2
}

TEST_CASE("risk_full_model is second-order accurate for a fair coin") {
  // Exact expected KL of the binomial MLE, by enumeration.
  for (std::int64_t n : {10, 50, 200, 1000}) {
    double exact = 0.0;
    testing::enumerate_multinomial(n, {0.5, 0.5}, [&](const std::vector<std::int64_t>& x, double prob) {
      const std::vector<double> e{static_cast<double>(x[0]) / n, static_cast<double>(x[1]) / n};
      exact += prob * testing::reference_kl(e, {0.5, 0.5});
    });
    const double gap = std::abs(exact - risk_full_model(1, 4.0, n));
    CHECK(gap * std::pow(static_cast<double>(n), 3) < 0.6);
  }
}

TEST_CASE("risk_app on the uniform 100x2 table") {
  const DerivedQuantities dq = uniform_100x2();
  const RiskApproximation pre = risk_app(EstimatorKind::Present, dq, 200);
  CHECK(std::abs(pre.total - 0.580831) < 5e-7);
  CHECK(pre.total == pre.first_order + pre.second_order);
  CHECK_FALSE(pre.n_star.has_value());
  CHECK(std::abs(total(EstimatorKind::Prior, dq, 200, 200) - 0.583306) < 5e-7);
  CHECK(std::abs(total(EstimatorKind::Pooled, dq, 200, 200) - 0.580814) < 5e-7);
  CHECK(std::abs(total(EstimatorKind::Pooled, dq, 90, 1000) - 1.523153) < 5e-7);
  CHECK(std::abs(total(EstimatorKind::Prior, dq, 250, 100000) - 0.450917) < 5e-7);
}

TEST_CASE("risk_app on the breast cancer table") {
  const DerivedQuantities dq = derive(*bundled_model("example2-breast-cancer"));
  CHECK(std::abs(risk_app(EstimatorKind::Present, dq, 200).total - 0.0367) < 5e-4);
  CHECK(std::abs(total(EstimatorKind::Pooled, dq, 1000, 1000) - 0.0061) < 5e-4);
}

TEST_CASE("risk_app argument checks") {
  const DerivedQuantities dq = uniform_100x2();
  auto code = [&](auto f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::ParseError;
  };
  CHECK(code([&] { risk_app(EstimatorKind::Prior, dq, 200); }) == ErrorCode::MissingNStar);
  CHECK(code([&] { risk_app(EstimatorKind::Pooled, dq, 200, 0); }) == ErrorCode::DomainError);
  CHECK(code([&] { risk_app(EstimatorKind::Present, dq, 0); }) == ErrorCode::DomainError);
  CHECK(code([&] { risk_gap_present_prior(dq, 10, 0); }) == ErrorCode::DomainError);
}

TEST_CASE("closed forms agree with the general expansions") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::int64_t> size(1, 5000);
  for (int trial = 0; trial < 300; ++trial) {
    const DerivedQuantities dq = derive(build_model(testing::random_table(rng, 2 + trial % 6, 7), true));
    const std::int64_t n = size(rng);
    const std::int64_t ns = size(rng);
    for (EstimatorKind kind : kAllEstimators) {
      const double general = risk_app(kind, dq, n, ns).total;
      const double closed = risk_app_full_closed_form(kind, dq, n, ns);
      CHECK(std::abs(general - closed) <= 1e-12 * std::max(1.0, std::abs(general)));
    }
  }
}

TEST_CASE("gap functions equal differences of the expansions") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::int64_t> size(1, 3000);
  for (int trial = 0; trial < 300; ++trial) {
    const DerivedQuantities dq = derive(build_model(testing::random_table(rng, 2 + trial % 4, 5), true));
    const std::int64_t n = size(rng);
    const std::int64_t ns = size(rng);
    const double pre = total(EstimatorKind::Present, dq, n, ns);
    const double pri = total(EstimatorKind::Prior, dq, n, ns);
    const double pool = total(EstimatorKind::Pooled, dq, n, ns);
    const double scale = std::max(1.0, pre);
    CHECK(std::abs(risk_gap_present_prior(dq, n, ns) - (pre - pri)) <= 1e-15 * scale * 4);
    CHECK(std::abs(risk_gap_present_pooled(dq, n, ns) - (pre - pool)) <= 1e-15 * scale * 4);
    CHECK(risk_gap_present_pooled(dq, n, ns) ==
          doctest::Approx(hand_gap_present_pooled(dq, static_cast<double>(n), static_cast<double>(ns)))
              .epsilon(1e-10)
              .scale(1e-14));
  }
}

TEST_CASE("present minus prior at equal sizes") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const DerivedQuantities dq = derive(build_model(testing::random_table(rng, 2 + trial % 5, 6), true));
    const std::int64_t n = 50 + 37 * trial;
    double sum = 0.0;
    for (std::size_t i = 0; i < dq.group_count(); ++i) sum += dq.s[i] * (1.0 / dq.marginals[i] - 1.0);
    const double expected = -sum / (2.0 * n * n);
    CHECK(risk_gap_present_prior(dq, n, n) == doctest::Approx(expected).epsilon(1e-10).scale(1e-16));
    if (sum > 0.0) CHECK(risk_gap_present_prior(dq, n, n) < 0.0);
  }
  const DerivedQuantities single = derive(build_model({{0.3}, {0.5}, {0.2}}, false));
  CHECK(std::abs(risk_gap_present_prior(single, 40, 40)) < 1e-18);
  const DerivedQuantities dq = uniform_100x2();
  CHECK(std::abs(risk_gap_present_prior(dq, 200, 200) - (-0.002475)) < 1e-6);
}

TEST_CASE("present minus pooled examples") {
  const DerivedQuantities dq = uniform_100x2();
  CHECK(std::abs(risk_gap_present_pooled(dq, 200, 200) - 0.000017) < 1e-6);
  CHECK(std::abs(risk_gap_present_pooled(dq, 90, 1000) - (-0.006085)) < 1e-6);

  // A prior survey of one observation still helps, mostly through the
  // first-order term.
  for (int J : {1, 2, 3}) {
    const double cell = 1.0 / (2 * J);
    const DerivedQuantities small =
        derive(build_model({std::vector<double>(J, cell), std::vector<double>(J, cell)}, false));
    for (std::int64_t n : {10, 100, 1000}) {
      const double gap = risk_gap_present_pooled(small, n, 1);
      CHECK(gap > 0.0);
      CHECK(gap == doctest::Approx(hand_gap_present_pooled(small, n, 1)).epsilon(1e-12));
      const double first = 0.5 * (1.0 / n - 1.0 / (n + 1.0));
      CHECK(std::abs(gap - first) < 10.0 / (static_cast<double>(n) * n * n) + 2.0 / (static_cast<double>(n) * n));
    }
  }
}

TEST_CASE("pooled beats prior in approximation") {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<std::int64_t> size(1, 10000);
  for (int trial = 0; trial < 1000; ++trial) {
    const DerivedQuantities dq = derive(build_model(testing::random_table(rng, 2 + trial % 6, 6), true));
    const std::int64_t n = size(rng);
    const std::int64_t ns = size(rng);
    CHECK(total(EstimatorKind::Pooled, dq, n, ns) < total(EstimatorKind::Prior, dq, n, ns));
  }
}

TEST_CASE("risk_app decreases in n") {
  for (const char* name : {"example1-uniform100x2", "example2-breast-cancer", "example3-household"}) {
    const DerivedQuantities dq = derive(*bundled_model(name));
    for (EstimatorKind kind : kAllEstimators) {
      double previous = total(kind, dq, 1, 500);
      for (std::int64_t n = 2; n <= 5000; ++n) {
        const double current = total(kind, dq, n, 500);
        REQUIRE(current < previous);
        previous = current;
      }
    }
  }
}

TEST_CASE("pooled risk at n = 90 rises with the prior size") {
  const DerivedQuantities dq = uniform_100x2();
  double previous = total(EstimatorKind::Pooled, dq, 90, 100);
  for (std::int64_t ns = 200; ns <= 1000; ns += 100) {
    const double current = total(EstimatorKind::Pooled, dq, 90, ns);
    CHECK(current > previous);
    previous = current;
  }
}

TEST_CASE("risk_app_value agrees with risk_app at integers") {
  const DerivedQuantities dq = derive(*bundled_model("example3-household"));
  for (EstimatorKind kind : kAllEstimators) {
    CHECK(detail::risk_app_value(kind, dq, 1500.0, 700.0) == doctest::Approx(total(kind, dq, 1500, 700)).epsilon(1e-15));
  }
}
