#include "twostage/planning.hpp"

#include <functional>
#include <limits>
#include <map>
#include <string>

#include "twostage/asymptotics.hpp"
#include "twostage/error.hpp"

namespace twostage {

std::string_view to_string(Decision decision) noexcept {
  switch (decision) {
    case Decision::UsePooled: return "UsePooled";
    case Decision::UsePresentOnly: return "UsePresentOnly";
    case Decision::IncreaseN: return "IncreaseN";
  }
  return "Unknown";
}

std::string_view to_string(AdviceStage stage) noexcept {
  switch (stage) {
    case AdviceStage::PostSurvey: return "post";
    case AdviceStage::Planning: return "plan";
  }
  return "unknown";
}

std::string_view to_string(RssKind kind) noexcept {
  switch (kind) {
    case RssKind::PriorToPresent: return "prior-vs-present";
    case RssKind::PresentToPooled: return "present-vs-pooled";
  }
  return "unknown";
}

namespace {

constexpr std::int64_t kBracketGrowthLimit = std::int64_t{1} << 20;

/// Least k >= 1 with satisfied(k), for a predicate that is false below the
/// answer and true from it on. Starts at `start` and brackets geometrically
/// in whichever direction is needed.
std::int64_t least_satisfying(const std::function<bool(std::int64_t)>& satisfied, std::int64_t start,
                              const std::function<void()>& on_unbracketed) {
  std::int64_t lo = 0;  // 0 stands for "known unsatisfied"
  std::int64_t hi = start;
  if (satisfied(start)) {
    for (std::int64_t probe = start / 2; probe >= 1; probe /= 2) {
      if (!satisfied(probe)) {
        lo = probe;
        break;
      }
      hi = probe;
    }
  } else {
    lo = start;
    const std::int64_t cap = start * kBracketGrowthLimit;
    for (hi = start * 2;; hi *= 2) {
      if (hi > cap) on_unbracketed();
      if (satisfied(hi)) break;
      lo = hi;
    }
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (satisfied(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::int64_t rss_approximation(const RssQuery& query, const TwoStageModel& model) {
  const DerivedQuantities dq = derive(model);
  const auto n0 = static_cast<double>(query.n0);
  if (query.kind == RssKind::PriorToPresent) {
    const double target = detail::risk_app_value(EstimatorKind::Present, dq, n0, 0.0);
    const double limit = detail::risk_app_value(EstimatorKind::Prior, dq, n0,
                                                std::numeric_limits<double>::infinity());
    if (limit > target) {
      throw Error(ErrorCode::Unattainable,
                  "the prior estimator cannot match the present estimator's risk at n0 = " +
                      std::to_string(query.n0) + " for any prior sample size");
    }
    return least_satisfying(
        [&](std::int64_t k) {
          return detail::risk_app_value(EstimatorKind::Prior, dq, n0, static_cast<double>(k)) <= target;
        },
        query.n0,
        [&] { throw Error(ErrorCode::Unattainable, "no prior sample size up to 2^20 * n0 suffices"); });
  }
  const double target = detail::risk_app_value(EstimatorKind::Pooled, dq, n0,
                                               static_cast<double>(*query.n0_star));
  return least_satisfying(
      [&](std::int64_t k) {
        return detail::risk_app_value(EstimatorKind::Present, dq, static_cast<double>(k), 0.0) <= target;
      },
      query.n0,
      [&] { throw Error(ErrorCode::Unattainable, "no present sample size up to 2^20 * n0 suffices"); });
}

std::int64_t rss_simulation(const RssQuery& query, const TwoStageModel& model,
                            const SimulationConfig& config) {
  // Every probe reuses config.seed, so all points share their random draws.
  std::map<std::int64_t, double> cache;
  auto unbracketed = [&] {
    throw Error(ErrorCode::SimulationNoise,
                "could not bracket the required sample size below 2^20 * n0 with " +
                    std::to_string(config.replications) +
                    " replications; the target may be unattainable or too noisy");
  };
  if (query.kind == RssKind::PriorToPresent) {
    const double target = simulate_risk(EstimatorKind::Present, model, query.n0, 0, config).mean_loss;
    auto risk = [&](std::int64_t k) {
      auto it = cache.find(k);
      if (it == cache.end()) {
        it = cache.emplace(k, simulate_risk(EstimatorKind::Prior, model, query.n0, k, config).mean_loss).first;
      }
      return it->second;
    };
    return least_satisfying([&](std::int64_t k) { return risk(k) <= target; }, query.n0, unbracketed);
  }
  const double target =
      simulate_risk(EstimatorKind::Pooled, model, query.n0, *query.n0_star, config).mean_loss;
  auto risk = [&](std::int64_t k) {
    auto it = cache.find(k);
    if (it == cache.end()) {
      it = cache.emplace(k, simulate_risk(EstimatorKind::Present, model, k, 0, config).mean_loss).first;
    }
    return it->second;
  };
  return least_satisfying([&](std::int64_t k) { return risk(k) <= target; }, query.n0, unbracketed);
}

}  // namespace

std::int64_t required_sample_size(const RssQuery& query, const TwoStageModel& model) {
  if (query.n0 < 1) throw Error(ErrorCode::DomainError, "n0 must be >= 1");
  if (query.kind == RssKind::PresentToPooled) {
    if (!query.n0_star) throw Error(ErrorCode::MissingNStar, "present-vs-pooled needs n0*");
    if (*query.n0_star < 1) throw Error(ErrorCode::DomainError, "n0* must be >= 1");
  }
  if (const auto* config = std::get_if<SimulationConfig>(&query.method)) {
    return rss_simulation(query, model, *config);
  }
  return rss_approximation(query, model);
}

Recommendation recommend(std::span<const double> marginals, const Layout& layout, std::int64_t n,
                         std::int64_t n_star, AdviceStage stage) {
  if (marginals.size() != layout.group_count()) {
    throw Error(ErrorCode::ShapeError, "one plug-in marginal per group is required");
  }
  if (n < 1 || n_star < 1) throw Error(ErrorCode::DomainError, "n and n* must both be >= 1");
  for (std::size_t i = 0; i < marginals.size(); ++i) {
    if (!(marginals[i] > 0.0)) {
      throw Error(ErrorCode::ZeroGroupCount,
                  "plug-in marginal of group " + std::to_string(i + 1) + " is zero");
    }
  }
  std::vector<int> s(layout.group_count());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<int>(layout.group_size(i)) - 1;

  Recommendation out;
  out.context = stage;
  out.n = n;
  out.n_star = n_star;
  out.marginals.assign(marginals.begin(), marginals.end());
  long double M_f = 0.0L;
  for (double m : marginals) M_f += 1.0L / m;
  out.M_f = static_cast<double>(M_f);
  out.statistic = present_pooled_gap(marginals, s, static_cast<double>(n), static_cast<double>(n_star));
  if (stage == AdviceStage::PostSurvey) {
    out.decision = out.statistic >= 0.0 ? Decision::UsePooled : Decision::UsePresentOnly;
  } else {
    out.decision = out.statistic >= 0.0 ? Decision::UsePooled : Decision::IncreaseN;
  }
  return out;
}

Recommendation advise(const SurveyCounts& counts, const Layout& layout, AdviceStage stage,
                      std::optional<std::int64_t> planned_n) {
  if (counts.layout() != layout) throw Error(ErrorCode::ShapeError, "counts do not match the model layout");
  if (!counts.has_prior()) throw Error(ErrorCode::MissingPriorCounts, "advice needs prior survey counts");
  const auto prior = counts.prior();
  const std::int64_t n_star = counts.n_star();
  if (n_star < 1) throw Error(ErrorCode::ZeroGroupCount, "the prior survey has no observations");

  std::vector<double> marginals(layout.group_count());
  if (stage == AdviceStage::PostSurvey) {
    const std::int64_t n = counts.n();
    if (n < 1) throw Error(ErrorCode::ZeroGroupCount, "the present survey has no observations");
    const auto total = static_cast<double>(n + n_star);
    for (std::size_t i = 0; i < marginals.size(); ++i) {
      marginals[i] = static_cast<double>(counts.group_total(i) + prior[i]) / total;
    }
    return recommend(marginals, layout, n, n_star, stage);
  }
  const std::int64_t n = planned_n.value_or(counts.n());
  if (n < 1) throw Error(ErrorCode::DomainError, "a planned present sample size n >= 1 is required");
  for (std::size_t i = 0; i < marginals.size(); ++i) {
    marginals[i] = static_cast<double>(prior[i]) / static_cast<double>(n_star);
  }
  return recommend(marginals, layout, n, n_star, stage);
}

}  // namespace twostage
