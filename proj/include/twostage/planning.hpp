#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "twostage/model.hpp"
#include "twostage/montecarlo.hpp"

namespace twostage {

enum class RssKind {
  PriorToPresent,   // least n* with risk(Prior; n0, n*) <= risk(Present; n0)
  PresentToPooled,  // least n with risk(Present; n) <= risk(Pooled; n0, n0*)
};

struct Approximation {};

/// Risks are evaluated either by the truncated expansions or by simulation.
using RiskMethod = std::variant<Approximation, SimulationConfig>;

struct RssQuery {
  RssKind kind = RssKind::PriorToPresent;
  std::int64_t n0 = 0;
  std::optional<std::int64_t> n0_star;  // PresentToPooled only
  RiskMethod method = Approximation{};
};

/// Smallest integer sample size at which the compared estimator's risk no
/// longer exceeds the reference risk. The search doubles an upper bracket
/// from n0 and then bisects. Throws Unattainable when the bracket passes
/// 2^20 * n0 (or, for the approximation, when no prior size can ever close
/// the gap) and SimulationNoise when a simulated bracket cannot be formed.
std::int64_t required_sample_size(const RssQuery& query, const TwoStageModel& model);

enum class Decision { UsePooled, UsePresentOnly, IncreaseN };
enum class AdviceStage { PostSurvey, Planning };

std::string_view to_string(Decision decision) noexcept;
std::string_view to_string(AdviceStage stage) noexcept;
std::string_view to_string(RssKind kind) noexcept;

struct Recommendation {
  double statistic = 0.0;  // approximate risk(Present) - risk(Pooled)
  Decision decision = Decision::UsePooled;
  AdviceStage context = AdviceStage::PostSurvey;
  std::int64_t n = 0;
  std::int64_t n_star = 0;
  // Plug-in inputs the statistic was computed from.
  std::vector<double> marginals;
  double M_f = 0.0;
};

/// Pool-or-not decision from first-stage plug-in marginals. The statistic
/// needs only the marginals, n, n* and the second-stage dimensions implied by
/// `layout`. A statistic of exactly 0 resolves to UsePooled.
Recommendation recommend(std::span<const double> marginals, const Layout& layout, std::int64_t n,
                         std::int64_t n_star, AdviceStage stage);

/// After the survey: plug in the pooled marginals (x_i. + x*_i)/(n + n*).
/// Before the present survey: plug in x*_i / n* and evaluate at the
/// candidate size `planned_n` (defaults to the present counts' n).
Recommendation advise(const SurveyCounts& counts, const Layout& layout, AdviceStage stage,
                      std::optional<std::int64_t> planned_n = std::nullopt);

}  // namespace twostage
