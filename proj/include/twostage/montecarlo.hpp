#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "twostage/estimators.hpp"
#include "twostage/model.hpp"

namespace twostage {

struct SimulationConfig {
  std::int64_t replications = 10'000;
  std::uint64_t seed = 0;
  std::int64_t max_rejections_per_rep = 1'000'000;
  // Number of worker threads. Results do not depend on it.
  unsigned workers = 1;
};

struct RiskEstimate {
  EstimatorKind kind = EstimatorKind::Present;
  std::int64_t n = 0;
  std::int64_t n_star = 0;
  double mean_loss = 0.0;
  double std_error = 0.0;
  std::int64_t replications = 0;
  double discard_rate = 0.0;
};

/// Random source for one replication.
struct ReplicationStream {
  std::uint64_t seed = 0;
  std::uint64_t replication = 0;
};

struct SampledSurvey {
  SurveyCounts counts;
  std::int64_t rejections = 0;  // present draws discarded for an empty group
};

/// Draws one present survey of size n, redrawn until every group total is at
/// least 1, and (when n_star > 0) one unconditioned prior survey of size
/// n_star over the group marginals. Throws RejectionBudgetExceeded after
/// more than `max_rejections` discarded present draws.
SampledSurvey sample_surveys(const TwoStageModel& model, std::int64_t n, std::int64_t n_star,
                             ReplicationStream stream, std::int64_t max_rejections = 1'000'000);

/// Per-replication losses for several estimators computed on the same draws.
struct LossTable {
  std::vector<EstimatorKind> kinds;
  std::vector<std::vector<double>> losses;  // losses[k][replication]
  std::int64_t rejections = 0;
  std::int64_t replications = 0;

  double discard_rate() const noexcept;
};

LossTable simulate_losses(std::span<const EstimatorKind> kinds, const TwoStageModel& model,
                          std::int64_t n, std::int64_t n_star, const SimulationConfig& config);

/// Monte Carlo risk of several estimators sharing one set of draws.
std::vector<RiskEstimate> simulate_risks(std::span<const EstimatorKind> kinds,
                                         const TwoStageModel& model, std::int64_t n,
                                         std::int64_t n_star, const SimulationConfig& config);

RiskEstimate simulate_risk(EstimatorKind kind, const TwoStageModel& model, std::int64_t n,
                           std::int64_t n_star, const SimulationConfig& config);

/// Mean and standard error of a loss vector, reduced pairwise in index order.
RiskEstimate summarize_losses(std::span<const double> losses);

/// Pairwise (cascade) summation in index order.
double pairwise_sum(std::span<const double> values) noexcept;

}  // namespace twostage
