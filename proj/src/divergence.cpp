#include "twostage/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "twostage/error.hpp"

namespace twostage {

namespace {

constexpr double kSumTolerance = 1e-9;

void check_distribution(std::span<const double> values, const char* what) {
  long double total = 0.0L;
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::DomainError, std::string(what) + " has a negative or non-finite entry");
    }
    total += v;
  }
  if (std::abs(static_cast<double>(total) - 1.0) > kSumTolerance) {
    throw Error(ErrorCode::DomainError, std::string(what) + " does not sum to 1");
  }
}

}  // namespace

ProbabilityEstimate::ProbabilityEstimate(Layout layout, std::vector<double> cells)
    : layout_(std::move(layout)), cells_(std::move(cells)) {
  if (cells_.size() != layout_.cell_count()) {
    throw Error(ErrorCode::ShapeError, "estimate does not match its layout");
  }
  check_distribution(cells_, "estimate");
}

std::span<const double> ProbabilityEstimate::group(std::size_t i) const {
  return std::span<const double>(cells_).subspan(layout_.offset(i), layout_.group_size(i));
}

double ProbabilityEstimate::marginal(std::size_t i) const {
  double total = 0.0;
  for (double v : group(i)) total += v;
  return total;
}

namespace detail {

double kl_unchecked(std::span<const double> estimate, std::span<const double> truth) noexcept {
  double total = 0.0;
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    const double e = estimate[i];
    if (e > 0.0) total += e * std::log(e / truth[i]);
  }
  return total;
}

}  // namespace detail

double kl_divergence(std::span<const double> estimate, std::span<const double> truth) {
  if (estimate.size() != truth.size() || estimate.empty()) {
    throw Error(ErrorCode::ShapeError, "estimate and truth lengths differ");
  }
  for (double t : truth) {
    if (!(t > 0.0)) throw Error(ErrorCode::ZeroTruth, "truth entries must be strictly positive");
  }
  check_distribution(estimate, "estimate");
  check_distribution(truth, "truth");
  // Rounding can leave a tiny negative sum when estimate == truth up to ulps.
  const double d = detail::kl_unchecked(estimate, truth);
  return d < 0.0 ? 0.0 : d;
}

ChainRuleBreakdown chain_rule(const ProbabilityEstimate& estimate, const TwoStageModel& model) {
  if (estimate.layout() != model.layout()) {
    throw Error(ErrorCode::ShapeError, "estimate layout does not match the model");
  }
  const std::size_t groups = model.group_count();
  ChainRuleBreakdown out;
  out.per_group.resize(groups);

  std::vector<double> conditional_hat;
  std::vector<double> conditional;
  double first_stage = 0.0;
  for (std::size_t i = 0; i < groups; ++i) {
    const auto est = estimate.group(i);
    const auto truth = model.group(i);
    double est_marginal = 0.0;
    double true_marginal = 0.0;
    for (double v : est) est_marginal += v;
    for (double v : truth) true_marginal += v;
    if (est_marginal > 0.0) first_stage += est_marginal * std::log(est_marginal / true_marginal);

    GroupTerm& term = out.per_group[i];
    term.weight = est_marginal;
    if (est_marginal > 0.0) {
      conditional_hat.assign(est.begin(), est.end());
      conditional.assign(truth.begin(), truth.end());
      for (double& v : conditional_hat) v /= est_marginal;
      for (double& v : conditional) v /= true_marginal;
      term.second_stage_kl = std::max(0.0, detail::kl_unchecked(conditional_hat, conditional));
    }
  }
  out.first_stage_kl = std::max(0.0, first_stage);
  double total = out.first_stage_kl;
  for (const GroupTerm& term : out.per_group) total += term.weight * term.second_stage_kl;
  out.total = total;
  return out;
}

}  // namespace twostage
