#pragma once

#include <span>
#include <vector>

#include "twostage/model.hpp"

namespace twostage {

/// Estimated cell probabilities on a model's layout. Entries may be zero.
class ProbabilityEstimate {
 public:
  ProbabilityEstimate() = default;
  /// Throws DomainError if any entry is negative or the entries do not sum to
  /// 1 within 1e-9.
  ProbabilityEstimate(Layout layout, std::vector<double> cells);

  const Layout& layout() const noexcept { return layout_; }
  std::span<const double> cells() const noexcept { return cells_; }
  std::span<const double> group(std::size_t i) const;
  double marginal(std::size_t i) const;

 private:
  Layout layout_;
  std::vector<double> cells_;
};

struct GroupTerm {
  double weight = 0.0;            // estimated marginal
  double second_stage_kl = 0.0;   // D[p_hat_i : p_i]
};

struct ChainRuleBreakdown {
  double first_stage_kl = 0.0;
  std::vector<GroupTerm> per_group;
  double total = 0.0;
};

/// KL divergence sum_i e_i log(e_i / t_i), with 0 log 0 = 0.
double kl_divergence(std::span<const double> estimate, std::span<const double> truth);

/// Splits the KL loss of `estimate` into a first-stage part and marginal-
/// weighted second-stage parts.
ChainRuleBreakdown chain_rule(const ProbabilityEstimate& estimate, const TwoStageModel& model);

namespace detail {
/// Unchecked KL kernel for hot loops; same summation order as kl_divergence.
double kl_unchecked(std::span<const double> estimate, std::span<const double> truth) noexcept;
}  // namespace detail

}  // namespace twostage
