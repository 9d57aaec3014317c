#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "twostage/estimators.hpp"
#include "twostage/model.hpp"

namespace twostage {

/// Second-order risk approximation with the o(n^-2) and o(n*^-2) remainders
/// dropped. first_order collects the 1/n, 1/n* and 1/(n+n*) terms, second_order
/// the squared ones.
struct RiskApproximation {
  EstimatorKind kind = EstimatorKind::Present;
  std::int64_t n = 0;
  std::optional<std::int64_t> n_star;
  double first_order = 0.0;
  double second_order = 0.0;
  double total = 0.0;
};

/// Risk of the MLE in a full p-dimensional multinomial model:
/// p/(2n) + (M - 1)/(12 n^2).
double risk_full_model(int p, double M, std::int64_t n);

/// Approximate risk of one of the three two-stage estimators. The A_(i) and
/// s_i coefficients are read from `dq`; callers experimenting with non-full
/// second-stage models can overwrite them there.
RiskApproximation risk_app(EstimatorKind kind, const DerivedQuantities& dq, std::int64_t n,
                           std::optional<std::int64_t> n_star = std::nullopt);

/// Closed forms valid when every second-stage model is full, written in terms
/// of p, M and J_i rather than A_(i). Kept as an independent route to cross-
/// check risk_app.
double risk_app_full_closed_form(EstimatorKind kind, const DerivedQuantities& dq, std::int64_t n,
                                 std::optional<std::int64_t> n_star = std::nullopt);

/// Present minus Prior, from the expanded difference of the two expansions.
double risk_gap_present_prior(const DerivedQuantities& dq, std::int64_t n, std::int64_t n_star);

/// Present minus Pooled. Positive means pooling the prior survey lowers the
/// approximate risk.
double risk_gap_present_pooled(const DerivedQuantities& dq, std::int64_t n, std::int64_t n_star);

/// Same statistic evaluated from first-stage marginals and second-stage
/// dimensions only; A_(i) cancels from the difference.
double present_pooled_gap(std::span<const double> marginals, std::span<const int> s, double n,
                          double n_star);

namespace detail {
/// Real-valued evaluation of the truncated expansions, used by the sample
/// size solver. n_star is ignored for Present.
double risk_app_value(EstimatorKind kind, const DerivedQuantities& dq, double n, double n_star);
}  // namespace detail

}  // namespace twostage
