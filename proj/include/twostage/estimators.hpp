#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>

#include "twostage/divergence.hpp"
#include "twostage/model.hpp"

namespace twostage {

/// Source of the first-stage marginals. All three share the present-survey
/// conditionals x_ij / x_i.
enum class EstimatorKind {
  Present,  // x_i. / n
  Prior,    // x*_i / n*
  Pooled,   // (x_i. + x*_i) / (n + n*)
};

inline constexpr std::array<EstimatorKind, 3> kAllEstimators = {
    EstimatorKind::Present, EstimatorKind::Prior, EstimatorKind::Pooled};

std::string_view to_string(EstimatorKind kind) noexcept;
std::optional<EstimatorKind> parse_estimator(std::string_view text) noexcept;

/// Two-stage maximum-likelihood estimate. Requires n >= 1, every present
/// group total >= 1 and, for Prior/Pooled, prior counts with n* >= 1.
ProbabilityEstimate estimate(EstimatorKind kind, const SurveyCounts& counts);

namespace detail {
/// Writes the estimate into `out` without allocating. Preconditions are the
/// caller's responsibility; `prior` may be empty for Present.
void estimate_into(EstimatorKind kind, const Layout& layout, std::span<const std::int64_t> present,
                   std::span<const std::int64_t> prior, std::span<double> out) noexcept;
}  // namespace detail

}  // namespace twostage
