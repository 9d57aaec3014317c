#include "twostage/estimators.hpp"

#include <string>
#include <vector>

#include "twostage/error.hpp"

namespace twostage {

std::string_view to_string(EstimatorKind kind) noexcept {
  switch (kind) {
    case EstimatorKind::Present: return "present";
    case EstimatorKind::Prior: return "prior";
    case EstimatorKind::Pooled: return "pooled";
  }
  return "unknown";
}

std::optional<EstimatorKind> parse_estimator(std::string_view text) noexcept {
  for (EstimatorKind kind : kAllEstimators) {
    if (text == to_string(kind)) return kind;
  }
  return std::nullopt;
}

namespace detail {

void estimate_into(EstimatorKind kind, const Layout& layout, std::span<const std::int64_t> present,
                   std::span<const std::int64_t> prior, std::span<double> out) noexcept {
  std::int64_t n = 0;
  std::int64_t n_star = 0;
  for (std::int64_t x : present) n += x;
  for (std::int64_t x : prior) n_star += x;

  for (std::size_t i = 0; i < layout.group_count(); ++i) {
    const std::size_t base = layout.offset(i);
    const std::size_t size = layout.group_size(i);
    if (kind == EstimatorKind::Present) {
      for (std::size_t j = 0; j < size; ++j) {
        out[base + j] = static_cast<double>(present[base + j]) / static_cast<double>(n);
      }
      continue;
    }
    std::int64_t group_total = 0;
    for (std::size_t j = 0; j < size; ++j) group_total += present[base + j];

    // m_hat_ij = (marginal numerator / marginal denominator) * x_ij / x_i.
    std::int64_t numerator = prior[i];
    std::int64_t denominator = n_star;
    if (kind == EstimatorKind::Pooled) {
      numerator += group_total;
      denominator += n;
    }
    const double scale = static_cast<double>(denominator) * static_cast<double>(group_total);
    for (std::size_t j = 0; j < size; ++j) {
      out[base + j] = static_cast<double>(numerator) * static_cast<double>(present[base + j]) / scale;
    }
  }
}

}  // namespace detail

ProbabilityEstimate estimate(EstimatorKind kind, const SurveyCounts& counts) {
  if (counts.n() < 1) throw Error(ErrorCode::DomainError, "present sample size must be >= 1");
  if (kind != EstimatorKind::Present) {
    if (!counts.has_prior()) {
      throw Error(ErrorCode::MissingPriorCounts,
                  std::string(to_string(kind)) + " estimator needs prior survey counts");
    }
    if (counts.n_star() < 1) throw Error(ErrorCode::DomainError, "prior sample size must be >= 1");
  }
  for (std::size_t i = 0; i < counts.layout().group_count(); ++i) {
    if (counts.group_total(i) == 0) {
      throw Error(ErrorCode::ZeroGroupCount,
                  "present group " + std::to_string(i + 1) + " has no observations");
    }
  }
  std::vector<double> cells(counts.layout().cell_count());
  const std::span<const std::int64_t> prior =
      counts.has_prior() ? counts.prior() : std::span<const std::int64_t>{};
  detail::estimate_into(kind, counts.layout(), counts.present(), prior, cells);
  return ProbabilityEstimate(counts.layout(), std::move(cells));
}

}  // namespace twostage
