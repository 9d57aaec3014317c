#include "twostage/model.hpp"

#include <cmath>
#include <numeric>
#include <utility>

#include "twostage/error.hpp"

namespace twostage {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonPositiveCell: return "NonPositiveCell";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::ZeroTruth: return "ZeroTruth";
    case ErrorCode::MissingPriorCounts: return "MissingPriorCounts";
    case ErrorCode::ZeroGroupCount: return "ZeroGroupCount";
    case ErrorCode::MissingNStar: return "MissingNStar";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::RejectionBudgetExceeded: return "RejectionBudgetExceeded";
    case ErrorCode::Unattainable: return "Unattainable";
    case ErrorCode::SimulationNoise: return "SimulationNoise";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "UnknownError";
}

Layout::Layout(std::span<const std::size_t> group_sizes) {
  offsets_.reserve(group_sizes.size() + 1);
  offsets_.push_back(0);
  for (std::size_t size : group_sizes) offsets_.push_back(offsets_.back() + size);
}

std::vector<std::size_t> Layout::group_sizes() const {
  std::vector<std::size_t> sizes(group_count());
  for (std::size_t i = 0; i < sizes.size(); ++i) sizes[i] = group_size(i);
  return sizes;
}

namespace {
constexpr double kNormalizationTolerance = 1e-9;
}

TwoStageModel TwoStageModel::build(std::vector<Group> groups, bool renormalize, std::string name) {
  if (groups.size() < 2) {
    throw Error(ErrorCode::ShapeError,
                "a two-stage model needs at least 2 groups, got " + std::to_string(groups.size()));
  }
  std::vector<std::size_t> sizes;
  long double total = 0.0L;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].cells.empty()) {
      throw Error(ErrorCode::ShapeError, "group " + std::to_string(i + 1) + " has no cells");
    }
    sizes.push_back(groups[i].cells.size());
    for (std::size_t j = 0; j < groups[i].cells.size(); ++j) {
      const double cell = groups[i].cells[j];
      if (!(cell > 0.0) || !std::isfinite(cell)) {
        throw Error(ErrorCode::NonPositiveCell, "cell (" + std::to_string(i + 1) + ", " +
                                                    std::to_string(j + 1) +
                                                    ") must be a positive finite number");
      }
      total += cell;
    }
  }

  TwoStageModel model;
  model.name_ = std::move(name);
  model.layout_ = Layout(sizes);
  model.cells_.reserve(model.layout_.cell_count());
  const double grand_total = static_cast<double>(total);
  if (!renormalize && std::abs(grand_total - 1.0) > kNormalizationTolerance) {
    throw Error(ErrorCode::NotNormalized,
                "cells sum to " + std::to_string(grand_total) + " and renormalize is off");
  }
  for (auto& group : groups) {
    model.labels_.push_back(std::move(group.label));
    for (double cell : group.cells) model.cells_.push_back(renormalize ? cell / grand_total : cell);
  }
  return model;
}

std::span<const double> TwoStageModel::group(std::size_t i) const {
  return std::span<const double>(cells_).subspan(layout_.offset(i), layout_.group_size(i));
}

TwoStageModel build_model(const std::vector<std::vector<double>>& raw_cells, bool renormalize) {
  std::vector<Group> groups;
  groups.reserve(raw_cells.size());
  for (std::size_t i = 0; i < raw_cells.size(); ++i) {
    groups.push_back(Group{"g" + std::to_string(i + 1), raw_cells[i]});
  }
  return TwoStageModel::build(std::move(groups), renormalize);
}

DerivedQuantities derive(const TwoStageModel& model) {
  const std::size_t groups = model.group_count();
  DerivedQuantities dq;
  dq.marginals.resize(groups);
  dq.conditionals.resize(groups);
  dq.s.resize(groups);
  dq.A.resize(groups);

  long double inverse_cells = 0.0L;
  long double inverse_marginals = 0.0L;
  int total_cells = 0;
  for (std::size_t i = 0; i < groups; ++i) {
    const auto cells = model.group(i);
    long double marginal = 0.0L;
    for (double cell : cells) marginal += cell;
    dq.marginals[i] = static_cast<double>(marginal);

    long double inverse_conditionals = 0.0L;
    dq.conditionals[i].reserve(cells.size());
    for (double cell : cells) {
      const double p = cell / dq.marginals[i];
      dq.conditionals[i].push_back(p);
      inverse_conditionals += 1.0L / p;
      inverse_cells += 1.0L / cell;
    }
    inverse_marginals += 1.0L / dq.marginals[i];

    dq.s[i] = static_cast<int>(cells.size()) - 1;
    dq.A[i] = static_cast<double>(2.0L * inverse_conditionals - 2.0L);
    total_cells += static_cast<int>(cells.size());
  }
  dq.p_total = total_cells - 1;
  dq.p_prime = static_cast<int>(groups) - 1 + std::accumulate(dq.s.begin(), dq.s.end(), 0);
  dq.M = static_cast<double>(inverse_cells);
  dq.M_f = static_cast<double>(inverse_marginals);
  return dq;
}

SurveyCounts::SurveyCounts(std::vector<std::vector<std::int64_t>> present,
                           std::optional<std::vector<std::int64_t>> prior)
    : prior_(std::move(prior)) {
  std::vector<std::size_t> sizes;
  for (const auto& row : present) {
    sizes.push_back(row.size());
    present_.insert(present_.end(), row.begin(), row.end());
  }
  layout_ = Layout(sizes);
  validate();
}

SurveyCounts::SurveyCounts(Layout layout, std::vector<std::int64_t> present_flat,
                           std::optional<std::vector<std::int64_t>> prior)
    : layout_(std::move(layout)), present_(std::move(present_flat)), prior_(std::move(prior)) {
  validate();
}

void SurveyCounts::validate() {
  if (present_.size() != layout_.cell_count()) {
    throw Error(ErrorCode::ShapeError, "present counts do not match the layout");
  }
  for (std::size_t i = 0; i < layout_.group_count(); ++i) {
    if (layout_.group_size(i) == 0) {
      throw Error(ErrorCode::ShapeError, "group " + std::to_string(i + 1) + " has no cells");
    }
  }
  n_ = 0;
  for (std::int64_t x : present_) {
    if (x < 0) throw Error(ErrorCode::DomainError, "counts must be nonnegative");
    n_ += x;
  }
  n_star_ = 0;
  if (prior_) {
    if (prior_->size() != layout_.group_count()) {
      throw Error(ErrorCode::ShapeError, "prior counts need one entry per group (" +
                                             std::to_string(layout_.group_count()) + ")");
    }
    for (std::int64_t x : *prior_) {
      if (x < 0) throw Error(ErrorCode::DomainError, "counts must be nonnegative");
      n_star_ += x;
    }
  }
}

std::span<const std::int64_t> SurveyCounts::present_group(std::size_t i) const {
  return std::span<const std::int64_t>(present_).subspan(layout_.offset(i), layout_.group_size(i));
}

std::int64_t SurveyCounts::group_total(std::size_t i) const {
  std::int64_t total = 0;
  for (std::int64_t x : present_group(i)) total += x;
  return total;
}

std::span<const std::int64_t> SurveyCounts::prior() const {
  if (!prior_) throw Error(ErrorCode::MissingPriorCounts, "no prior survey counts");
  return *prior_;
}

void SurveyCounts::check_shape(const TwoStageModel& model) const {
  if (layout_ != model.layout()) {
    throw Error(ErrorCode::ShapeError, "counts layout does not match model '" + model.name() + "'");
  }
}

}  // namespace twostage
