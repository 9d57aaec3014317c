#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace twostage {

/// Shape of a two-stage table: I groups, group i holding J_i cells. Cells are
/// stored row-major within groups, so cell (i, j) sits at offset(i) + j.
class Layout {
 public:
  Layout() = default;
  explicit Layout(std::span<const std::size_t> group_sizes);

  std::size_t group_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t group_size(std::size_t i) const { return offsets_.at(i + 1) - offsets_.at(i); }
  std::size_t offset(std::size_t i) const { return offsets_.at(i); }
  std::size_t cell_count() const noexcept { return offsets_.empty() ? 0 : offsets_.back(); }
  std::vector<std::size_t> group_sizes() const;

  bool operator==(const Layout&) const = default;

 private:
  std::vector<std::size_t> offsets_;
};

struct Group {
  std::string label;
  std::vector<double> cells;
};

/// True cell probabilities m_ij of a two-stage multinomial model. Immutable
/// once built; every instance satisfies the positivity and normalization
/// invariants.
class TwoStageModel {
 public:
  /// Validates and builds a model. With `renormalize` set the cells are
  /// divided by their grand total; otherwise the total must already be
  /// within 1e-9 of 1.
  static TwoStageModel build(std::vector<Group> groups, bool renormalize, std::string name = {});

  const std::string& name() const noexcept { return name_; }
  const Layout& layout() const noexcept { return layout_; }
  std::size_t group_count() const noexcept { return layout_.group_count(); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }

  /// Cells of group i.
  std::span<const double> group(std::size_t i) const;
  /// All cells, flattened row-major.
  std::span<const double> cells() const noexcept { return cells_; }
  double cell(std::size_t i, std::size_t j) const { return cells_[layout_.offset(i) + j]; }

  bool operator==(const TwoStageModel&) const = default;

 private:
  std::string name_;
  std::vector<std::string> labels_;
  Layout layout_;
  std::vector<double> cells_;
};

/// Builds a model from a raw I x J_i matrix with generated labels "g1".."gI".
TwoStageModel build_model(const std::vector<std::vector<double>>& raw_cells, bool renormalize);

/// Every scalar the risk expansions consume.
struct DerivedQuantities {
  std::vector<double> marginals;                  // m_i.
  std::vector<std::vector<double>> conditionals;  // p_ij
  std::vector<int> s;                             // second-stage dimensions
  int p_total = 0;                                // sum J_i - 1
  int p_prime = 0;                                // I - 1 + sum s_i
  double M = 0.0;                                 // sum_ij 1/m_ij
  double M_f = 0.0;                               // sum_i 1/m_i.
  std::vector<double> A;                          // A_(i), second-order coefficients

  std::size_t group_count() const noexcept { return marginals.size(); }

  bool operator==(const DerivedQuantities&) const = default;
};

/// Derives marginals, conditionals and expansion coefficients. Second-stage
/// models are full, so s_i = J_i - 1 and A_(i) = 2 sum_j 1/p_ij - 2.
DerivedQuantities derive(const TwoStageModel& model);

/// Observed counts: present-survey cells x_ij and optionally the prior
/// survey's group counts x*_i.
class SurveyCounts {
 public:
  SurveyCounts() = default;
  SurveyCounts(std::vector<std::vector<std::int64_t>> present,
               std::optional<std::vector<std::int64_t>> prior = std::nullopt);
  SurveyCounts(Layout layout, std::vector<std::int64_t> present_flat,
               std::optional<std::vector<std::int64_t>> prior = std::nullopt);

  const Layout& layout() const noexcept { return layout_; }
  std::span<const std::int64_t> present() const noexcept { return present_; }
  std::span<const std::int64_t> present_group(std::size_t i) const;
  std::int64_t group_total(std::size_t i) const;  // x_i.
  std::int64_t n() const noexcept { return n_; }

  bool has_prior() const noexcept { return prior_.has_value(); }
  std::span<const std::int64_t> prior() const;
  std::int64_t n_star() const noexcept { return n_star_; }

  /// Throws ShapeError unless the layout matches the model.
  void check_shape(const TwoStageModel& model) const;

  bool operator==(const SurveyCounts&) const = default;

 private:
  void validate();

  Layout layout_;
  std::vector<std::int64_t> present_;
  std::optional<std::vector<std::int64_t>> prior_;
  std::int64_t n_ = 0;
  std::int64_t n_star_ = 0;
};

}  // namespace twostage
