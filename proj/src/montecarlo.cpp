#include "twostage/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "twostage/divergence.hpp"
#include "twostage/error.hpp"
#include "twostage/rng.hpp"

namespace twostage {

namespace {

constexpr std::uint32_t kPresentChannel = 0;
constexpr std::uint32_t kPriorChannel = 1;

/// Precomputed sampling tables for one model.
class Sampler {
 public:
  explicit Sampler(const TwoStageModel& model) : layout_(model.layout()) {
    cells_.assign(model.cells().begin(), model.cells().end());
    cell_tail_.resize(cells_.size());
    probability_tails(cells_, cell_tail_);
    for (std::size_t i = 0; i < layout_.group_count(); ++i) {
      long double m = 0.0L;
      for (double v : model.group(i)) m += v;
      marginals_.push_back(static_cast<double>(m));
    }
    marginal_tail_.resize(marginals_.size());
    probability_tails(marginals_, marginal_tail_);
  }

  const Layout& layout() const noexcept { return layout_; }
  std::span<const double> cells() const noexcept { return cells_; }

  /// Returns the number of rejected draws before an accepted one.
  std::int64_t draw_present(std::int64_t n, ReplicationStream stream, std::int64_t max_rejections,
                            std::span<std::int64_t> counts) const {
    StreamKey key{stream.seed, stream.replication, kPresentChannel, 0, 0};
    for (std::int64_t rejected = 0;; ++rejected) {
      if (rejected > max_rejections) {
        throw Error(ErrorCode::RejectionBudgetExceeded,
                    "more than " + std::to_string(max_rejections) +
                        " present draws had an empty group at n = " + std::to_string(n) +
                        "; increase n");
      }
      key.attempt = static_cast<std::uint32_t>(rejected);
      draw_multinomial(n, cells_, cell_tail_, key, counts);
      if (all_groups_observed(counts)) return rejected;
    }
  }

  void draw_prior(std::int64_t n_star, ReplicationStream stream, std::span<std::int64_t> counts) const {
    const StreamKey key{stream.seed, stream.replication, kPriorChannel, 0, 0};
    draw_multinomial(n_star, marginals_, marginal_tail_, key, counts);
  }

 private:
  bool all_groups_observed(std::span<const std::int64_t> counts) const noexcept {
    for (std::size_t i = 0; i < layout_.group_count(); ++i) {
      std::int64_t total = 0;
      for (std::size_t j = 0; j < layout_.group_size(i); ++j) total += counts[layout_.offset(i) + j];
      if (total == 0) return false;
    }
    return true;
  }

  Layout layout_;
  std::vector<double> cells_;
  std::vector<double> cell_tail_;
  std::vector<double> marginals_;
  std::vector<double> marginal_tail_;
};

void check_sizes(std::span<const EstimatorKind> kinds, std::int64_t n, std::int64_t n_star) {
  if (n < 1) throw Error(ErrorCode::DomainError, "n must be >= 1");
  if (n_star < 0) throw Error(ErrorCode::DomainError, "n* must be >= 0");
  for (EstimatorKind kind : kinds) {
    if (kind != EstimatorKind::Present && n_star < 1) {
      throw Error(ErrorCode::MissingPriorCounts,
                  std::string(to_string(kind)) + " estimator needs a prior survey (n* >= 1)");
    }
  }
}

}  // namespace

double pairwise_sum(std::span<const double> values) noexcept {
  constexpr std::size_t kLeaf = 8;
  if (values.size() <= kLeaf) {
    double total = 0.0;
    for (double v : values) total += v;
    return total;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

RiskEstimate summarize_losses(std::span<const double> losses) {
  RiskEstimate out;
  out.replications = static_cast<std::int64_t>(losses.size());
  if (losses.empty()) return out;
  const double count = static_cast<double>(losses.size());
  out.mean_loss = pairwise_sum(losses) / count;
  if (losses.size() > 1) {
    std::vector<double> squares(losses.size());
    for (std::size_t r = 0; r < losses.size(); ++r) {
      const double d = losses[r] - out.mean_loss;
      squares[r] = d * d;
    }
    const double variance = pairwise_sum(squares) / (count - 1.0);
    out.std_error = std::sqrt(variance / count);
  }
  return out;
}

double LossTable::discard_rate() const noexcept {
  const double draws = static_cast<double>(rejections + replications);
  return draws > 0.0 ? static_cast<double>(rejections) / draws : 0.0;
}

SampledSurvey sample_surveys(const TwoStageModel& model, std::int64_t n, std::int64_t n_star,
                             ReplicationStream stream, std::int64_t max_rejections) {
  if (n < 1) throw Error(ErrorCode::DomainError, "n must be >= 1");
  if (n_star < 0) throw Error(ErrorCode::DomainError, "n* must be >= 0");
  const Sampler sampler(model);
  std::vector<std::int64_t> present(model.layout().cell_count());
  SampledSurvey out;
  out.rejections = sampler.draw_present(n, stream, max_rejections, present);
  std::optional<std::vector<std::int64_t>> prior;
  if (n_star > 0) {
    prior.emplace(model.group_count());
    sampler.draw_prior(n_star, stream, *prior);
  }
  out.counts = SurveyCounts(model.layout(), std::move(present), std::move(prior));
  return out;
}

LossTable simulate_losses(std::span<const EstimatorKind> kinds, const TwoStageModel& model,
                          std::int64_t n, std::int64_t n_star, const SimulationConfig& config) {
  check_sizes(kinds, n, n_star);
  if (config.replications < 1) throw Error(ErrorCode::DomainError, "replications must be >= 1");
  if (config.max_rejections_per_rep < 0) {
    throw Error(ErrorCode::DomainError, "max_rejections_per_rep must be >= 0");
  }

  const Sampler sampler(model);
  const bool needs_prior = std::any_of(kinds.begin(), kinds.end(),
                                       [](EstimatorKind k) { return k != EstimatorKind::Present; });
  const auto replications = static_cast<std::size_t>(config.replications);

  LossTable table;
  table.kinds.assign(kinds.begin(), kinds.end());
  table.losses.assign(kinds.size(), std::vector<double>(replications));
  table.replications = config.replications;
  std::vector<std::int64_t> rejections(replications);

  constexpr std::size_t kChunk = 64;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::size_t error_index = std::numeric_limits<std::size_t>::max();
  std::exception_ptr error;

  auto worker = [&] {
    const std::size_t cells = sampler.layout().cell_count();
    std::vector<std::int64_t> present(cells);
    std::vector<std::int64_t> prior(needs_prior ? sampler.layout().group_count() : 0);
    std::vector<double> estimate(cells);
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t begin = next.fetch_add(kChunk);
      if (begin >= replications) break;
      const std::size_t end = std::min(begin + kChunk, replications);
      for (std::size_t r = begin; r < end; ++r) {
        const ReplicationStream stream{config.seed, r};
        try {
          rejections[r] = sampler.draw_present(n, stream, config.max_rejections_per_rep, present);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (r < error_index) {
            error_index = r;
            error = std::current_exception();
          }
          failed = true;
          return;
        }
        if (needs_prior) sampler.draw_prior(n_star, stream, prior);
        for (std::size_t k = 0; k < kinds.size(); ++k) {
          detail::estimate_into(kinds[k], sampler.layout(), present, prior, estimate);
          table.losses[k][r] = std::max(0.0, detail::kl_unchecked(estimate, sampler.cells()));
        }
      }
    }
  };

  const unsigned workers = std::max(1u, config.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  for (std::int64_t r : rejections) table.rejections += r;
  return table;
}

std::vector<RiskEstimate> simulate_risks(std::span<const EstimatorKind> kinds,
                                         const TwoStageModel& model, std::int64_t n,
                                         std::int64_t n_star, const SimulationConfig& config) {
  const LossTable table = simulate_losses(kinds, model, n, n_star, config);
  std::vector<RiskEstimate> out;
  out.reserve(kinds.size());
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    RiskEstimate estimate = summarize_losses(table.losses[k]);
    estimate.kind = kinds[k];
    estimate.n = n;
    estimate.n_star = n_star;
    estimate.discard_rate = table.discard_rate();
    out.push_back(estimate);
  }
  return out;
}

RiskEstimate simulate_risk(EstimatorKind kind, const TwoStageModel& model, std::int64_t n,
                           std::int64_t n_star, const SimulationConfig& config) {
  const EstimatorKind kinds[] = {kind};
  return simulate_risks(kinds, model, n, n_star, config).front();
}

}  // namespace twostage
