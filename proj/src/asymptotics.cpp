#include "twostage/asymptotics.hpp"

#include <cmath>
#include <string>

#include "twostage/error.hpp"

namespace twostage {

namespace {

struct Terms {
  long double first = 0.0L;
  long double second = 0.0L;
};

void check_sizes(EstimatorKind kind, double n, std::optional<double> n_star) {
  if (!(n >= 1.0)) throw Error(ErrorCode::DomainError, "n must be >= 1");
  if (kind == EstimatorKind::Present) return;
  if (!n_star) {
    throw Error(ErrorCode::MissingNStar,
                std::string(to_string(kind)) + " risk needs the prior sample size n*");
  }
  if (!(*n_star >= 1.0)) throw Error(ErrorCode::DomainError, "n* must be >= 1");
}

Terms expansion(EstimatorKind kind, const DerivedQuantities& dq, long double n, long double n_star) {
  const auto groups = static_cast<long double>(dq.group_count());
  long double sum_s = 0.0L;
  for (int s : dq.s) sum_s += s;

  // First-stage sample size and the weight of the non-unified correction
  // 12 (1 - m_i.) s_i in the second-order term.
  long double first_stage_n = n;
  long double correction = 0.0L;
  switch (kind) {
    case EstimatorKind::Present:
      break;
    case EstimatorKind::Prior:
      first_stage_n = n_star;
      correction = 1.0L;
      break;
    case EstimatorKind::Pooled:
      first_stage_n = n + n_star;
      correction = n_star / (n + n_star);
      break;
  }

  long double weighted = 0.0L;
  for (std::size_t i = 0; i < dq.group_count(); ++i) {
    const long double m = dq.marginals[i];
    weighted += (dq.A[i] + 12.0L * (1.0L - m) * dq.s[i] * correction) / m;
  }

  Terms t;
  t.first = (groups - 1.0L) / (2.0L * first_stage_n) + sum_s / (2.0L * n);
  t.second = (static_cast<long double>(dq.M_f) - 1.0L) / (12.0L * first_stage_n * first_stage_n) +
             weighted / (24.0L * n * n);
  return t;
}

long double nonunified_penalty(std::span<const double> marginals, std::span<const int> s) {
  long double total = 0.0L;
  for (std::size_t i = 0; i < marginals.size(); ++i) {
    const long double m = marginals[i];
    total += s[i] * (1.0L - m) / m;
  }
  return total;
}

}  // namespace

double risk_full_model(int p, double M, std::int64_t n) {
  if (p < 1) throw Error(ErrorCode::DomainError, "model dimension p must be >= 1");
  if (n < 1) throw Error(ErrorCode::DomainError, "n must be >= 1");
  const double bound = static_cast<double>(p + 1) * static_cast<double>(p + 1);
  if (!(M >= bound * (1.0 - 1e-12))) {
    throw Error(ErrorCode::DomainError, "M must be at least (p+1)^2 = " + std::to_string(bound));
  }
  const long double nn = static_cast<long double>(n);
  return static_cast<double>(p / (2.0L * nn) + (M - 1.0L) / (12.0L * nn * nn));
}

namespace detail {

double risk_app_value(EstimatorKind kind, const DerivedQuantities& dq, double n, double n_star) {
  const Terms t = expansion(kind, dq, n, n_star);
  return static_cast<double>(t.first + t.second);
}

}  // namespace detail

RiskApproximation risk_app(EstimatorKind kind, const DerivedQuantities& dq, std::int64_t n,
                           std::optional<std::int64_t> n_star) {
  std::optional<double> ns;
  if (n_star) ns = static_cast<double>(*n_star);
  check_sizes(kind, static_cast<double>(n), ns);

  const Terms t = expansion(kind, dq, static_cast<long double>(n),
                            ns ? static_cast<long double>(*ns) : 0.0L);
  RiskApproximation out;
  out.kind = kind;
  out.n = n;
  if (kind != EstimatorKind::Present) out.n_star = n_star;
  out.first_order = static_cast<double>(t.first);
  out.second_order = static_cast<double>(t.second);
  out.total = out.first_order + out.second_order;
  return out;
}

double risk_app_full_closed_form(EstimatorKind kind, const DerivedQuantities& dq, std::int64_t n,
                                 std::optional<std::int64_t> n_star) {
  std::optional<double> ns;
  if (n_star) ns = static_cast<double>(*n_star);
  check_sizes(kind, static_cast<double>(n), ns);

  const long double nn = static_cast<long double>(n);
  const long double p = dq.p_total;
  const long double groups = static_cast<long double>(dq.group_count());
  const long double M = dq.M;
  const long double M_f = dq.M_f;
  if (kind == EstimatorKind::Present) {
    return static_cast<double>(p / (2.0L * nn) + (M - 1.0L) / (12.0L * nn * nn));
  }

  const long double nstar = static_cast<long double>(*n_star);
  long double j_over_m = 0.0L;   // sum_i J_i / m_i.
  long double six_j_minus_7 = 0.0L;  // sum_i (6 J_i - 7) / m_i.
  for (std::size_t i = 0; i < dq.group_count(); ++i) {
    const long double J = dq.s[i] + 1;
    j_over_m += J / dq.marginals[i];
    six_j_minus_7 += (6.0L * J - 7.0L) / dq.marginals[i];
  }
  const long double second_stage_dim = p + 1.0L - groups;

  if (kind == EstimatorKind::Prior) {
    return static_cast<double>((groups - 1.0L) / (2.0L * nstar) + second_stage_dim / (2.0L * nn) +
                               (M_f - 1.0L) / (12.0L * nstar * nstar) +
                               (M + six_j_minus_7 - 6.0L * second_stage_dim) / (12.0L * nn * nn));
  }
  const long double total = nn + nstar;
  return static_cast<double>(
      (groups - 1.0L) / (2.0L * total) + second_stage_dim / (2.0L * nn) +
      (M_f - 1.0L) / (12.0L * total * total) +
      (M - M_f + 6.0L * nstar / total * (j_over_m - M_f - second_stage_dim)) / (12.0L * nn * nn));
}

double risk_gap_present_prior(const DerivedQuantities& dq, std::int64_t n, std::int64_t n_star) {
  check_sizes(EstimatorKind::Prior, static_cast<double>(n), static_cast<double>(n_star));
  const long double nn = static_cast<long double>(n);
  const long double ns = static_cast<long double>(n_star);
  const long double groups = static_cast<long double>(dq.group_count());
  return static_cast<double>(
      (groups - 1.0L) / 2.0L * (1.0L / nn - 1.0L / ns) +
      (dq.M_f - 1.0L) / 12.0L * (1.0L / (nn * nn) - 1.0L / (ns * ns)) -
      nonunified_penalty(dq.marginals, dq.s) / (2.0L * nn * nn));
}

double present_pooled_gap(std::span<const double> marginals, std::span<const int> s, double n,
                          double n_star) {
  if (marginals.size() != s.size()) throw Error(ErrorCode::ShapeError, "marginals and s differ in length");
  check_sizes(EstimatorKind::Pooled, n, n_star);
  long double M_f = 0.0L;
  for (double m : marginals) {
    if (!(m > 0.0)) throw Error(ErrorCode::DomainError, "marginals must be positive");
    M_f += 1.0L / m;
  }
  const long double nn = n;
  const long double total = nn + n_star;
  const long double groups = static_cast<long double>(marginals.size());
  return static_cast<double>(
      (groups - 1.0L) / 2.0L * (1.0L / nn - 1.0L / total) +
      (M_f - 1.0L) / 12.0L * (1.0L / (nn * nn) - 1.0L / (total * total)) -
      n_star / (2.0L * nn * nn * total) * nonunified_penalty(marginals, s));
}

double risk_gap_present_pooled(const DerivedQuantities& dq, std::int64_t n, std::int64_t n_star) {
  return present_pooled_gap(dq.marginals, dq.s, static_cast<double>(n), static_cast<double>(n_star));
}

}  // namespace twostage
