#include "twostage/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <ostream>
#include <thread>
#include <vector>

#include "twostage/asymptotics.hpp"
#include "twostage/error.hpp"
#include "twostage/model_io.hpp"
#include "twostage/montecarlo.hpp"
#include "twostage/planning.hpp"
#include "twostage/tables.hpp"

namespace twostage {

namespace {

struct UsageError {
  std::string message;
};

class Formatter {
 public:
  explicit Formatter(bool full) : full_(full) {}

  // Risks and statistics: 6 decimals, as printed in the published tables.
  std::string risk(double value) const { return format(full_ ? "%.17g" : "%.6f", value); }
  // Standard errors and rates: 6 significant digits.
  std::string small(double value) const { return format(full_ ? "%.17g" : "%.6g", value); }

 private:
  static std::string format(const char* pattern, double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, pattern, value);
    return buffer;
  }

  bool full_;
};

struct SimFlags {
  std::int64_t reps = 10'000;
  std::uint64_t seed = 0;
  unsigned threads = 0;

  SimulationConfig config() const {
    SimulationConfig c;
    c.replications = reps;
    c.seed = seed;
    c.workers = threads > 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    return c;
  }
};

void add_sim_flags(CLI::App* cmd, SimFlags& flags) {
  cmd->add_option("--reps", flags.reps, "Monte Carlo replications")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", flags.seed, "Random seed");
  cmd->add_option("--threads", flags.threads, "Worker threads (0 = all cores); results do not depend on it");
}

std::vector<EstimatorKind> estimator_list(const std::string& choice) {
  if (choice == "all") return {kAllEstimators.begin(), kAllEstimators.end()};
  if (auto kind = parse_estimator(choice)) return {*kind};
  throw UsageError{"--estimator: expected present, prior, pooled or all"};
}

void print_sim_header(std::ostream& out, const SimulationConfig& config) {
  out << "# seed=" << config.seed << " replications=" << config.replications << '\n';
}

struct RiskArgs {
  std::string model;
  std::string estimator = "all";
  std::string method = "app";
  std::int64_t n = 0;
  std::optional<std::int64_t> n_star;
  SimFlags sim;
};

void run_risk(const RiskArgs& args, const Formatter& fmt, std::ostream& out) {
  const std::vector<EstimatorKind> kinds = estimator_list(args.estimator);
  const bool needs_prior = std::any_of(kinds.begin(), kinds.end(),
                                       [](EstimatorKind k) { return k != EstimatorKind::Present; });
  if (needs_prior && !args.n_star) throw UsageError{"--nstar is required for the prior and pooled estimators"};
  const TwoStageModel model = load_model(args.model);
  const std::string nstar_text = args.n_star ? std::to_string(*args.n_star) : "";

  if (args.method == "app") {
    const DerivedQuantities dq = derive(model);
    out << "model,method,seed,replications,n,nstar";
    for (EstimatorKind k : kinds) out << ',' << to_string(k);
    out << '\n';
    out << model.name() << ",app,NA,NA," << args.n << ',' << nstar_text;
    for (EstimatorKind k : kinds) out << ',' << fmt.risk(risk_app(k, dq, args.n, args.n_star).total);
    out << '\n';
    return;
  }
  const SimulationConfig config = args.sim.config();
  const auto risks = simulate_risks(kinds, model, args.n, args.n_star.value_or(0), config);
  print_sim_header(out, config);
  out << "model,method,seed,replications,n,nstar";
  for (EstimatorKind k : kinds) out << ',' << to_string(k);
  for (EstimatorKind k : kinds) out << ',' << to_string(k) << "_se";
  out << ",discard_rate\n";
  out << model.name() << ",sim," << config.seed << ',' << config.replications << ',' << args.n << ','
      << nstar_text;
  for (const auto& r : risks) out << ',' << fmt.risk(r.mean_loss);
  for (const auto& r : risks) out << ',' << fmt.small(r.std_error);
  out << ',' << fmt.small(risks.front().discard_rate) << '\n';
}

struct RssArgs {
  std::string model;
  std::string kind;
  std::int64_t n0 = 0;
  std::optional<std::int64_t> n0_star;
  std::string method = "app";
  SimFlags sim;
};

RssKind parse_rss_kind(const std::string& text) {
  if (text == "prior-vs-present") return RssKind::PriorToPresent;
  if (text == "present-vs-pooled") return RssKind::PresentToPooled;
  throw UsageError{"--kind: expected prior-vs-present or present-vs-pooled"};
}

void run_rss(const RssArgs& args, std::ostream& out) {
  RssQuery query;
  query.kind = parse_rss_kind(args.kind);
  query.n0 = args.n0;
  query.n0_star = args.n0_star;
  if (query.kind == RssKind::PresentToPooled && !query.n0_star) {
    throw UsageError{"--n0star is required for present-vs-pooled"};
  }
  std::string provenance = "app,NA,NA";
  if (args.method == "sim") {
    const SimulationConfig config = args.sim.config();
    query.method = config;
    provenance = "sim," + std::to_string(config.seed) + ',' + std::to_string(config.replications);
    print_sim_header(out, config);
  }
  const TwoStageModel model = load_model(args.model);
  const std::int64_t rss = required_sample_size(query, model);
  out << "model,kind,n0,n0star,method,seed,replications,rss\n";
  out << model.name() << ',' << to_string(query.kind) << ',' << query.n0 << ','
      << (query.n0_star ? std::to_string(*query.n0_star) : "") << ',' << provenance << ',' << rss << '\n';
}

struct AdviseArgs {
  std::string model;
  std::string counts;
  std::string plug_in;
  std::optional<std::int64_t> n;
  std::optional<std::int64_t> n_star;
  std::string stage = "post";
};

void run_advise(const AdviseArgs& args, const Formatter& fmt, std::ostream& out) {
  const AdviceStage stage = args.stage == "plan" ? AdviceStage::Planning : AdviceStage::PostSurvey;
  if (args.counts.empty() == args.plug_in.empty()) {
    throw UsageError{"advise: give exactly one of --counts FILE or --plug-in truth"};
  }
  const TwoStageModel model = load_model(args.model);
  Recommendation rec;
  std::string source;
  if (!args.plug_in.empty()) {
    if (args.plug_in != "truth") throw UsageError{"--plug-in: only 'truth' is supported"};
    if (!args.n || !args.n_star) throw UsageError{"--plug-in truth needs --n and --nstar"};
    const DerivedQuantities dq = derive(model);
    rec = recommend(dq.marginals, model.layout(), *args.n, *args.n_star, stage);
    source = "truth";
  } else {
    const SurveyCounts counts = load_counts(args.counts);
    counts.check_shape(model);
    rec = advise(counts, model.layout(), stage, args.n);
    source = stage == AdviceStage::PostSurvey ? "pooled" : "prior";
  }
  out << "model,stage,plug_in,n,nstar,statistic,decision,M_f,marginals\n";
  out << model.name() << ',' << to_string(rec.context) << ',' << source << ',' << rec.n << ','
      << rec.n_star << ',' << fmt.risk(rec.statistic) << ',' << to_string(rec.decision) << ','
      << fmt.small(rec.M_f) << ',';
  for (std::size_t i = 0; i < rec.marginals.size(); ++i) {
    out << (i ? ";" : "") << fmt.small(rec.marginals[i]);
  }
  out << '\n';
}

struct ReproduceArgs {
  int example = 1;
  std::string table = "risk";
  std::string method = "app";
  SimFlags sim;
};

void run_reproduce(const ReproduceArgs& args, const Formatter& fmt, std::ostream& out) {
  const ExampleGrid& grid = example_grid(args.example);
  const TwoStageModel model = load_model(grid.model_name);
  const bool sim = args.method == "sim";
  const SimulationConfig config = args.sim.config();
  const std::string provenance =
      sim ? "sim," + std::to_string(config.seed) + ',' + std::to_string(config.replications) : "app,NA,NA";
  if (sim) print_sim_header(out, config);

  if (args.table == "risk") {
    out << "example,n,nstar,method,seed,replications,present,prior,pooled";
    if (sim) out << ",present_se,prior_se,pooled_se,discard_rate";
    out << '\n';
    const DerivedQuantities dq = derive(model);
    for (const auto& [n, n_star] : grid.risk_points) {
      out << grid.id << ',' << n << ',' << n_star << ',' << provenance;
      if (sim) {
        const auto risks = simulate_risks(kAllEstimators, model, n, n_star, config);
        for (const auto& r : risks) out << ',' << fmt.risk(r.mean_loss);
        for (const auto& r : risks) out << ',' << fmt.small(r.std_error);
        out << ',' << fmt.small(risks.front().discard_rate);
      } else {
        for (EstimatorKind k : kAllEstimators) out << ',' << fmt.risk(risk_app(k, dq, n, n_star).total);
      }
      out << '\n';
    }
    return;
  }

  RssQuery query;
  if (args.table == "rss-prior") {
    query.kind = RssKind::PriorToPresent;
  } else if (args.table == "rss-pooled") {
    query.kind = RssKind::PresentToPooled;
  } else {
    throw UsageError{"--table: expected risk, rss-prior or rss-pooled"};
  }
  if (sim) query.method = config;
  out << "example,table,n0,n0star,method,seed,replications,rss\n";
  for (std::int64_t n0 : grid.rss_n0) {
    query.n0 = n0;
    if (query.kind == RssKind::PresentToPooled) query.n0_star = n0;
    out << grid.id << ',' << args.table << ',' << n0 << ','
        << (query.n0_star ? std::to_string(*query.n0_star) : "") << ',' << provenance << ','
        << required_sample_size(query, model) << '\n';
  }
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Risk of present, prior and pooled estimators for two-stage multinomial surveys",
               "twostage"};
  std::string precision = "short";
  std::string dump_model;
  app.add_option("--precision", precision, "short (6 decimals) or full (round-trip digits)")
      ->check(CLI::IsMember({"short", "full"}));
  app.add_option("--dump-model", dump_model, "Print a model (bundled name or file) in model file format");
  app.fallthrough();

  RiskArgs risk;
  auto* risk_cmd = app.add_subcommand("risk", "Approximate or simulated risk of the estimators");
  risk_cmd->add_option("--model", risk.model, "Bundled model name or model file")->required();
  risk_cmd->add_option("--estimator", risk.estimator, "present|prior|pooled|all")
      ->check(CLI::IsMember({"present", "prior", "pooled", "all"}));
  risk_cmd->add_option("--method", risk.method, "app|sim")->check(CLI::IsMember({"app", "sim"}));
  risk_cmd->add_option("--n", risk.n, "Present sample size")->required()->check(CLI::PositiveNumber);
  risk_cmd->add_option("--nstar", risk.n_star, "Prior sample size")->check(CLI::PositiveNumber);
  add_sim_flags(risk_cmd, risk.sim);

  RssArgs rss;
  auto* rss_cmd = app.add_subcommand("rss", "Required sample size");
  rss_cmd->add_option("--model", rss.model, "Bundled model name or model file")->required();
  rss_cmd->add_option("--kind", rss.kind, "prior-vs-present|present-vs-pooled")
      ->required()
      ->check(CLI::IsMember({"prior-vs-present", "present-vs-pooled"}));
  rss_cmd->add_option("--n0", rss.n0, "Reference present sample size")->required()->check(CLI::PositiveNumber);
  rss_cmd->add_option("--n0star", rss.n0_star, "Reference prior sample size")->check(CLI::PositiveNumber);
  rss_cmd->add_option("--method", rss.method, "app|sim")->required()->check(CLI::IsMember({"app", "sim"}));
  add_sim_flags(rss_cmd, rss.sim);

  AdviseArgs advise_args;
  auto* advise_cmd = app.add_subcommand("advise", "Decide whether to pool the prior survey");
  advise_cmd->add_option("--model", advise_args.model, "Bundled model name or model file")->required();
  advise_cmd->add_option("--counts", advise_args.counts, "Counts file");
  advise_cmd->add_option("--plug-in", advise_args.plug_in, "Use the model's own marginals ('truth')");
  advise_cmd->add_option("--n", advise_args.n, "Present (or planned) sample size")->check(CLI::PositiveNumber);
  advise_cmd->add_option("--nstar", advise_args.n_star, "Prior sample size")->check(CLI::PositiveNumber);
  advise_cmd->add_option("--stage", advise_args.stage, "post|plan")->check(CLI::IsMember({"post", "plan"}));

  ReproduceArgs reproduce;
  auto* reproduce_cmd = app.add_subcommand("reproduce", "Regenerate the worked example tables");
  reproduce_cmd->add_option("--example", reproduce.example, "1|2|3")->required()->check(CLI::Range(1, 3));
  reproduce_cmd->add_option("--table", reproduce.table, "risk|rss-prior|rss-pooled")
      ->required()
      ->check(CLI::IsMember({"risk", "rss-prior", "rss-pooled"}));
  reproduce_cmd->add_option("--method", reproduce.method, "app|sim")->check(CLI::IsMember({"app", "sim"}));
  add_sim_flags(reproduce_cmd, reproduce.sim);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }

  const Formatter fmt(precision == "full");
  try {
    if (!dump_model.empty()) {
      out << format_model(load_model(dump_model));
      return 0;
    }
    if (risk_cmd->parsed()) {
      run_risk(risk, fmt, out);
    } else if (rss_cmd->parsed()) {
      run_rss(rss, out);
    } else if (advise_cmd->parsed()) {
      run_advise(advise_args, fmt, out);
    } else if (reproduce_cmd->parsed()) {
      run_reproduce(reproduce, fmt, out);
    } else {
      err << "usage error: a subcommand is required (risk, rss, advise, reproduce)\n";
      return 2;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.message << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace twostage
