#pragma once

// Command-line front end. Kept header-only so tests can drive it in-process.
//
// Exit codes: 0 success, 1 a `verify` check failed, 2 invalid
// configuration, 3 internal numerical failure.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "betafreeze/bounds.hpp"
#include "betafreeze/errors.hpp"
#include "betafreeze/experiment.hpp"
#include "betafreeze/hermite.hpp"
#include "betafreeze/sampler.hpp"
#include "betafreeze/spectral.hpp"

namespace betafreeze::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitNumerical = 3;

inline constexpr const char* kSeedEnv = "BETAFREEZE_SEED";

/// Seed from BETAFREEZE_SEED, or 0 if unset.
inline std::uint64_t default_seed() {
  const char* v = std::getenv(kSeedEnv);
  if (v == nullptr || *v == '\0') return 0;
  try {
    std::size_t pos = 0;
    const unsigned long long s = std::stoull(v, &pos);
    if (pos != std::string(v).size()) throw std::invalid_argument("trailing characters");
    return s;
  } catch (const std::exception&) {
    throw InvalidConfig(std::string(kSeedEnv) + " is not an unsigned integer");
  }
}

/// Parses a sweep configuration:
/// {"n": [...], "k": [...], "c": [...], "trials": T, "seed": S, "workers": W, "confidence": Q}
inline SweepGrid parse_sweep_config(const nlohmann::json& j) {
  SweepGrid g;
  try {
    g.ns = j.at("n").get<std::vector<int>>();
    g.ks = j.at("k").get<std::vector<double>>();
    g.cs = j.at("c").get<std::vector<double>>();
    g.trials = j.value("trials", std::uint64_t{100000});
    g.seed = j.value("seed", std::uint64_t{0});
    g.workers = j.value("workers", 1u);
    g.confidence = j.value("confidence", kDefaultConfidence);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("sweep config: ") + e.what());
  }
  return g;
}

namespace detail {

struct Options {
  int n = 0;
  double k = 0.0;
  double tol = kDefaultZeroTolerance;
  std::string format = "csv";
  std::optional<double> eps;
  std::optional<double> c;
  std::string norm = "l2";
  std::uint64_t trials = 100000;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  double confidence = kDefaultConfidence;
  std::string out;
  std::string config;
};

// Writes to --out when given, else to the default stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw InvalidConfig("cannot open output file " + path);
      os_ = &file_;
    }
  }
  std::ostream& stream() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

inline std::string fmt(double v) { return format_real(v); }

inline int cmd_zeros(const Options& o, std::ostream& out) {
  const HermiteZeros z = compute_zeros(o.n, o.tol);
  const double fp = fixed_point_residual(z);
  const double pg = potential_identity_gap(z);
  if (o.format == "json") {
    nlohmann::json j;
    j["n"] = o.n;
    j["zeros"] = std::vector<double>(z.values().begin(), z.values().end());
    j["fixed_point_residual"] = fp;
    j["potential_gap"] = pg;
    out << j.dump(2) << '\n';
  } else {
    out << "# fixed_point_residual=" << fmt(fp) << " potential_gap=" << fmt(pg) << '\n';
    out << "index,zero\n";
    for (int i = 0; i < z.order(); ++i) out << (i + 1) << ',' << fmt(z[i]) << '\n';
  }
  return kExitOk;
}

inline int cmd_verify(const Options& o, std::ostream& out) {
  const HermiteZeros z = compute_zeros(o.n, std::max(kDefaultZeroTolerance, 1e-9 * o.n));
  const PrecisionSpectralPair p = build_precision(z);
  const double n = o.n;
  bool all_ok = true;
  auto report = [&](const std::string& name, double value, double target, bool ok) {
    out << (ok ? "PASS " : "FAIL ") << name << " value=" << fmt(value) << " target=" << fmt(target)
        << '\n';
    all_ok = all_ok && ok;
  };
  auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };

  const double dev = spectrum_deviation(p);
  const double dev_tol = 1e-7 * std::max(1.0, n / 60.0);
  report("spectrum_deviation", dev, dev_tol, dev <= dev_tol);

  double tr = 0.0, tr2 = 0.0, worst_row = 0.0;
  const std::size_t sz = p.precision.size();
  for (std::size_t i = 0; i < sz; ++i) {
    tr += p.precision(i, i);
    double row = 0.0;
    for (std::size_t j = 0; j < sz; ++j) {
      tr2 += p.precision(i, j) * p.precision(j, i);
      row += p.precision(i, j);
    }
    worst_row = std::max(worst_row, std::abs(row - 1.0));
  }
  const double tr_target = n * (n + 1) / 2;
  const double tr2_target = n * (n + 1) * (2 * n + 1) / 6;
  report("trace_S", tr, tr_target, rel(tr, tr_target) <= 1e-9);
  report("trace_S_squared", tr2, tr2_target, rel(tr2, tr2_target) <= 1e-9);

  const double s2 = inverse_power_sum(z, 2);
  const double s2_target = n * (n - 1) / 2;
  report("inverse_power_sum_2", s2, s2_target, rel(s2, s2_target) <= 1e-9);
  const double s4 = inverse_power_sum(z, 4);
  const double s4_bound = n * (n - 1) * (2 * n - 1) / 12;
  report("inverse_power_sum_4", s4, s4_bound, s4 <= s4_bound);

  const double gap = min_gap(z);
  const double gap_bound = 2.0 / std::sqrt(n);
  // The bound is attained with equality at N = 2.
  report("min_gap", gap, gap_bound, gap >= gap_bound * (1.0 - 1e-14));
  report("row_sums", worst_row, 1e-12, worst_row <= 1e-12);
  return all_ok ? kExitOk : kExitCheckFailed;
}

inline int cmd_sample(const Options& o, std::ostream& out) {
  if (o.n < 2) throw InvalidConfig("n must be >= 2");
  if (!(o.k > 0.0)) throw InvalidConfig("k must be positive");
  const std::uint64_t seed = o.seed ? *o.seed : default_seed();
  out << "# betafreeze sample n=" << o.n << " k=" << fmt(o.k) << " beta=" << fmt(2.0 * o.k)
      << " trials=" << o.trials << " seed=" << seed << '\n';
  out << "trial,i,lambda_i\n";
  for (std::uint64_t t = 0; t < o.trials; ++t) {
    SeedStream rng(seed, t);
    const auto x = sample_ensemble(o.n, o.k, rng);
    for (int i = 0; i < o.n; ++i) out << (t + 1) << ',' << (i + 1) << ',' << fmt(x.values[i]) << '\n';
  }
  return kExitOk;
}

inline int cmd_bounds(const Options& o, std::ostream& out) {
  if (o.eps.has_value() == o.c.has_value()) throw InvalidConfig("give exactly one of --eps or --c");
  if (o.n < 2) throw InvalidConfig("n must be >= 2");
  if (!(o.k >= 1.0)) throw InvalidConfig("k must be >= 1");
  if (o.c && !(o.k > 1.0)) throw InvalidConfig("--c requires k > 1");
  const double eps = o.eps ? *o.eps : eps_from_c(o.k, *o.c);
  if (!(eps > 0.0)) throw InvalidConfig("eps must be positive");
  const BoundBreakdown b = prop_bound(o.n, o.k, eps);
  const double di_eps = std::sqrt(2.0 * o.k) * eps;
  const double di = dette_imhof_bound(o.n, di_eps);
  std::optional<double> c = o.c;
  if (!c && o.k > 1.0) c = eps / std::sqrt(std::log(o.k) / o.k);
  const double cor = c ? cor_bound_value(o.n, o.k, *c) : 0.0;
  const bool cor_ok = c && o.k >= std::numbers::e && cor_condition(o.n, o.k, *c);

  if (o.format == "json") {
    nlohmann::json j;
    j["N"] = o.n;
    j["k"] = o.k;
    j["beta"] = 2.0 * o.k;
    j["eps"] = eps;
    j["c"] = c ? nlohmann::json(*c) : nlohmann::json(nullptr);
    j["prop_term_quartic"] = b.term_quartic;
    j["prop_term_stirling"] = b.term_stirling;
    j["prop_e_factor"] = b.e_factor;
    j["prop_term_gaussian"] = b.term_gaussian;
    j["prop_total"] = b.total;
    j["prop_total_clamped"] = b.total_clamped;
    j["condition_ok"] = b.condition_ok;
    j["cor_bound"] = c ? nlohmann::json(cor) : nlohmann::json(nullptr);
    j["cor_condition_ok"] = cor_ok;
    j["di_eps_unscaled"] = di_eps;
    j["di_bound"] = di;
    out << j.dump(2) << '\n';
  } else {
    out << "N,k,eps,c,prop_term_quartic,prop_term_stirling,prop_e_factor,prop_term_gaussian,"
           "prop_total,prop_total_clamped,condition_ok,cor_bound,cor_condition_ok,"
           "di_eps_unscaled,di_bound\n";
    out << o.n << ',' << fmt(o.k) << ',' << fmt(eps) << ',' << (c ? fmt(*c) : "") << ','
        << fmt(b.term_quartic) << ',' << fmt(b.term_stirling) << ',' << fmt(b.e_factor) << ','
        << fmt(b.term_gaussian) << ',' << fmt(b.total) << ',' << fmt(b.total_clamped) << ','
        << (b.condition_ok ? "true" : "false") << ',' << (c ? fmt(cor) : "") << ','
        << (cor_ok ? "true" : "false") << ',' << fmt(di_eps) << ',' << fmt(di) << '\n';
  }
  return kExitOk;
}

inline ExperimentConfig to_config(const Options& o) {
  ExperimentConfig cfg;
  cfg.n = o.n;
  cfg.k = o.k;
  cfg.eps = o.eps;
  cfg.c = o.c;
  cfg.trials = o.trials;
  cfg.seed = o.seed ? *o.seed : default_seed();
  cfg.workers = o.workers;
  cfg.confidence = o.confidence;
  if (o.norm == "l2") {
    cfg.norm = TailNorm::l2;
  } else if (o.norm == "sup") {
    cfg.norm = TailNorm::sup;
  } else {
    throw InvalidConfig("norm must be l2 or sup");
  }
  cfg.validate();
  return cfg;
}

inline int cmd_tail(const Options& o, std::ostream& out) {
  const ExperimentConfig cfg = to_config(o);
  if (!cfg.eps && !cfg.c) throw InvalidConfig("give --eps or --c");
  const TailEstimate t = estimate_tail(cfg);
  const double eps = cfg.scaled_eps();
  Sink sink(o.out, out);
  auto& os = sink.stream();
  os << "# betafreeze tail trials=" << cfg.trials << " seed=" << cfg.seed
     << " workers=" << cfg.workers << " confidence=" << fmt(cfg.confidence) << '\n';
  os << "N,k,eps,norm,threshold,trials,hits,p_hat,ci_low,ci_high\n";
  const double threshold = cfg.norm == TailNorm::l2 ? eps : std::sqrt(2.0 * cfg.k) * eps;
  os << cfg.n << ',' << fmt(cfg.k) << ',' << fmt(eps) << ',' << o.norm << ',' << fmt(threshold)
     << ',' << t.trials << ',' << t.hits << ',' << fmt(t.p_hat) << ',' << fmt(t.ci_low) << ','
     << fmt(t.ci_high) << '\n';
  return kExitOk;
}

inline int cmd_clt(const Options& o, std::ostream& out) {
  const ExperimentConfig cfg = to_config(o);
  const CltReport r = clt_covariance_test(cfg);
  Sink sink(o.out, out);
  auto& os = sink.stream();
  os << "# betafreeze clt trials=" << cfg.trials << " seed=" << cfg.seed
     << " workers=" << cfg.workers << '\n';
  os << "N,k,trials,mean_norm,cov_rel_err\n";
  os << r.n << ',' << fmt(r.k) << ',' << r.trials << ',' << fmt(r.mean_norm) << ','
     << fmt(r.cov_rel_err) << '\n';
  return kExitOk;
}

inline int cmd_sweep(const Options& o, std::ostream& out) {
  std::ifstream in(o.config);
  if (!in) throw InvalidConfig("cannot read sweep config " + o.config);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("sweep config: ") + e.what());
  }
  const SweepGrid g = parse_sweep_config(j);
  Sink sink(o.out, out);
  sweep(g, sink.stream());
  return kExitOk;
}

}  // namespace detail

/// Runs the CLI with the given arguments (argv[0] is the program name).
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"betafreeze: freezing limits of beta-Hermite ensembles"};
  app.require_subcommand(1);
  detail::Options o;

  auto* zeros = app.add_subcommand("zeros", "Zeros of H_N and their identity residuals");
  zeros->add_option("--n", o.n, "Polynomial order")->required();
  zeros->add_option("--tol", o.tol, "Fixed-point residual tolerance");
  zeros->add_option("--format", o.format)->check(CLI::IsMember({"csv", "json"}));

  auto* verify = app.add_subcommand("verify", "Check spectrum and trace identities of S_N");
  verify->add_option("--n", o.n)->required();

  auto* sample = app.add_subcommand("sample", "Draw ensemble samples");
  sample->add_option("--n", o.n)->required();
  sample->add_option("--k", o.k)->required();
  sample->add_option("--trials", o.trials)->required();
  sample->add_option("--seed", o.seed);
  sample->add_option("--format", o.format)->check(CLI::IsMember({"csv"}));

  auto* bounds = app.add_subcommand("bounds", "Evaluate the tail bounds");
  bounds->add_option("--n", o.n)->required();
  bounds->add_option("--k", o.k)->required();
  auto* b_eps = bounds->add_option("--eps", o.eps);
  auto* b_c = bounds->add_option("--c", o.c);
  b_eps->excludes(b_c);
  bounds->add_option("--format", o.format)->check(CLI::IsMember({"csv", "json"}));

  auto* tail = app.add_subcommand("tail", "Monte Carlo tail probability");
  tail->add_option("--n", o.n)->required();
  tail->add_option("--k", o.k)->required();
  auto* t_eps = tail->add_option("--eps", o.eps);
  auto* t_c = tail->add_option("--c", o.c);
  t_eps->excludes(t_c);
  tail->add_option("--norm", o.norm)->check(CLI::IsMember({"l2", "sup"}));
  tail->add_option("--trials", o.trials);
  tail->add_option("--seed", o.seed);
  tail->add_option("--workers", o.workers);
  tail->add_option("--confidence", o.confidence);
  tail->add_option("--out", o.out);

  auto* clt = app.add_subcommand("clt", "Empirical covariance vs the Gaussian limit");
  clt->add_option("--n", o.n)->required();
  clt->add_option("--k", o.k)->required();
  clt->add_option("--trials", o.trials);
  clt->add_option("--seed", o.seed);
  clt->add_option("--workers", o.workers);
  clt->add_option("--out", o.out);

  auto* sweep_cmd = app.add_subcommand("sweep", "Bound-vs-empirical sweep over a JSON grid");
  sweep_cmd->add_option("--config", o.config)->required();
  sweep_cmd->add_option("--out", o.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  }

  try {
    if (zeros->parsed()) return detail::cmd_zeros(o, out);
    if (verify->parsed()) return detail::cmd_verify(o, out);
    if (sample->parsed()) return detail::cmd_sample(o, out);
    if (bounds->parsed()) return detail::cmd_bounds(o, out);
    if (tail->parsed()) return detail::cmd_tail(o, out);
    if (clt->parsed()) return detail::cmd_clt(o, out);
    if (sweep_cmd->parsed()) return detail::cmd_sweep(o, out);
  } catch (const InvalidConfig& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const ConditionViolated& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const std::invalid_argument& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitInvalidConfig;
}

}  // namespace betafreeze::cli
