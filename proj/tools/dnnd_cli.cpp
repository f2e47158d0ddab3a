#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "dnnd/checkpoint.hpp"
#include "dnnd/error.hpp"
#include "dnnd/evaluation.hpp"
#include "dnnd/experiments.hpp"
#include "dnnd/genmodel.hpp"
#include "run_support.hpp"

using namespace dnnd;
using namespace dnnd::cli;
namespace fs = std::filesystem;

namespace {

const char* kMetricsHeader = "dataset,slot,method,metric,k,mean,std\n";

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::string metric_row(const RunConfig& cfg, std::size_t slot, const std::string& metric,
                       const std::string& k, double mean, double sd) {
  return fs::path(cfg.dataset).filename().string() + "," + std::to_string(slot) + "," +
         cfg.method() + "," + metric + "," + k + "," + num(mean) + "," + num(sd) + "\n";
}

void warn(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

// Hyperparameter flags: --alpha X sets the starting value, --alpha-fixed X
// holds it there. The two are exclusive.
void add_hyper_flags(CLI::App* sub, RunConfig& cfg, bool with_fixed) {
  struct Flag {
    const char* name;
    double* value;
    Hyper which;
  };
  const Flag flags[] = {{"alpha", &cfg.alpha, Hyper::Alpha},
                        {"tau", &cfg.tau, Hyper::Tau},
                        {"gamma", &cfg.gamma, Hyper::Gamma},
                        {"sigma", &cfg.sigma, Hyper::Sigma},
                        {"lambda1", &cfg.lambda1, Hyper::Lambda1},
                        {"lambda2", &cfg.lambda2, Hyper::Lambda2}};
  for (const Flag& f : flags) {
    auto* plain = sub->add_option(std::string("--") + f.name, *f.value,
                                  with_fixed ? "starting value" : "value")
                      ->capture_default_str();
    if (!with_fixed) continue;
    double* value = f.value;
    const int slot = static_cast<int>(f.which);
    auto* fixed = sub->add_option_function<double>(
        std::string("--") + f.name + "-fixed",
        [&cfg, value, slot](double v) {
          *value = v;
          cfg.fixed[slot] = true;
        },
        "hold at this value");
    plain->excludes(fixed);
  }
  sub->add_option("--decay", cfg.decay, "window, exp, logistic or constant")
      ->check(CLI::IsMember({"window", "exp", "exponential", "logistic", "constant"}))
      ->capture_default_str();
}

void add_chain_flags(CLI::App* sub, RunConfig& cfg) {
  add_hyper_flags(sub, cfg, true);
  sub->add_option("--iterations", cfg.iterations)->capture_default_str();
  sub->add_option("--burnin", cfg.burnin)->capture_default_str();
  sub->add_option("--thin", cfg.thin)->capture_default_str();
  sub->add_option("--init", cfg.init, "star, singleton or random")
      ->check(CLI::IsMember({"star", "singleton", "random"}))
      ->capture_default_str();
  sub->add_option("--proposal-step", cfg.priors.proposal_step,
                  "fixed MH step (0 = adaptive)")
      ->capture_default_str();
  sub->add_option("--seed", cfg.seed)->capture_default_str();
  sub->add_option("--out", cfg.out, "output directory")->capture_default_str();
}

void add_data_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--data", cfg.dataset, "edge list: src dst time per line")
      ->required()
      ->check(CLI::ExistingFile);
}

void add_slot_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--slot-duration", cfg.slot_duration,
                  "slot length in time units (default: one slot)");
  sub->add_option("--jobs", cfg.jobs, "worker threads")->capture_default_str();
  sub->add_option("--label", cfg.label, "method name in the CSV");
}

std::vector<std::string> trace_row(const infer::Sampler& s) {
  const HyperParams& hp = s.hp();
  return {std::to_string(s.iteration()), num(hp.alpha),   num(hp.tau),
          num(hp.gamma),                 num(hp.sigma),   num(hp.decay1.lambda),
          num(hp.decay2.lambda),         std::to_string(s.num_clusters()),
          std::to_string(s.num_tables()), num(s.log_likelihood())};
}

// ---------------------------------------------------------------------------

int cmd_simulate(const RunConfig& cfg, std::size_t edges, double spacing,
                 const std::string& model, const std::string& name) {
  HyperParams hp = cfg.initial_hp();
  hp.validate();
  Rng rng(cfg.seed);
  const auto times = gen::unit_schedule(edges, spacing);
  std::vector<Edge> out;
  std::size_t vertices = 0;
  if (model == "plain") {
    auto tr = gen::simulate_ddcrp_multigraph(hp.decay1, hp.tau, times, rng);
    out = std::move(tr.edges);
    vertices = tr.num_vertices;
  } else {
    auto tr = gen::simulate_dnnd(hp, times, rng);
    vertices = tr.num_vertices();
    out = std::move(tr.edges);
  }
  auto file = open_output(cfg.out, name);
  io::write_edge_list(io::from_edges(std::move(out)), file);
  auto conf = cfg.to_json();
  conf["edges"] = edges;
  conf["spacing"] = spacing;
  conf["model"] = model;
  write_manifest(cfg.out, "simulate", conf);
  std::printf("%zu edges over %zu vertices -> %s\n", edges, vertices,
              (fs::path(cfg.out) / name).string().c_str());
  return 0;
}

int cmd_fit(const RunConfig& cfg, const std::string& resume, std::size_t every,
            bool iterations_given) {
  auto ds = io::parse_edge_list(cfg.dataset);
  const fs::path ckpt_path = fs::path(cfg.out) / "checkpoint.json";
  std::optional<infer::Sampler> s;
  std::size_t until = cfg.iterations;
  if (!resume.empty()) {
    auto ck = io::load_checkpoint(resume);
    until = iterations_given ? cfg.iterations : ck.config.iterations;
    s.emplace(io::restore(ck, ds.edges));
  } else {
    cfg.validate();
    s.emplace(ds.edges, cfg.chain(cfg.seed));
  }
  auto trace = open_output(cfg.out, "trace.csv");
  trace << "iteration,alpha,tau,gamma,sigma,lambda1,lambda2,clusters,tables,log_likelihood\n";
  while (s->iteration() < until) {
    s->sweep();
    auto row = trace_row(*s);
    for (std::size_t c = 0; c < row.size(); ++c) trace << (c ? "," : "") << row[c];
    trace << '\n';
    if (every > 0 && s->iteration() % every == 0) {
      io::save_checkpoint(io::capture(*s), ckpt_path.string());
    }
  }
  io::save_checkpoint(io::capture(*s), ckpt_path.string());
  auto conf = cfg.to_json();
  conf["resume"] = resume;
  write_manifest(cfg.out, "fit", conf);
  std::printf("%zu iterations, %zu clusters, log-likelihood %.6g\n", s->iteration(),
              s->num_clusters(), s->log_likelihood());
  return 0;
}

int cmd_evaluate(RunConfig cfg, bool redraw_prefix) {
  cfg.validate();
  auto ds = io::parse_edge_list(cfg.dataset);
  const auto slots = slots_of(ds, cfg.slot_duration);
  auto rows = run_tasks(slots.size(), cfg.jobs, [&](std::size_t k) -> std::string {
    const io::Slot& slot = slots[k];
    if (slot.size() < 2) {
      warn("slot " + std::to_string(k) + " has fewer than 2 edges; skipped");
      return {};
    }
    std::span<const Edge> edges(ds.edges.data() + slot.first, slot.size());
    auto [train, test] = io::split_train_test(edges, cfg.train_frac);
    if (test.empty()) {
      warn("slot " + std::to_string(k) + " has no held-out edges; skipped");
      return {};
    }
    auto idx = io::reindex(train, test);
    auto samples = infer::run_chain(idx.train, cfg.chain(cfg.seed + k));
    if (samples.empty()) throw ConfigError("the chain kept no samples; check --burnin");
    eval::LtrConfig ltr;
    ltr.particles = cfg.particles;
    ltr.seed = cfg.seed + k;
    ltr.redraw_prefix = redraw_prefix;
    auto res = eval::left_to_right_loglik(idx.train, samples, idx.test, ltr);
    const double n = static_cast<double>(idx.test.size());
    std::vector<double> per_edge;
    for (double t : res.sample_total) per_edge.push_back(t / n);
    return metric_row(cfg, k, "heldout_loglik", "", mean_of(res.sample_total),
                      sd_of(res.sample_total)) +
           metric_row(cfg, k, "heldout_loglik_per_edge", "", mean_of(per_edge),
                      sd_of(per_edge));
  });
  auto csv = open_output(cfg.out, "metrics.csv");
  csv << kMetricsHeader;
  for (const auto& r : rows) csv << r;
  auto conf = cfg.to_json();
  conf["redraw_prefix"] = redraw_prefix;
  write_manifest(cfg.out, "evaluate", conf);
  return 0;
}

int cmd_forecast(RunConfig cfg) {
  cfg.validate();
  if (cfg.k.empty()) throw ConfigError("--k needs at least one value");
  auto ds = io::parse_edge_list(cfg.dataset);
  if (!(cfg.slot_duration > 0.0)) {
    throw ConfigError("forecast needs --slot-duration to pair consecutive slots");
  }
  const auto slots = slots_of(ds, cfg.slot_duration);
  const std::size_t pairs = slots.size() > 0 ? slots.size() - 1 : 0;
  const std::size_t k_max = *std::max_element(cfg.k.begin(), cfg.k.end());
  auto rows = run_tasks(pairs, cfg.jobs, [&](std::size_t p) -> std::string {
    const io::Slot& a = slots[p];
    const io::Slot& b = slots[p + 1];
    if (a.size() == 0 || b.size() == 0) {
      warn("slot pair " + std::to_string(p) + "/" + std::to_string(p + 1) +
           " has an empty side; skipped");
      return {};
    }
    std::span<const Edge> train(ds.edges.data() + a.first, a.size());
    std::span<const Edge> test(ds.edges.data() + b.first, b.size());
    auto idx = io::reindex(train, test);
    auto samples = infer::run_chain(idx.train, cfg.chain(cfg.seed + p));
    if (samples.empty()) throw ConfigError("the chain kept no samples; check --burnin");
    const std::size_t n_true = eval::distinct_pairs(idx.test).size();
    auto fc = eval::forecast(idx.train, samples, idx.test, std::max(k_max, n_true),
                             cfg.forecast_samples);
    std::string out;
    const std::size_t slot = p + 1;
    for (std::size_t k : cfg.k) {
      std::vector<double> hits;
      for (const auto& s : fc.per_sample) hits.push_back(eval::hits_at_k(s, idx.test, k));
      out += metric_row(cfg, slot, "hits", std::to_string(k),
                        eval::hits_at_k(fc.averaged, idx.test, k), sd_of(hits));
      std::vector<double> ap;
      for (const auto& s : fc.per_sample) ap.push_back(eval::ap_at_k({s}, idx.test, k));
      out += metric_row(cfg, slot, "ap", std::to_string(k),
                        eval::ap_at_k(fc.per_sample, idx.test, k), sd_of(ap));
    }
    std::vector<double> f1;
    for (const auto& s : fc.per_sample) {
      f1.push_back(eval::f1_score(s.truncated(n_true), idx.test));
    }
    out += metric_row(cfg, slot, "f1", "",
                      eval::f1_score(fc.averaged.truncated(n_true), idx.test), sd_of(f1));
    return out;
  });
  auto csv = open_output(cfg.out, "metrics.csv");
  csv << kMetricsHeader;
  for (const auto& r : rows) csv << r;
  write_manifest(cfg.out, "forecast", cfg.to_json());
  return 0;
}

int cmd_sparsity(RunConfig cfg, std::vector<double> sigmas, std::size_t edges,
                 std::size_t seeds, std::size_t fit_from, int per_decade) {
  study::SparsityConfig base;
  base.base = cfg.initial_hp();
  base.edges = edges;
  base.fit_from = fit_from;
  base.per_decade = per_decade;
  base.seeds = 1;
  for (double s : sigmas) {
    HyperParams hp = base.base;
    hp.sigma = s;
    hp.validate();
  }
  if (fit_from == 0 || fit_from >= edges) {
    throw ConfigError("--fit-from must lie between 1 and --edges");
  }
  const std::size_t tasks = sigmas.size() * seeds;
  std::vector<study::SlopeReport> reports(tasks);
  run_tasks(tasks, cfg.jobs, [&](std::size_t t) -> std::string {
    study::SparsityConfig one = base;
    one.sigmas = {sigmas[t / seeds]};
    one.seed = cfg.seed + t % seeds;
    reports[t] = study::sparsity_study(one).front();
    return {};
  });
  auto slopes = open_output(cfg.out, "slopes.csv");
  auto points = open_output(cfg.out, "points.csv");
  slopes << "sigma,seed,slope,stderr,points,final_vertices\n";
  points << "sigma,seed,log_v,log_e\n";
  std::map<double, std::vector<double>> by_sigma;
  for (const auto& r : reports) {
    slopes << num(r.sigma) << ',' << r.seed << ',' << num(r.fit.slope) << ','
           << num(r.fit.stderr_slope) << ',' << r.fit.points << ',' << r.final_vertices
           << '\n';
    for (auto [lv, le] : r.points) {
      points << num(r.sigma) << ',' << r.seed << ',' << num(lv) << ',' << num(le) << '\n';
    }
    by_sigma[r.sigma].push_back(r.fit.slope);
  }
  for (const auto& [s, v] : by_sigma) {
    std::printf("sigma %-5g mean slope %.4f over %zu seeds\n", s, mean_of(v), v.size());
  }
  auto conf = cfg.to_json();
  conf["sigmas"] = sigmas;
  conf["edges"] = edges;
  conf["seeds"] = seeds;
  conf["fit_from"] = fit_from;
  conf["per_decade"] = per_decade;
  write_manifest(cfg.out, "sparsity-study", conf);
  return 0;
}

int cmd_degree_dist(const RunConfig& cfg) {
  auto ds = io::parse_edge_list(cfg.dataset);
  auto csv = open_output(cfg.out, "degrees.csv");
  csv << "lo,hi,count,density\n";
  for (const auto& b : study::log_binned_degrees(ds.edges)) {
    csv << b.lo << ',' << b.hi << ',' << b.count << ',' << num(b.density) << '\n';
  }
  write_manifest(cfg.out, "degree-dist", cfg.to_json());
  return 0;
}

// Most edges in any half-open window [t, t + 1).
std::size_t max_unit_rate(const std::vector<Edge>& edges) {
  std::size_t best = 0;
  for (std::size_t lo = 0, hi = 0; lo < edges.size(); ++lo) {
    while (hi < edges.size() && edges[hi].time < edges[lo].time + 1.0) ++hi;
    best = std::max(best, hi - lo);
  }
  return best;
}

int cmd_check_assumption(const RunConfig& cfg, double exponent) {
  auto ds = io::parse_edge_list(cfg.dataset);
  const HyperParams hp = cfg.initial_hp();
  const double d_hat = gen::assumption_bound_scan(ds.edges, hp.decay1, exponent);
  const std::size_t rate = max_unit_rate(ds.edges);
  const double bound = gen::arrival_rate_bound(hp.decay1, static_cast<double>(rate));
  auto csv = open_output(cfg.out, "assumption.csv");
  csv << "decay,lambda,a,edges,d_hat,max_rate,rate_bound\n";
  csv << to_string(hp.decay1.kind) << ',' << num(hp.decay1.lambda) << ',' << num(exponent)
      << ',' << ds.edges.size() << ',' << num(d_hat) << ',' << rate << ',' << num(bound)
      << '\n';
  std::printf("D = %.6g (a = %g); at most %zu edges per unit time, bound %.6g\n", d_hat,
              exponent, rate, bound);
  auto conf = cfg.to_json();
  conf["a"] = exponent;
  write_manifest(cfg.out, "check-assumption", conf);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dnnd: simulate, fit and score temporal multigraph models"};
  app.set_config("--config", "", "read options from a TOML/INI file");
  app.require_subcommand(1);

  RunConfig cfg;
  std::function<int()> action;

  auto* sim = app.add_subcommand("simulate", "draw a synthetic edge list");
  std::size_t sim_edges = 1000;
  double spacing = 1.0;
  std::string model = "dnnd", name = "edges.txt";
  add_hyper_flags(sim, cfg, false);
  sim->add_option("--edges", sim_edges)->capture_default_str();
  sim->add_option("--spacing", spacing, "time between edges")->capture_default_str();
  sim->add_option("--model", model, "dnnd or plain (single-urn ddCRP multigraph)")
      ->check(CLI::IsMember({"dnnd", "plain"}))
      ->capture_default_str();
  sim->add_option("--name", name, "output file name")->capture_default_str();
  sim->add_option("--seed", cfg.seed)->capture_default_str();
  sim->add_option("--out", cfg.out)->capture_default_str();
  sim->callback([&] { action = [&] { return cmd_simulate(cfg, sim_edges, spacing, model, name); }; });

  auto* fit = app.add_subcommand("fit", "run the MCMC sampler on a dataset");
  std::string resume;
  std::size_t every = 0;
  add_data_flags(fit, cfg);
  add_chain_flags(fit, cfg);
  fit->add_option("--resume", resume, "continue from a checkpoint")->check(CLI::ExistingFile);
  fit->add_option("--checkpoint-every", every, "iterations between checkpoints");
  fit->callback([&] {
    const bool given = fit->count("--iterations") > 0;
    action = [&, given] { return cmd_fit(cfg, resume, every, given); };
  });

  auto* ev = app.add_subcommand("evaluate", "held-out log-likelihood per time slot");
  bool redraw = false;
  add_data_flags(ev, cfg);
  add_chain_flags(ev, cfg);
  add_slot_flags(ev, cfg);
  ev->add_option("--train-frac", cfg.train_frac)->capture_default_str();
  ev->add_option("--particles", cfg.particles)->capture_default_str();
  ev->add_flag("--redraw-prefix", redraw, "redraw each particle's path before every edge");
  ev->callback([&] { action = [&] { return cmd_evaluate(cfg, redraw); }; });

  auto* fc = app.add_subcommand("forecast", "predict slot T+1 from slot T");
  add_data_flags(fc, cfg);
  add_chain_flags(fc, cfg);
  add_slot_flags(fc, cfg);
  fc->add_option("--k", cfg.k, "cutoffs for hits@k and AP@k")
      ->delimiter(',')
      ->capture_default_str();
  fc->add_option("--samples", cfg.forecast_samples, "posterior samples to average")
      ->capture_default_str();
  fc->callback([&] { action = [&] { return cmd_forecast(cfg); }; });

  auto* sp = app.add_subcommand("sparsity-study", "slope of log E against log V");
  std::vector<double> sigmas{0.0, 0.3, 0.6, 0.8};
  std::size_t sp_edges = 100000, seeds = 5, fit_from = 10;
  int per_decade = 4;
  sp->add_option("--sigma", sigmas, "comma-separated values")
      ->delimiter(',')
      ->capture_default_str();
  const std::pair<const char*, double*> sp_hypers[] = {{"--alpha", &cfg.alpha},
                                                       {"--tau", &cfg.tau},
                                                       {"--gamma", &cfg.gamma},
                                                       {"--lambda1", &cfg.lambda1},
                                                       {"--lambda2", &cfg.lambda2}};
  for (auto [flag, target] : sp_hypers) sp->add_option(flag, *target);
  sp->add_option("--decay", cfg.decay)
      ->check(CLI::IsMember({"window", "exp", "exponential", "logistic", "constant"}));
  sp->add_option("--edges", sp_edges)->capture_default_str();
  sp->add_option("--seeds", seeds)->capture_default_str();
  sp->add_option("--fit-from", fit_from, "smallest edge count in the fit")
      ->capture_default_str();
  sp->add_option("--per-decade", per_decade)->capture_default_str();
  sp->add_option("--seed", cfg.seed)->capture_default_str();
  sp->add_option("--jobs", cfg.jobs)->capture_default_str();
  sp->add_option("--out", cfg.out)->capture_default_str();
  sp->callback([&] {
    if (sp->count("--tau") == 0) cfg.tau = 0.2;
    if (sp->count("--decay") == 0) cfg.decay = "window";
    action = [&] { return cmd_sparsity(cfg, sigmas, sp_edges, seeds, fit_from, per_decade); };
  });

  auto* dd = app.add_subcommand("degree-dist", "log-binned total degree histogram");
  add_data_flags(dd, cfg);
  dd->add_option("--out", cfg.out)->capture_default_str();
  dd->callback([&] { action = [&] { return cmd_degree_dist(cfg); }; });

  auto* ca = app.add_subcommand("check-assumption",
                                "max over n of the decayed history sum, scaled by n^a");
  double exponent = 0.0;
  add_data_flags(ca, cfg);
  ca->add_option("--decay", cfg.decay)
      ->check(CLI::IsMember({"window", "exp", "exponential", "logistic", "constant"}))
      ->capture_default_str();
  ca->add_option("--lambda", cfg.lambda1)->capture_default_str();
  ca->add_option("--a", exponent, "growth exponent")->capture_default_str();
  ca->add_option("--out", cfg.out)->capture_default_str();
  ca->callback([&] { action = [&] { return cmd_check_assumption(cfg, exponent); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    return action();
  } catch (const dnnd::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
