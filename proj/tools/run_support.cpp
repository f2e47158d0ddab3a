#include "run_support.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <mutex>
#include <thread>

#include "dnnd/error.hpp"

#ifndef DNND_GIT_DESCRIBE
#define DNND_GIT_DESCRIBE "unknown"
#endif

namespace dnnd::cli {

using nlohmann::json;

HyperParams RunConfig::initial_hp() const {
  const DecayKind kind = parse_decay_kind(decay);
  HyperParams hp;
  hp.alpha = alpha;
  hp.tau = tau;
  hp.gamma = gamma;
  hp.sigma = sigma;
  hp.decay1 = {kind, kind == DecayKind::Constant ? 1.0 : lambda1};
  hp.decay2 = {kind, kind == DecayKind::Constant ? 1.0 : lambda2};
  return hp;
}

infer::ChainConfig RunConfig::chain(std::uint64_t chain_seed) const {
  infer::ChainConfig cfg;
  cfg.iterations = iterations;
  cfg.burnin = burnin;
  cfg.thin = thin;
  cfg.seed = chain_seed;
  cfg.priors = priors;
  cfg.init = initial_hp();
  cfg.fixed = fixed;
  if (init == "star") {
    cfg.init_mode = InitMode::Star;
  } else if (init == "singleton") {
    cfg.init_mode = InitMode::Singleton;
  } else if (init == "random") {
    cfg.init_mode = InitMode::Random;
  } else {
    throw ConfigError("unknown init mode '" + init + "'");
  }
  return cfg;
}

std::string RunConfig::method() const {
  if (!label.empty()) return label;
  const bool stationary = parse_decay_kind(decay) == DecayKind::Constant &&
                          fixed[static_cast<int>(Hyper::Sigma)] && sigma == 0.0;
  return stationary ? "mdnd" : "dnnd-" + to_string(parse_decay_kind(decay));
}

void RunConfig::validate() const {
  if (!(train_frac > 0.0 && train_frac <= 1.0)) {
    throw ConfigError("--train-frac must lie in (0, 1]");
  }
  if (slot_duration < 0.0) throw ConfigError("--slot-duration must be positive");
  if (particles == 0) throw ConfigError("--particles must be positive");
  for (std::size_t v : k) {
    if (v == 0) throw ConfigError("--k values must be positive");
  }
  initial_hp().validate();
  chain(seed).validate();
}

json RunConfig::to_json() const {
  json fixed_list = json::array();
  for (Hyper h : kAllHypers) {
    if (fixed[static_cast<int>(h)]) fixed_list.push_back(to_string(h));
  }
  return {{"dataset", dataset},
          {"decay", decay},
          {"lambda1", lambda1},
          {"lambda2", lambda2},
          {"alpha", alpha},
          {"tau", tau},
          {"gamma", gamma},
          {"sigma", sigma},
          {"fixed", fixed_list},
          {"init", init},
          {"iterations", iterations},
          {"burnin", burnin},
          {"thin", thin},
          {"slot_duration", slot_duration},
          {"train_frac", train_frac},
          {"k", k},
          {"particles", particles},
          {"forecast_samples", forecast_samples},
          {"seed", seed},
          {"method", method()}};
}

void write_manifest(const std::filesystem::path& dir, const std::string& command,
                    const json& config) {
  json m = {{"tool", "dnnd"},
            {"command", command},
            {"git_describe", DNND_GIT_DESCRIBE},
            {"config", config}};
  open_output(dir, "manifest.json") << m.dump(2) << '\n';
}

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / name);
  if (!out) throw InputError("cannot write '" + (dir / name).string() + "'");
  return out;
}

std::string num(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> run_tasks(std::size_t count, unsigned jobs,
                                   const std::function<std::string(std::size_t)>& task) {
  std::vector<std::string> results(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        results[i] = task(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < n; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

std::vector<io::Slot> slots_of(io::TemporalDataset& ds, double duration) {
  if (duration > 0.0) return io::slice_slots(ds, duration);
  io::Slot all;
  all.start = ds.edges.front().time;
  all.end = ds.edges.back().time;
  all.first = 0;
  all.last = ds.edges.size();
  return {all};
}

}  // namespace dnnd::cli
