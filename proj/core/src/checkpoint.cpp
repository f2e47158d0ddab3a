#include "dnnd/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dnnd/error.hpp"
#include "json.hpp"

namespace dnnd::io {

using nlohmann::json;

namespace {

template <class T>
T field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) {
    throw CheckpointError(std::string("checkpoint is missing field '") + name + "'");
  }
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw CheckpointError(std::string("checkpoint field '") + name +
                          "' has the wrong type");
  }
}

const json& object(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end() || !it->is_object()) {
    throw CheckpointError(std::string("checkpoint is missing object '") + name + "'");
  }
  return *it;
}

json decay_json(const DecayFn& f) {
  return {{"kind", to_string(f.kind)}, {"lambda", f.lambda}};
}

DecayFn decay_from(const json& j) {
  DecayFn f;
  try {
    f.kind = parse_decay_kind(field<std::string>(j, "kind"));
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("checkpoint field 'kind': ") + e.what());
  }
  f.lambda = field<double>(j, "lambda");
  return f;
}

json hyper_json(const HyperParams& hp) {
  return {{"alpha", hp.alpha},   {"tau", hp.tau},
          {"gamma", hp.gamma},   {"sigma", hp.sigma},
          {"decay1", decay_json(hp.decay1)}, {"decay2", decay_json(hp.decay2)}};
}

HyperParams hyper_from(const json& j) {
  HyperParams hp;
  hp.alpha = field<double>(j, "alpha");
  hp.tau = field<double>(j, "tau");
  hp.gamma = field<double>(j, "gamma");
  hp.sigma = field<double>(j, "sigma");
  hp.decay1 = decay_from(object(j, "decay1"));
  hp.decay2 = decay_from(object(j, "decay2"));
  return hp;
}

json gamma_json(const GammaPrior& p) { return {p.shape, p.rate}; }

GammaPrior gamma_from(const json& j, const char* name) {
  auto v = field<std::vector<double>>(j, name);
  if (v.size() != 2) throw CheckpointError(std::string("prior '") + name + "' needs 2 values");
  return {v[0], v[1]};
}

const char* init_name(InitMode m) {
  switch (m) {
    case InitMode::Star:
      return "star";
    case InitMode::Singleton:
      return "singleton";
    case InitMode::Random:
      return "random";
  }
  return "star";
}

InitMode init_from(const std::string& s) {
  if (s == "star") return InitMode::Star;
  if (s == "singleton") return InitMode::Singleton;
  if (s == "random") return InitMode::Random;
  throw CheckpointError("checkpoint field 'init_mode' has unknown value '" + s + "'");
}

json config_json(const infer::ChainConfig& c) {
  json fixed = json::array();
  for (Hyper h : kAllHypers) {
    if (c.is_fixed(h)) fixed.push_back(to_string(h));
  }
  return {{"iterations", c.iterations},
          {"burnin", c.burnin},
          {"thin", c.thin},
          {"seed", c.seed},
          {"priors",
           {{"alpha", gamma_json(c.priors.alpha)},
            {"gamma", gamma_json(c.priors.gamma)},
            {"tau", gamma_json(c.priors.tau)},
            {"sigma", {c.priors.sigma.a, c.priors.sigma.b}},
            {"lambda", gamma_json(c.priors.lambda)},
            {"proposal_step", c.priors.proposal_step}}},
          {"init", hyper_json(c.init)},
          {"fixed", fixed},
          {"init_mode", init_name(c.init_mode)},
          {"dirichlet_only_target", c.dirichlet_only_target},
          {"adapt_interval", c.adapt_interval},
          {"validate_each_sweep", c.validate_each_sweep}};
}

infer::ChainConfig config_from(const json& j) {
  infer::ChainConfig c;
  c.iterations = field<std::size_t>(j, "iterations");
  c.burnin = field<std::size_t>(j, "burnin");
  c.thin = field<std::size_t>(j, "thin");
  c.seed = field<std::uint64_t>(j, "seed");
  const json& p = object(j, "priors");
  c.priors.alpha = gamma_from(p, "alpha");
  c.priors.gamma = gamma_from(p, "gamma");
  c.priors.tau = gamma_from(p, "tau");
  auto sb = field<std::vector<double>>(p, "sigma");
  if (sb.size() != 2) throw CheckpointError("prior 'sigma' needs 2 values");
  c.priors.sigma = {sb[0], sb[1]};
  c.priors.lambda = gamma_from(p, "lambda");
  c.priors.proposal_step = field<double>(p, "proposal_step");
  c.init = hyper_from(object(j, "init"));
  for (const auto& name : field<std::vector<std::string>>(j, "fixed")) {
    try {
      c.fix(parse_hyper(name));
    } catch (const ConfigError& e) {
      throw CheckpointError(std::string("checkpoint field 'fixed': ") + e.what());
    }
  }
  c.init_mode = init_from(field<std::string>(j, "init_mode"));
  c.dirichlet_only_target = field<bool>(j, "dirichlet_only_target");
  c.adapt_interval = field<std::size_t>(j, "adapt_interval");
  c.validate_each_sweep = field<bool>(j, "validate_each_sweep");
  return c;
}

}  // namespace

std::string fingerprint(const std::vector<Edge>& edges) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto mix = [&](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      hash ^= p[i];
      hash *= 0x100000001b3ULL;
    }
  };
  for (const Edge& e : edges) {
    mix(&e.sender, sizeof e.sender);
    mix(&e.recipient, sizeof e.recipient);
    mix(&e.time, sizeof e.time);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

Checkpoint capture(const infer::Sampler& sampler) {
  Checkpoint c;
  c.config = sampler.config();
  c.hp = sampler.hp();
  c.state = sampler.state();
  c.iteration = sampler.iteration();
  c.rng_token = sampler.rng().state_token();
  c.moves = sampler.moves();
  c.data_fingerprint = fingerprint(sampler.edges());
  return c;
}

infer::Sampler restore(const Checkpoint& ckpt, std::vector<Edge> edges) {
  if (fingerprint(edges) != ckpt.data_fingerprint) {
    throw CheckpointError("checkpoint was taken on different data (fingerprint mismatch)");
  }
  return infer::Sampler(std::move(edges), ckpt.config, ckpt.state, ckpt.hp,
                        ckpt.rng_token, ckpt.iteration, ckpt.moves);
}

std::string to_json(const Checkpoint& c) {
  json moves = json::object();
  for (Hyper h : kAllHypers) {
    const auto& m = c.moves[static_cast<std::size_t>(h)];
    moves[to_string(h)] = {{"step", m.step},
                           {"proposed", m.proposed},
                           {"accepted", m.accepted},
                           {"window_proposed", m.window_proposed},
                           {"window_accepted", m.window_accepted}};
  }
  json j = {{"format", "dnnd-checkpoint"},
            {"version", kCheckpointVersion},
            {"data_fingerprint", c.data_fingerprint},
            {"iteration", c.iteration},
            {"config", config_json(c.config)},
            {"hyper", hyper_json(c.hp)},
            {"state",
             {{"follow", c.state.follow},
              {"sender_link", c.state.sender_link},
              {"recipient_link", c.state.recipient_link},
              {"h", c.state.h},
              {"h_plus", c.state.h_plus},
              {"eta", c.state.eta}}},
            {"moves", moves},
            {"rng", c.rng_token}};
  return j.dump(1);
}

Checkpoint from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw CheckpointError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw CheckpointError("checkpoint root must be an object");
  if (field<std::string>(j, "format") != "dnnd-checkpoint") {
    throw CheckpointError("checkpoint field 'format' is not 'dnnd-checkpoint'");
  }
  const int version = field<int>(j, "version");
  if (version != kCheckpointVersion) {
    throw CheckpointError("checkpoint field 'version' is " + std::to_string(version) +
                          ", expected " + std::to_string(kCheckpointVersion));
  }
  Checkpoint c;
  c.data_fingerprint = field<std::string>(j, "data_fingerprint");
  c.iteration = field<std::size_t>(j, "iteration");
  c.config = config_from(object(j, "config"));
  c.hp = hyper_from(object(j, "hyper"));
  const json& s = object(j, "state");
  c.state.follow = field<std::vector<EdgeIndex>>(s, "follow");
  c.state.sender_link = field<std::vector<EdgeIndex>>(s, "sender_link");
  c.state.recipient_link = field<std::vector<EdgeIndex>>(s, "recipient_link");
  c.state.h = field<std::vector<double>>(s, "h");
  c.state.h_plus = field<double>(s, "h_plus");
  c.state.eta = field<std::vector<std::uint32_t>>(s, "eta");
  const json& mv = object(j, "moves");
  for (Hyper h : kAllHypers) {
    const json& m = object(mv, to_string(h).c_str());
    auto& out = c.moves[static_cast<std::size_t>(h)];
    out.step = field<double>(m, "step");
    out.proposed = field<std::uint64_t>(m, "proposed");
    out.accepted = field<std::uint64_t>(m, "accepted");
    out.window_proposed = field<std::uint64_t>(m, "window_proposed");
    out.window_accepted = field<std::uint64_t>(m, "window_accepted");
  }
  c.rng_token = field<std::string>(j, "rng");
  return c;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write checkpoint '" + path + "'");
  out << to_json(ckpt) << '\n';
  if (!out) throw CheckpointError("failed writing checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

}  // namespace dnnd::io
