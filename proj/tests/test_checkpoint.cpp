#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "dnnd/checkpoint.hpp"
#include "dnnd/error.hpp"
#include "dnnd/genmodel.hpp"

using namespace dnnd;
using nlohmann::json;

namespace {

std::vector<Edge> sample_data(std::size_t n, std::uint64_t seed) {
  HyperParams hp{1.0, 1.0, 2.0, 0.3, DecayFn::window(8.0), DecayFn::exponential(4.0)};
  Rng rng(seed);
  return gen::simulate_dnnd(hp, gen::unit_schedule(n), rng).edges;
}

infer::ChainConfig chain_config() {
  infer::ChainConfig cfg;
  cfg.iterations = 40;
  cfg.burnin = 20;
  cfg.seed = 77;
  cfg.adapt_interval = 5;
  cfg.init.decay1 = DecayFn::window(5.0);
  cfg.init.decay2 = DecayFn::exponential(3.0);
  return cfg;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string error_of(const std::string& text) {
  try {
    io::from_json(text);
  } catch (const CheckpointError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Checkpoint, JsonRoundTripIsExact) {
  auto edges = sample_data(60, 3);
  infer::Sampler s(edges, chain_config());
  for (int k = 0; k < 7; ++k) s.sweep();
  auto ck = io::capture(s);
  EXPECT_EQ(io::from_json(io::to_json(ck)), ck);
  const auto path = temp_path("dnnd_ckpt_roundtrip.json");
  io::save_checkpoint(ck, path);
  EXPECT_EQ(io::load_checkpoint(path), ck);
  std::filesystem::remove(path);
}

TEST(Checkpoint, ResumedChainMatchesUninterruptedRun) {
  auto edges = sample_data(80, 5);
  const auto cfg = chain_config();
  infer::Sampler straight(edges, cfg);
  std::vector<infer::PosteriorSample> a;
  straight.run(cfg.iterations, &a);

  infer::Sampler first(edges, cfg);
  std::vector<infer::PosteriorSample> b;
  first.run(13, &b);  // stop inside burn-in, mid adaptation window
  const auto path = temp_path("dnnd_ckpt_resume.json");
  io::save_checkpoint(io::capture(first), path);
  auto resumed = io::restore(io::load_checkpoint(path), edges);
  resumed.run(cfg.iterations, &b);
  std::filesystem::remove(path);

  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k], b[k]) << k;
  EXPECT_EQ(io::capture(straight), io::capture(resumed));
}

TEST(Checkpoint, DetectsDifferentData) {
  auto edges = sample_data(30, 8);
  infer::Sampler s(edges, chain_config());
  auto ck = io::capture(s);
  auto other = edges;
  other.back().time += 0.5;
  try {
    io::restore(ck, other);
    FAIL() << "expected CheckpointError";
  } catch (const CheckpointError& e) {
    EXPECT_NE(std::string(e.what()).find("fingerprint"), std::string::npos);
  }
  EXPECT_NE(io::fingerprint(edges), io::fingerprint(other));
  EXPECT_EQ(io::fingerprint(edges).size(), 16u);
}

TEST(Checkpoint, MalformedInputNamesTheProblem) {
  auto edges = sample_data(20, 9);
  infer::Sampler s(edges, chain_config());
  const std::string good = io::to_json(io::capture(s));

  EXPECT_NE(error_of(good.substr(0, good.size() / 2)).find("not valid JSON"),
            std::string::npos);

  json j = json::parse(good);
  j["version"] = 2;
  EXPECT_NE(error_of(j.dump()).find("'version'"), std::string::npos);

  j = json::parse(good);
  j["format"] = "something-else";
  EXPECT_NE(error_of(j.dump()).find("'format'"), std::string::npos);

  j = json::parse(good);
  j["state"].erase("h_plus");
  EXPECT_NE(error_of(j.dump()).find("'h_plus'"), std::string::npos);

  j = json::parse(good);
  j["iteration"] = "seven";
  auto msg = error_of(j.dump());
  EXPECT_NE(msg.find("'iteration'"), std::string::npos);
  EXPECT_NE(msg.find("wrong type"), std::string::npos);

  EXPECT_THROW(io::load_checkpoint(temp_path("dnnd_no_such_checkpoint.json")),
               CheckpointError);
}

TEST(Checkpoint, TruncatedFileFailsToLoad) {
  auto edges = sample_data(20, 10);
  infer::Sampler s(edges, chain_config());
  const auto path = temp_path("dnnd_ckpt_truncated.json");
  const std::string text = io::to_json(io::capture(s));
  {
    std::ofstream out(path);
    out << text.substr(0, text.size() - 40);
  }
  EXPECT_THROW(io::load_checkpoint(path), CheckpointError);
  std::filesystem::remove(path);
}
