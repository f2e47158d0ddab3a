#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "dnnd/dataio.hpp"
#include "dnnd/inference.hpp"
#include "json.hpp"

namespace dnnd::cli {

/// Everything a fit / evaluate / forecast run is configured by.
struct RunConfig {
  std::string dataset;
  std::string decay = "exp";
  double lambda1 = 10.0;
  double lambda2 = 10.0;
  double alpha = 1.0, tau = 1.0, gamma = 1.0, sigma = 0.0;
  std::array<bool, 6> fixed{};
  std::string init = "star";
  PriorSpec priors;
  std::size_t iterations = 1000;
  std::size_t burnin = 500;
  std::size_t thin = 10;
  double slot_duration = 0.0;  // 0: the whole dataset is one slot
  double train_frac = 0.85;
  std::vector<std::size_t> k{10, 20, 50};
  std::size_t particles = 100;
  std::size_t forecast_samples = 10;
  std::string out = ".";
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::string label;

  HyperParams initial_hp() const;
  infer::ChainConfig chain(std::uint64_t chain_seed) const;
  /// "mdnd" for the stationary configuration, otherwise "dnnd-<decay>".
  std::string method() const;
  void validate() const;
  nlohmann::json to_json() const;
};

/// Writes `manifest.json` describing the run into `dir`.
void write_manifest(const std::filesystem::path& dir, const std::string& command,
                    const nlohmann::json& config);

/// Opens `dir / name` for writing, creating `dir` if needed.
std::ofstream open_output(const std::filesystem::path& dir, const std::string& name);

/// Shortest decimal text that reads back to the same double.
std::string num(double v);

/// Runs task(0..count-1) on up to `jobs` threads. Results are returned in
/// task order; the first exception is rethrown after all workers stop.
std::vector<std::string> run_tasks(std::size_t count, unsigned jobs,
                                   const std::function<std::string(std::size_t)>& task);

/// Time windows of a dataset; a single window when duration is 0.
std::vector<io::Slot> slots_of(io::TemporalDataset& ds, double duration);

}  // namespace dnnd::cli
