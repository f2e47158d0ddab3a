#pragma once

#include <array>
#include <cstdint>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "dnnd/hyper.hpp"
#include "dnnd/model_state.hpp"
#include "dnnd/rng.hpp"
#include "dnnd/types.hpp"

namespace dnnd::infer {

struct ChainConfig {
  std::size_t iterations = 1000;
  std::size_t burnin = 0;
  std::size_t thin = 1;
  std::uint64_t seed = 0;
  PriorSpec priors;
  HyperParams init;
  /// Hyperparameters held at their initial value.
  std::array<bool, 6> fixed{};
  InitMode init_mode = InitMode::Star;
  /// Score gamma/sigma proposals with the Dirichlet density of h alone
  /// instead of the urn probability of the table labels times that density.
  bool dirichlet_only_target = false;
  /// Burn-in iterations between step-size adjustments.
  std::size_t adapt_interval = 50;
  /// Run the state validator after every sweep.
  bool validate_each_sweep = false;

  bool is_fixed(Hyper h) const { return fixed[static_cast<int>(h)]; }
  void fix(Hyper h, bool on = true) { fixed[static_cast<int>(h)] = on; }
  void validate() const;

  friend bool operator==(const ChainConfig&, const ChainConfig&) = default;
};

struct PosteriorSample {
  std::size_t iteration = 0;
  ModelState state;
  HyperParams hp;

  friend bool operator==(const PosteriorSample&,
                         const PosteriorSample&) = default;
};

/// Random-walk bookkeeping for one hyperparameter.
struct MoveStats {
  double step = 0.0;
  std::uint64_t proposed = 0;
  std::uint64_t accepted = 0;
  std::uint64_t window_proposed = 0;
  std::uint64_t window_accepted = 0;

  friend bool operator==(const MoveStats&, const MoveStats&) = default;
};

/// Draws h from Dirichlet(eta_v - sigma over tracked vertices, gamma + V*sigma)
/// where V counts tracked vertices. Vertices with h_v = 0 and eta_v = 0 are
/// retired and stay at zero; a tracked vertex with eta_v = 0 is an error.
void sample_h(ModelState& state, const HyperParams& hp, Rng& rng);

/// Moves the mass of vertices without tables into h_plus.
void retire_vertices(ModelState& state);

/// Options for one table link: (target edge, weight). The entry whose
/// target is i itself is the new-table option with weight tau * h_v.
std::vector<std::pair<EdgeIndex, double>> table_conditional(
    EdgeIndex i, Role role, const std::vector<Edge>& edges,
    std::span<const EdgeIndex> z, const ModelState& state,
    const HyperParams& hp);

/// Resamples one table link from table_conditional and updates eta.
EdgeIndex gibbs_table(EdgeIndex i, Role role, const std::vector<Edge>& edges,
                      std::span<const EdgeIndex> z, ModelState& state,
                      const HyperParams& hp, Rng& rng);

/// Metropolis accept step for a symmetric proposal.
bool mh_accept(double log_ratio, Rng& rng);

/// Log target for a move on `which` (prior plus the factor that depends on
/// it), evaluated at `hp`.
double hyper_log_target(Hyper which, const HyperParams& hp,
                        const std::vector<Edge>& edges,
                        const ModelState& state, const PriorSpec& priors,
                        bool dirichlet_only_target);

/// Single MCMC chain: owns the state, hyperparameters, RNG stream and the
/// cluster bookkeeping derived from the follow links.
class Sampler {
 public:
  Sampler(std::vector<Edge> edges, const ChainConfig& cfg);

  /// Resumes from saved pieces. Derived structures are rebuilt from `state`.
  Sampler(std::vector<Edge> edges, const ChainConfig& cfg, ModelState state,
          HyperParams hp, const std::string& rng_token, std::size_t iteration,
          std::array<MoveStats, 6> moves);

  /// One iteration: follows, tables, h, then the hyperparameter moves.
  void sweep();

  /// Sweeps until `iteration() == until`, appending kept samples to `out`.
  void run(std::size_t until, std::vector<PosteriorSample>* out);

  void sweep_tables();
  void update_h();
  void sweep_follows();
  void update_hypers();

  /// Exact conditional draw of c_i with all table links marginalized.
  EdgeIndex gibbs_follow(EdgeIndex i);

  /// Runs one MH move; returns whether it was accepted.
  bool mh_hyper(Hyper which);

  /// Replaces the data and state (used when data are resimulated).
  void reset(std::vector<Edge> edges, ModelState state);

  /// Sum over clusters of the sequential cluster log-likelihood.
  double log_likelihood() const;

  const std::vector<Edge>& edges() const { return edges_; }
  const ModelState& state() const { return state_; }
  const HyperParams& hp() const { return hp_; }
  void set_hp(const HyperParams& hp) { hp_ = hp; }
  const ChainConfig& config() const { return cfg_; }
  std::size_t iteration() const { return iteration_; }
  const std::array<MoveStats, 6>& moves() const { return moves_; }
  Rng& rng() { return rng_; }
  const Rng& rng() const { return rng_; }

  const std::vector<EdgeIndex>& labels() const { return z_; }
  std::size_t num_clusters() const { return roots_.size(); }
  std::size_t num_tables() const;
  std::size_t max_cluster_size() const;
  const std::vector<EdgeIndex>& members(EdgeIndex root) const {
    return members_[root];
  }

  /// Delta in log-likelihood from merging two disjoint, ascending member
  /// lists into one cluster.
  double merge_delta(std::span<const EdgeIndex> a,
                     std::span<const EdgeIndex> b) const;

  /// Verifies the derived structures against the follow links.
  void check_consistency() const;

 private:
  void rebuild();
  void init_steps();
  std::vector<EdgeIndex> subtree(EdgeIndex i) const;

  std::vector<Edge> edges_;
  ChainConfig cfg_;
  HyperParams hp_;
  ModelState state_;
  Rng rng_;
  std::size_t iteration_ = 0;
  std::array<MoveStats, 6> moves_{};

  std::vector<EdgeIndex> z_;
  std::vector<std::vector<EdgeIndex>> members_;
  std::vector<std::vector<EdgeIndex>> followers_;
  std::set<EdgeIndex> roots_;
};

std::vector<PosteriorSample> run_chain(const std::vector<Edge>& edges,
                                       const ChainConfig& cfg);

}  // namespace dnnd::infer
