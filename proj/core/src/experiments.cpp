#include "dnnd/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "dnnd/error.hpp"
#include "dnnd/genmodel.hpp"

namespace dnnd::study {

SlopeFit ols_fit(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size()) throw ConfigError("ols_fit: x and y differ in length");
  if (n < 3) throw ConfigError("ols_fit needs at least 3 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw ConfigError("ols_fit: x has no spread");
  SlopeFit fit;
  fit.points = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = y[i] - fit.intercept - fit.slope * x[i];
    rss += r * r;
  }
  fit.stderr_slope = std::sqrt(rss / (n - 2) / sxx);
  return fit;
}

std::vector<std::size_t> geometric_checkpoints(std::size_t first,
                                               std::size_t last,
                                               int per_decade) {
  std::set<std::size_t> pts;
  if (first == 0 || first > last) return {};
  const double lo = std::log10(static_cast<double>(first));
  const double hi = std::log10(static_cast<double>(last));
  for (int k = 0;; ++k) {
    double e = lo + static_cast<double>(k) / per_decade;
    if (e > hi + 1e-12) break;
    pts.insert(static_cast<std::size_t>(std::llround(std::pow(10.0, e))));
  }
  pts.insert(last);
  std::vector<std::size_t> out;
  for (auto p : pts) {
    if (p >= first && p <= last) out.push_back(p);
  }
  return out;
}

std::vector<std::size_t> vertices_seen(const std::vector<Edge>& edges,
                                       std::span<const std::size_t> prefix) {
  std::vector<std::size_t> out;
  std::unordered_set<VertexId> seen;
  std::size_t i = 0;
  for (std::size_t e : prefix) {
    for (; i < e && i < edges.size(); ++i) {
      seen.insert(edges[i].sender);
      seen.insert(edges[i].recipient);
    }
    out.push_back(seen.size());
  }
  return out;
}

std::vector<SlopeReport> sparsity_study(const SparsityConfig& cfg) {
  std::vector<SlopeReport> out;
  const auto times = gen::unit_schedule(cfg.edges);
  const auto marks = geometric_checkpoints(cfg.fit_from, cfg.edges, cfg.per_decade);
  for (double sigma : cfg.sigmas) {
    for (std::size_t s = 0; s < cfg.seeds; ++s) {
      HyperParams hp = cfg.base;
      hp.sigma = sigma;
      SlopeReport rep;
      rep.sigma = sigma;
      rep.seed = cfg.seed + s;
      Rng rng(rep.seed);
      auto tr = gen::simulate_dnnd(hp, times, rng);
      auto nv = vertices_seen(tr.edges, marks);
      std::vector<double> lx, ly;
      for (std::size_t k = 0; k < marks.size(); ++k) {
        lx.push_back(std::log(static_cast<double>(nv[k])));
        ly.push_back(std::log(static_cast<double>(marks[k])));
        rep.points.emplace_back(lx.back(), ly.back());
      }
      if (std::all_of(lx.begin(), lx.end(), [&](double v) { return v == lx.front(); })) {
        rep.fit.slope = kInfinity;
        rep.fit.intercept = std::nan("");
        rep.fit.stderr_slope = std::nan("");
        rep.fit.points = lx.size();
      } else {
        rep.fit = ols_fit(lx, ly);
      }
      rep.final_vertices = tr.num_vertices();
      out.push_back(std::move(rep));
    }
  }
  return out;
}

std::vector<std::size_t> total_degrees(const std::vector<Edge>& edges) {
  std::vector<std::size_t> deg(vertex_span(edges), 0);
  for (const Edge& e : edges) {
    ++deg[e.sender];
    ++deg[e.recipient];
  }
  return deg;
}

std::vector<DegreeBin> log_binned_degrees(const std::vector<Edge>& edges) {
  const auto deg = total_degrees(edges);
  std::vector<DegreeBin> bins;
  std::size_t present = 0;
  for (auto d : deg) {
    if (d == 0) continue;
    ++present;
    std::size_t k = 0;
    while ((std::size_t{2} << k) <= d) ++k;
    if (bins.size() <= k) bins.resize(k + 1);
    ++bins[k].count;
  }
  for (std::size_t k = 0; k < bins.size(); ++k) {
    bins[k].lo = std::size_t{1} << k;
    bins[k].hi = std::size_t{2} << k;
    bins[k].density = present == 0 ? 0.0
                                   : static_cast<double>(bins[k].count) /
                                         (static_cast<double>(bins[k].lo) * present);
  }
  return bins;
}

}  // namespace dnnd::study
