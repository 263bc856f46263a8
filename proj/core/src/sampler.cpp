#include "cil/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "cil/error.hpp"
#include "cil/random.hpp"

namespace cil::sampler {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_points(const Matrix& points) {
  if (points.rows == 0) throw ConfigError("cannot sample from an empty embedding");
  if (!points.all_finite()) throw DataError("embedding has non-finite entries");
}

// Distance from row i to its n-th nearest other row. A row has at least n
// neighbours within r exactly when this value is <= r.
std::vector<double> nth_neighbor_distance(const Matrix& points, int n) {
  const std::size_t rows = points.rows;
  std::vector<double> out(rows);
  if (n <= 0) {
    std::fill(out.begin(), out.end(), -kInf);
    return out;
  }
  if (static_cast<std::size_t>(n) > rows - 1) {
    std::fill(out.begin(), out.end(), kInf);
    return out;
  }
  std::vector<double> dist;
  dist.reserve(rows - 1);
  for (std::size_t i = 0; i < rows; ++i) {
    dist.clear();
    for (std::size_t j = 0; j < rows; ++j) {
      if (j != i) dist.push_back(distance(points.row(i), points.row(j)));
    }
    const auto nth = dist.begin() + (n - 1);
    std::nth_element(dist.begin(), nth, dist.end());
    out[i] = *nth;
  }
  return out;
}

void relax(const Matrix& points, std::size_t picked, std::vector<double>& d_p) {
  for (std::size_t x = 0; x < points.rows; ++x) {
    d_p[x] = std::min(d_p[x], distance(points.row(x), points.row(picked)));
  }
}

}  // namespace

void SamplerParams::validate() const {
  if (m < 1) throw ConfigError("sampler m must be >= 1");
  if (n < 0) throw ConfigError("sampler n must be >= 0");
  if (!(r0 > 0.0) || !std::isfinite(r0)) throw ConfigError("sampler r0 must be > 0");
  if (!(delta_r > 0.0) || !std::isfinite(delta_r)) {
    throw ConfigError("sampler delta_r must be > 0");
  }
  if (max_adapt < 1) throw ConfigError("sampler max_adapt must be >= 1");
}

std::size_t neighbor_count(const Matrix& points, std::size_t i, double r) {
  std::size_t count = 0;
  for (std::size_t j = 0; j < points.rows; ++j) {
    if (j != i && distance(points.row(i), points.row(j)) <= r) ++count;
  }
  return count;
}

std::size_t mean_closest_row(const Matrix& points) {
  std::vector<double> mean(points.cols, 0.0);
  for (std::size_t i = 0; i < points.rows; ++i) {
    for (std::size_t k = 0; k < points.cols; ++k) mean[k] += points(i, k);
  }
  for (auto& v : mean) v /= static_cast<double>(points.rows);
  std::size_t best = 0;
  double best_d = kInf;
  for (std::size_t i = 0; i < points.rows; ++i) {
    const double d = squared_distance(points.row(i), mean);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

DssOutcome dss_sample_traced(const Matrix& points, const SamplerParams& params) {
  params.validate();
  check_points(points);
  const std::size_t rows = points.rows;
  const std::size_t target = std::min(params.m, rows);

  DssOutcome out;
  std::vector<bool> taken(rows, false);
  std::vector<double> d_p(rows, kInf);
  const std::size_t seed = mean_closest_row(points);
  out.selection.push_back(seed);
  taken[seed] = true;
  relax(points, seed, d_p);

  int n = params.n;
  double r = params.r0;
  int bumps = 0;
  std::vector<double> reach = nth_neighbor_distance(points, n);

  while (out.selection.size() < target) {
    std::size_t best = rows;
    double min_reach = kInf;
    for (std::size_t x = 0; x < rows; ++x) {
      if (taken[x]) continue;
      min_reach = std::min(min_reach, reach[x]);
      if (reach[x] <= r && (best == rows || d_p[x] > d_p[best])) best = x;
    }
    if (best != rows) {
      out.selection.push_back(best);
      taken[best] = true;
      relax(points, best, d_p);
      continue;
    }
    // Nothing qualifies: grow the radius until something does or the
    // adaptation budget runs out, then relax the neighbour requirement.
    while (bumps < params.max_adapt && !(min_reach <= r)) {
      r += params.delta_r;
      ++bumps;
      ++out.adaptations;
    }
    if (!(min_reach <= r)) {
      n = std::max(n - 1, 0);
      r = params.r0;
      bumps = 0;
      reach = nth_neighbor_distance(points, n);
    }
  }
  out.final_radius = r;
  out.final_n = n;
  return out;
}

Selection dss_sample(const Matrix& points, const SamplerParams& params) {
  return dss_sample_traced(points, params).selection;
}

Selection gonzalez_sample(const Matrix& points, std::size_t m) {
  if (m < 1) throw ConfigError("sampler m must be >= 1");
  check_points(points);
  const std::size_t target = std::min(m, points.rows);
  Selection sel{mean_closest_row(points)};
  std::vector<bool> taken(points.rows, false);
  taken[sel.front()] = true;
  std::vector<double> d_p(points.rows, kInf);
  relax(points, sel.front(), d_p);
  while (sel.size() < target) {
    std::size_t far = points.rows;
    for (std::size_t x = 0; x < points.rows; ++x) {
      if (!taken[x] && (far == points.rows || d_p[x] > d_p[far])) far = x;
    }
    sel.push_back(far);
    taken[far] = true;
    relax(points, far, d_p);
  }
  return sel;
}

Selection random_sample(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (m < 1) throw ConfigError("sampler m must be >= 1");
  if (m > n) {
    throw ConfigError("cannot draw " + std::to_string(m) + " of " +
                      std::to_string(n) + " without replacement");
  }
  Selection pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t k = 0; k < m; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, n - 1);
    std::swap(pool[k], pool[pick(rng)]);
  }
  pool.resize(m);
  return pool;
}

double covering_radius(const Matrix& points, const Selection& selection) {
  if (selection.empty()) return kInf;
  double worst = 0.0;
  for (std::size_t x = 0; x < points.rows; ++x) {
    double nearest = kInf;
    for (auto s : selection) {
      nearest = std::min(nearest, distance(points.row(x), points.row(s)));
    }
    worst = std::max(worst, nearest);
  }
  return worst;
}

std::vector<std::size_t> allocate_quota(std::size_t budget,
                                        std::size_t classes_seen) {
  if (classes_seen < 1) throw ConfigError("quota needs at least one class");
  if (budget < classes_seen) {
    throw ConfigError("memory budget " + std::to_string(budget) +
                      " cannot hold one exemplar for each of " +
                      std::to_string(classes_seen) + " classes");
  }
  std::vector<std::size_t> quota(classes_seen, budget / classes_seen);
  for (std::size_t k = 0; k < budget % classes_seen; ++k) ++quota[k];
  return quota;
}

}  // namespace cil::sampler
