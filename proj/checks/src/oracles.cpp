#include "cil/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace cil::oracle {

namespace {

double dist(const Matrix& p, std::size_t a, std::size_t b) {
  double s = 0.0;
  for (std::size_t k = 0; k < p.cols; ++k) {
    const double d = p(a, k) - p(b, k);
    s += d * d;
  }
  return std::sqrt(s);
}

void enumerate(const Matrix& points, std::size_t m, std::size_t start,
               std::vector<std::size_t>& chosen, double& best) {
  if (chosen.size() == m) {
    best = std::min(best, covering_radius(points, chosen));
    return;
  }
  for (std::size_t i = start; i < points.rows; ++i) {
    chosen.push_back(i);
    enumerate(points, m, i + 1, chosen, best);
    chosen.pop_back();
  }
}

}  // namespace

double covering_radius(const Matrix& points, std::span<const std::size_t> centers) {
  double worst = 0.0;
  for (std::size_t x = 0; x < points.rows; ++x) {
    double nearest = std::numeric_limits<double>::infinity();
    for (auto c : centers) nearest = std::min(nearest, dist(points, x, c));
    worst = std::max(worst, nearest);
  }
  return worst;
}

double optimal_center_radius(const Matrix& points, std::size_t m) {
  if (m >= points.rows) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> chosen;
  enumerate(points, m, 0, chosen, best);
  return best;
}

std::vector<double> central_difference(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, double h) {
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + h;
    const double up = f(probe);
    probe[i] = saved - h;
    const double down = f(probe);
    probe[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

double relative_error(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

double max_relative_error(std::span<const double> a, std::span<const double> b,
                          double floor) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, relative_error(a[i], b[i], floor));
  }
  return worst;
}

Matrix uniform_points(std::size_t rows, std::size_t dim, double scale,
                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, scale);
  Matrix m(rows, dim);
  for (auto& v : m.data) v = u(rng);
  return m;
}

PlantedOutliers planted_outliers(std::size_t per_cluster, std::size_t num_outliers,
                                 double spread, double gap_spreads, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double gap = gap_spreads * spread;
  std::normal_distribution<double> noise(0.0, spread);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> ring(gap, 2.0 * gap);

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < per_cluster; ++i) rows.push_back({noise(rng), noise(rng)});

  PlantedOutliers out;
  for (int attempt = 0; out.outliers.size() < num_outliers; ++attempt) {
    if (attempt > 100000) throw std::runtime_error("planted_outliers: ring too crowded");
    const double a = angle(rng);
    const double rad = ring(rng);
    const std::vector<double> cand{rad * std::cos(a), rad * std::sin(a)};
    bool isolated = true;
    for (const auto& r : rows) {
      const double dx = r[0] - cand[0];
      const double dy = r[1] - cand[1];
      if (std::sqrt(dx * dx + dy * dy) < gap) {
        isolated = false;
        break;
      }
    }
    if (!isolated) continue;
    out.outliers.push_back(rows.size());
    rows.push_back(cand);
  }

  // Interleave so outliers do not sit at the end of the index range.
  std::vector<std::size_t> perm(rows.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::size_t> where_now(rows.size());
  std::vector<std::vector<double>> shuffled(rows.size());
  for (std::size_t k = 0; k < perm.size(); ++k) {
    shuffled[k] = rows[perm[k]];
    where_now[perm[k]] = k;
  }
  for (auto& o : out.outliers) o = where_now[o];
  out.points = Matrix::from_rows(shuffled);
  return out;
}

}  // namespace cil::oracle
