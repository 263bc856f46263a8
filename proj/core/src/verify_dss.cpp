// Deliberately self-contained: nothing here calls into the selection code it
// checks, so a bug there cannot hide itself.

#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "cil/sampler.hpp"

namespace cil::sampler {

namespace {

double euclid(const Matrix& pts, std::size_t a, std::size_t b) {
  double s = 0.0;
  for (std::size_t k = 0; k < pts.cols; ++k) {
    const double d = pts(a, k) - pts(b, k);
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

VerifyReport verify_dss(const Matrix& points, const SamplerParams& params,
                        const Selection& selection) {
  VerifyReport report;
  auto fail = [&](std::string why) {
    report.ok = false;
    report.violations.push_back(std::move(why));
  };
  const std::size_t rows = points.rows;
  if (selection.empty()) {
    fail("selection is empty");
    return report;
  }
  if (rows == 0) {
    fail("embedding is empty");
    return report;
  }
  const std::size_t expected = params.m < rows ? params.m : rows;
  if (selection.size() != expected) {
    fail("selection has " + std::to_string(selection.size()) +
         " rows, expected " + std::to_string(expected));
  }
  std::set<std::size_t> unique;
  for (auto s : selection) {
    if (s >= rows) {
      fail("index " + std::to_string(s) + " out of range");
      return report;
    }
    if (!unique.insert(s).second) fail("index " + std::to_string(s) + " repeated");
  }
  if (!report.ok) return report;

  // Seed rule.
  std::vector<double> centroid(points.cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < points.cols; ++k) centroid[k] += points(i, k);
  }
  for (auto& c : centroid) c /= static_cast<double>(rows);
  std::vector<double> to_centroid(rows, 0.0);
  double closest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < points.cols; ++k) {
      const double d = points(i, k) - centroid[k];
      to_centroid[i] += d * d;
    }
    if (to_centroid[i] < closest) closest = to_centroid[i];
  }
  if (to_centroid[selection[0]] != closest) {
    fail("first pick " + std::to_string(selection[0]) +
         " is not closest to the mean");
  }

  // Full distance table, then replay the radius schedule step by step.
  std::vector<std::vector<double>> dist(rows, std::vector<double>(rows, 0.0));
  for (std::size_t a = 0; a < rows; ++a) {
    for (std::size_t b = 0; b < rows; ++b) dist[a][b] = euclid(points, a, b);
  }
  std::vector<bool> chosen(rows, false);
  chosen[selection[0]] = true;
  double radius = params.r0;
  int need = params.n;
  int bumps = 0;

  for (std::size_t step = 1; step < selection.size(); ++step) {
    std::vector<std::size_t> qualifying;
    for (;;) {
      qualifying.clear();
      for (std::size_t x = 0; x < rows; ++x) {
        if (chosen[x]) continue;
        int within = 0;
        for (std::size_t y = 0; y < rows; ++y) {
          if (y != x && dist[x][y] <= radius) ++within;
        }
        if (within >= need) qualifying.push_back(x);
      }
      if (!qualifying.empty()) break;
      if (bumps < params.max_adapt) {
        radius += params.delta_r;
        ++bumps;
      } else {
        need = need > 0 ? need - 1 : 0;
        radius = params.r0;
        bumps = 0;
      }
    }

    auto gap = [&](std::size_t x) {
      double g = std::numeric_limits<double>::infinity();
      for (std::size_t y = 0; y < rows; ++y) {
        if (chosen[y] && dist[x][y] < g) g = dist[x][y];
      }
      return g;
    };
    double best = -1.0;
    for (auto x : qualifying) {
      const double g = gap(x);
      if (g > best) best = g;
    }
    const std::size_t pick = selection[step];
    bool pick_qualifies = false;
    for (auto x : qualifying) pick_qualifies = pick_qualifies || x == pick;
    if (!pick_qualifies) {
      fail("step " + std::to_string(step) + ": row " + std::to_string(pick) +
           " lacks " + std::to_string(need) + " neighbours within r=" +
           std::to_string(radius));
    } else if (gap(pick) != best) {
      fail("step " + std::to_string(step) + ": row " + std::to_string(pick) +
           " is not the farthest qualifying row");
    }
    chosen[pick] = true;
  }
  return report;
}

}  // namespace cil::sampler
