#pragma once

// Reference computations used to check the library. They are brute force on
// purpose and share no code with the routines they validate.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cil/matrix.hpp"

namespace cil::oracle {

/// Optimal m-center covering radius by enumerating every m-subset of rows.
double optimal_center_radius(const Matrix& points, std::size_t m);

/// Covering radius of `centers`, computed directly.
double covering_radius(const Matrix& points, std::span<const std::size_t> centers);

/// Central differences of `f` at `x` with step h, one coordinate at a time.
std::vector<double> central_difference(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, double h);

/// |a - b| / max(|a|, |b|, floor)
double relative_error(double a, double b, double floor = 1e-6);

/// Largest entrywise relative error between two vectors.
double max_relative_error(std::span<const double> a, std::span<const double> b,
                          double floor = 1e-6);

/// Uniform points in [0, scale]^dim.
Matrix uniform_points(std::size_t rows, std::size_t dim, double scale,
                      std::uint64_t seed);

/// One Gaussian cluster (stdev `spread`, centered at the origin) plus
/// isolated points on a ring between `gap_spreads` and 2 * `gap_spreads`
/// spreads out, each at least `gap_spreads * spread` from every cluster point
/// and from each other. Returns the matrix and the indices of the outliers.
struct PlantedOutliers {
  Matrix points;
  std::vector<std::size_t> outliers;
};
PlantedOutliers planted_outliers(std::size_t per_cluster, std::size_t num_outliers,
                                 double spread, double gap_spreads, std::uint64_t seed);

}  // namespace cil::oracle
