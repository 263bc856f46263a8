#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cil/matrix.hpp"
#include "cil/reduce.hpp"

namespace cil::sampler {

using reduce::Embedding;

/// Hyper-parameters of diverse sample selection.
struct SamplerParams {
  std::size_t m = 1;      ///< exemplars to select
  int n = 0;              ///< neighbours required within the working radius
  double r0 = 0.5;        ///< initial radius
  double delta_r = 0.1;   ///< radius increment when no candidate qualifies
  int max_adapt = 1000;   ///< radius increments before n is decremented

  void validate() const;
  bool operator==(const SamplerParams&) const = default;
};

/// Row indices into the embedding, in selection order.
using Selection = std::vector<std::size_t>;

/// Rows j != i with |E[i] - E[j]| <= r.
std::size_t neighbor_count(const Matrix& points, std::size_t i, double r);
inline std::size_t neighbor_count(const Embedding& e, std::size_t i, double r) {
  return neighbor_count(e.points, i, r);
}

/// Row closest to the arithmetic mean; ties go to the lowest index.
std::size_t mean_closest_row(const Matrix& points);

struct DssOutcome {
  Selection selection;
  double final_radius = 0.0;
  int final_n = 0;
  /// Total radius increments made during the call.
  std::size_t adaptations = 0;
};

/// Outlier-robust farthest-point selection.
///
/// Seeds with the mean-closest row, then repeatedly takes the row farthest
/// from the current selection among those with at least `n` neighbours
/// within the working radius. When no row qualifies the radius grows by
/// `delta_r`; the radius persists across steps. After `max_adapt` increments
/// without success, `n` drops by one and the radius restarts at `r0`.
/// Ties in distance go to the lowest index.
DssOutcome dss_sample_traced(const Matrix& points, const SamplerParams& params);
Selection dss_sample(const Matrix& points, const SamplerParams& params);
inline Selection dss_sample(const Embedding& e, const SamplerParams& params) {
  return dss_sample(e.points, params);
}

/// Greedy farthest-point traversal seeded at the mean-closest row; a
/// 2-approximation of the m-center objective.
Selection gonzalez_sample(const Matrix& points, std::size_t m);
inline Selection gonzalez_sample(const Embedding& e, std::size_t m) {
  return gonzalez_sample(e.points, m);
}

/// Uniform sample of m of N indices without replacement.
Selection random_sample(std::size_t n, std::size_t m, std::uint64_t seed);

/// max over rows of the distance to the nearest selected row.
double covering_radius(const Matrix& points, const Selection& selection);

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> violations;

  explicit operator bool() const noexcept { return ok; }
};

/// Independent replay of the DSS selection rule. Checks the seed rule, then
/// re-derives the radius schedule by exhaustive scans and confirms that each
/// pick maximises the distance to the earlier picks among qualifying rows.
VerifyReport verify_dss(const Matrix& points, const SamplerParams& params,
                        const Selection& selection);
inline VerifyReport verify_dss(const Embedding& e, const SamplerParams& params,
                               const Selection& selection) {
  return verify_dss(e.points, params, selection);
}

/// floor(M / k) per class, remainder one each to the earliest-seen classes.
std::vector<std::size_t> allocate_quota(std::size_t budget,
                                        std::size_t classes_seen);

}  // namespace cil::sampler
