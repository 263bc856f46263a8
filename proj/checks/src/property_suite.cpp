#include "cil/property_suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>

#include "cil/blobs.hpp"
#include "cil/losses.hpp"
#include "cil/oracles.hpp"
#include "cil/random.hpp"
#include "cil/sampler.hpp"
#include "cil/stream.hpp"
#include "cil/trainer.hpp"

namespace cil::checks {

namespace {

using Clock = std::chrono::steady_clock;

CheckResult timed(std::string name, double limit,
                  const std::function<bool(std::string&)>& body) {
  CheckResult r;
  r.name = std::move(name);
  r.time_limit = limit;
  const auto start = Clock::now();
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
    ok = false;
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  if (ok && limit > 0.0 && r.seconds > limit) {
    ok = false;
    detail += " (exceeded time limit)";
  }
  r.passed = ok;
  r.detail = std::move(detail);
  return r;
}

std::string str(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

learner::MlpModel random_model(std::size_t input, std::size_t outputs, Rng& rng) {
  std::uniform_int_distribution<int> depth(0, 2);
  std::uniform_int_distribution<std::size_t> width(2, 6);
  std::vector<std::size_t> hidden(static_cast<std::size_t>(depth(rng)));
  for (auto& h : hidden) h = width(rng);
  learner::MlpModel m(input, hidden, outputs, rng());
  // Non-zero biases so the rectifiers are not all aligned at the origin.
  std::normal_distribution<double> noise(0.0, 0.3);
  for (auto& l : m.layers()) {
    for (auto& b : l.bias) b = noise(rng);
  }
  return m;
}

}  // namespace

CheckResult check_filter_off_equivalence(std::uint64_t seed) {
  return timed("filter-off equivalence (n=0 DSS == Gonzalez)", 10.0, [&](std::string& d) {
    Rng rng(derive_seed(seed, "filter-off"));
    std::uniform_int_distribution<std::size_t> rows(1, 200);
    std::uniform_int_distribution<std::size_t> picks(1, 20);
    int mismatches = 0;
    for (int k = 0; k < 100; ++k) {
      const auto pts = oracle::uniform_points(rows(rng), 2, 10.0, rng());
      sampler::SamplerParams p;
      p.m = picks(rng);
      p.n = 0;
      if (sampler::dss_sample(pts, p) != sampler::gonzalez_sample(pts, p.m)) ++mismatches;
    }
    d = "100 instances, " + std::to_string(mismatches) + " mismatches";
    return mismatches == 0;
  });
}

CheckResult check_two_approximation(std::uint64_t seed) {
  return timed("Gonzalez 2-approximation vs exhaustive optimum", 30.0, [&](std::string& d) {
    Rng rng(derive_seed(seed, "two-approx"));
    std::uniform_int_distribution<std::size_t> rows(1, 12);
    std::uniform_int_distribution<std::size_t> picks(1, 3);
    int violations = 0;
    double worst_ratio = 0.0;
    for (int k = 0; k < 200; ++k) {
      const auto pts = oracle::uniform_points(rows(rng), 2, 10.0, rng());
      const std::size_t m = picks(rng);
      const auto sel = sampler::gonzalez_sample(pts, m);
      const double got = oracle::covering_radius(pts, sel);
      const double best = oracle::optimal_center_radius(pts, m);
      if (got > 2.0 * best) ++violations;
      if (best > 0.0) worst_ratio = std::max(worst_ratio, got / best);
    }
    d = "200 instances, worst ratio " + str(worst_ratio) + ", " +
        std::to_string(violations) + " violations";
    return violations == 0;
  });
}

CheckResult check_outlier_exclusion(std::uint64_t seed) {
  return timed("DSS excludes planted outliers", 10.0, [&](std::string& d) {
    Rng rng(derive_seed(seed, "outliers"));
    std::uniform_int_distribution<std::size_t> cluster_size(20, 80);
    std::uniform_int_distribution<std::size_t> outliers(1, 6);
    std::uniform_int_distribution<std::size_t> picks(2, 15);
    const double spread = 0.1;  // gap of at least 1.0, twice r0
    std::size_t selected_outliers = 0;
    for (int k = 0; k < 50; ++k) {
      const auto inst = oracle::planted_outliers(cluster_size(rng), outliers(rng), spread,
                                                 10.0 + 5.0 * (k % 3), rng());
      sampler::SamplerParams p;
      p.m = picks(rng);
      p.n = k % 2 == 0 ? 1 : 3;
      p.r0 = 0.5;
      const auto sel = sampler::dss_sample(inst.points, p);
      for (auto s : sel) {
        if (std::find(inst.outliers.begin(), inst.outliers.end(), s) != inst.outliers.end()) {
          ++selected_outliers;
        }
      }
    }
    d = "50 instances, " + std::to_string(selected_outliers) + " outliers selected";
    return selected_outliers == 0;
  });
}

CheckResult check_oracle_round_trip(std::uint64_t seed) {
  return timed("verify_dss accepts dss_sample output", 60.0, [&](std::string& d) {
    Rng rng(derive_seed(seed, "round-trip"));
    std::uniform_int_distribution<std::size_t> rows(1, 200);
    std::uniform_int_distribution<std::size_t> picks(1, 20);
    std::uniform_int_distribution<int> need(0, 6);
    std::uniform_real_distribution<double> radius(0.02, 1.0);
    std::uniform_int_distribution<int> budget(1, 8);
    int failures = 0;
    int adapted = 0;
    int decremented = 0;
    std::string first;
    for (int k = 0; k < 1000; ++k) {
      const auto pts = oracle::uniform_points(rows(rng), 2, 10.0, rng());
      sampler::SamplerParams p;
      p.m = picks(rng);
      p.n = need(rng);
      p.r0 = radius(rng);
      p.delta_r = 0.1;
      // A quarter of the instances use a tiny adaptation budget so the
      // n-decrement path is exercised too.
      p.max_adapt = k % 4 == 0 ? budget(rng) : 1000;
      const auto out = sampler::dss_sample_traced(pts, p);
      if (out.adaptations > 0) ++adapted;
      if (out.final_n < p.n) ++decremented;
      const auto report = sampler::verify_dss(pts, p, out.selection);
      if (!report.ok) {
        if (failures == 0) first = report.violations.front();
        ++failures;
      }
    }
    d = "1000 instances (" + std::to_string(adapted) + " adapted r, " +
        std::to_string(decremented) + " decremented n), " + std::to_string(failures) +
        " rejected" + (first.empty() ? "" : ": " + first);
    return failures == 0 && adapted >= 100 && decremented >= 10;
  });
}

CheckResult check_gradients(std::uint64_t seed) {
  return timed("analytic gradients match central differences (CE, KD, CD)", 30.0,
               [&](std::string& d) {
    Rng rng(derive_seed(seed, "gradients"));
    std::uniform_int_distribution<std::size_t> in_width(2, 5);
    std::uniform_int_distribution<std::size_t> classes(2, 5);
    std::uniform_int_distribution<std::size_t> batch_size(3, 10);
    std::normal_distribution<double> feature(0.0, 1.0);
    double worst[3] = {0.0, 0.0, 0.0};
    const char* names[3] = {"CE", "KD", "CD"};

    for (int k = 0; k < 20; ++k) {
      const std::size_t input = in_width(rng);
      const std::size_t total = classes(rng);
      std::uniform_int_distribution<std::size_t> old_count(1, total - 1);
      const std::size_t old = old_count(rng);
      learner::MlpModel student = random_model(input, total, rng);
      learner::TeacherSnapshot teacher{random_model(input, old, rng), old};

      std::vector<LabeledExample> batch(batch_size(rng));
      std::uniform_int_distribution<int> label(0, static_cast<int>(total) - 1);
      for (auto& ex : batch) {
        ex.features.resize(input);
        for (auto& v : ex.features) v = feature(rng);
        ex.label = label(rng);
      }

      for (int variant = 0; variant < 3; ++variant) {
        learner::LossConfig cfg;
        cfg.temperature = 2.0;
        cfg.beta = variant == 1 ? 1.0 : 0.5;
        const learner::TeacherSnapshot* t = variant == 0 ? nullptr : &teacher;
        const auto analytic = learner::batch_loss(student, batch, t, cfg).gradients.flatten();
        learner::MlpModel probe = student;
        const auto numeric = oracle::central_difference(
            [&](std::span<const double> params) {
              probe.set_parameters(params);
              return learner::batch_loss(probe, batch, t, cfg).mean_loss;
            },
            student.parameters(), 1e-6);
        worst[variant] = std::max(worst[variant], oracle::max_relative_error(analytic, numeric));
      }
    }
    d = "20 models; worst relative error";
    bool ok = true;
    for (int v = 0; v < 3; ++v) {
      d += std::string(" ") + names[v] + "=" + str(worst[v]);
      ok = ok && worst[v] < 1e-4;
    }
    return ok;
  });
}

CheckResult check_kd_lower_bound(std::uint64_t seed) {
  return timed("KD loss >= teacher distilled entropy", 5.0, [&](std::string& d) {
    Rng rng(derive_seed(seed, "kd-bound"));
    std::uniform_int_distribution<std::size_t> old_count(1, 6);
    std::uniform_int_distribution<std::size_t> new_count(0, 4);
    std::normal_distribution<double> logit(0.0, 3.0);
    const double T = 2.0;
    int below = 0;
    double worst_equal_gap = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const std::size_t old = old_count(rng);
      std::vector<double> teacher(old);
      std::vector<double> student(old + new_count(rng));
      for (auto& v : teacher) v = logit(rng);
      for (auto& v : student) v = logit(rng);
      const double h = learner::entropy(learner::distilled_softmax(teacher, T, old));
      if (learner::kd_loss(teacher, student, T) < h - 1e-12) ++below;
      std::copy(teacher.begin(), teacher.end(), student.begin());
      worst_equal_gap =
          std::max(worst_equal_gap, std::abs(learner::kd_loss(teacher, student, T) - h));
    }
    d = "1000 pairs, " + std::to_string(below) + " below bound, equality gap " +
        str(worst_equal_gap);
    return below == 0 && worst_equal_gap <= 1e-9;
  });
}

CheckResult check_first_task_rule(std::uint64_t seed) {
  return timed("first task trains on cross-entropy only", 0.0, [&](std::string& d) {
    const Dataset ds = make_blobs(3, 30, 4, 1.0, 0.1, derive_seed(seed, "first-task"));
    learner::MlpModel model(ds.dim, {16, 8}, 3, derive_seed(seed, "first-task-model"));
    learner::TrainConfig tc;
    tc.epochs = 15;
    tc.batch_size = 16;
    tc.learning_rate = 0.05;
    tc.momentum = 0.5;
    tc.seed = derive_seed(seed, "first-task-train");
    learner::LossConfig with_beta;
    with_beta.beta = 0.5;
    learner::LossConfig ce_only;
    ce_only.beta = 0.0;
    const auto a = learner::train_task(model, ds.train, nullptr, with_beta, tc);
    const auto b = learner::train_task(model, ds.train, nullptr, ce_only, tc);
    const bool same = a.loss_trace == b.loss_trace && a.model == b.model;
    d = std::to_string(a.loss_trace.size()) + " epochs, traces " +
        (same ? "bitwise equal" : "differ");
    return same;
  });
}

CheckResult check_stream_composition(std::uint64_t seed) {
  return timed("fuzzy10 90/10 composition and disjoint partition", 5.0, [&](std::string& d) {
    struct Case {
      int classes;
      int per_class;
      int q;
    };
    const Case cases[] = {{10, 50, 2}, {20, 37, 5}, {6, 101, 3}, {100, 20, 10}};
    int bad = 0;
    std::size_t tasks_checked = 0;
    for (const auto& c : cases) {
      const Dataset ds = make_blobs(c.classes, c.per_class, 2, 1.0, 0.0,
                                    derive_seed(seed, static_cast<std::uint64_t>(c.classes)));
      stream::StreamSpec fuzzy;
      fuzzy.mode = stream::Mode::fuzzy;
      fuzzy.classes_per_task = c.q;
      fuzzy.fuzz_percent = 10;
      fuzzy.seed = derive_seed(seed, "fuzzy");
      const auto tasks = stream::make_fuzzy_stream(ds, fuzzy);
      std::set<std::size_t> used;
      bool warned = false;
      for (const auto& t : tasks) {
        ++tasks_checked;
        warned = warned || !t.warnings.empty();
        const auto minor = t.minor_count();
        if (minor != static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(t.size())))) {
          ++bad;
        }
        for (auto i : t.example_indices) {
          if (!used.insert(i).second && !warned) ++bad;
        }
      }
      stream::StreamSpec disjoint;
      disjoint.classes_per_task = c.q;
      disjoint.seed = fuzzy.seed;
      const auto parts = stream::make_disjoint_stream(ds, disjoint);
      std::set<int> all;
      for (const auto& t : parts) {
        for (int cls : t.major_classes) {
          if (!all.insert(cls).second) ++bad;
        }
        if (t.minor_count() != 0) ++bad;
      }
      if (all.size() != static_cast<std::size_t>(c.classes)) ++bad;
    }
    d = std::to_string(tasks_checked) + " fuzzy tasks, " + std::to_string(bad) + " violations";
    return bad == 0;
  });
}

CheckResult check_monotone_coverage(std::uint64_t seed) {
  return timed("covering radius non-increasing in m", 10.0, [&](std::string& d) {
    Rng rng(derive_seed(seed, "monotone"));
    std::uniform_int_distribution<std::size_t> rows(2, 120);
    int bad = 0;
    for (int k = 0; k < 50; ++k) {
      const auto pts = oracle::uniform_points(rows(rng), 2, 10.0, rng());
      sampler::SamplerParams p;
      p.n = k % 4;
      double prev_dss = std::numeric_limits<double>::infinity();
      double prev_gon = prev_dss;
      for (std::size_t m = 1; m <= 15; ++m) {
        p.m = m;
        const double dss = oracle::covering_radius(pts, sampler::dss_sample(pts, p));
        const double gon = oracle::covering_radius(pts, sampler::gonzalez_sample(pts, m));
        if (dss > prev_dss || gon > prev_gon) ++bad;
        prev_dss = dss;
        prev_gon = gon;
      }
    }
    d = "50 instances x 15 budgets, " + std::to_string(bad) + " increases";
    return bad == 0;
  });
}

std::vector<CheckResult> run_property_suite(std::uint64_t seed) {
  return {check_filter_off_equivalence(seed), check_two_approximation(seed),
          check_outlier_exclusion(seed),      check_oracle_round_trip(seed),
          check_gradients(seed),              check_kd_lower_bound(seed),
          check_first_task_rule(seed),        check_stream_composition(seed),
          check_monotone_coverage(seed)};
}

std::string format(const CheckResult& r) {
  char time[32];
  std::snprintf(time, sizeof time, "%.2f s", r.seconds);
  return std::string(r.passed ? "PASS " : "FAIL ") + r.name + " (" + time + ") " + r.detail;
}

}  // namespace cil::checks
