// Copyright 2026 The rrtrmm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Paired-trial comparison harness: every (scene, seed) is planned once per
// alpha, trials may run on worker threads, and records come back sorted by
// (object, alpha, seed) regardless of scheduling.

#ifndef RRTRMM_BENCHMARK_HPP
#define RRTRMM_BENCHMARK_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "rrtrmm/io.hpp"
#include "rrtrmm/planner.hpp"

namespace rrtrmm {

struct BenchmarkScene {
  std::string name;
  SurfaceIndex index;
  KinematicChain chain;
  Vec3 start;
  /// Trial i uses goals[i % goals.size()].
  std::vector<Vec3> goals;
  PlannerConfig config;
};

struct TrialRecord {
  std::string object;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double alpha = 0.0;
  double path_length = 0.0;
  double mean_w = 0.0;
  double min_w = 0.0;
  double c_manip = 0.0;
  double c_total = 0.0;
  std::size_t tree_size = 0;
  double runtime_ms = 0.0;
  bool succeeded = false;
  std::string failure_reason;
};

/// Called after every trial with the finished planner (tree still alive).
/// May run concurrently from worker threads.
using TrialObserver = std::function<void(const Planner&, const PlanResult&, const TrialRecord&)>;

inline TrialRecord make_record(const std::string& object, std::size_t trial, std::uint64_t seed,
                               double alpha, const PlanResult& r) {
  TrialRecord rec;
  rec.object = object;
  rec.trial = trial;
  rec.seed = seed;
  rec.alpha = alpha;
  rec.tree_size = r.tree_size;
  rec.succeeded = r.succeeded;
  rec.failure_reason = r.failure_reason;
  if (r.succeeded) {
    rec.path_length = r.path_length();
    rec.mean_w = r.mean_w();
    rec.min_w = r.min_w();
    rec.c_manip = r.cost.c_manip;
    rec.c_total = r.cost.c_total;
  }
  return rec;
}

inline bool record_less(const TrialRecord& a, const TrialRecord& b) {
  return std::tie(a.object, a.alpha, a.seed, a.trial) < std::tie(b.object, b.alpha, b.seed, b.trial);
}

inline std::vector<TrialRecord> run_benchmark(const std::vector<BenchmarkScene>& scenes,
                                              const std::vector<double>& alphas,
                                              const std::vector<std::uint64_t>& seeds,
                                              unsigned threads = 0,
                                              const TrialObserver& observer = {}) {
  struct Job {
    const BenchmarkScene* scene;
    std::size_t trial;
    std::uint64_t seed;
    double alpha;
  };
  std::vector<Job> jobs;
  for (const auto& scene : scenes) {
    if (scene.goals.empty()) throw std::invalid_argument("benchmark: scene '" + scene.name + "' has no goals");
    for (std::size_t t = 0; t < seeds.size(); ++t)
      for (double a : alphas) jobs.push_back({&scene, t, seeds[t], a});
  }
  std::vector<TrialRecord> records(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      PlannerConfig cfg = job.scene->config;
      cfg.alpha = job.alpha;
      cfg.rng_seed = job.seed;
      Planner planner(job.scene->index, job.scene->chain, cfg);
      const auto t0 = std::chrono::steady_clock::now();
      const PlanResult r = planner.plan(job.scene->start, job.scene->goals[job.trial % job.scene->goals.size()]);
      const auto t1 = std::chrono::steady_clock::now();
      records[i] = make_record(job.scene->name, job.trial, job.seed, job.alpha, r);
      records[i].runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      if (observer) observer(planner, r, records[i]);
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(jobs.size(), 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::stable_sort(records.begin(), records.end(), record_less);
  return records;
}

/// Linear-interpolation quantile of sorted data (the "type 7" rule).
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct Quartiles {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

inline Quartiles quartiles(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return {quantile_sorted(v, 0.0), quantile_sorted(v, 0.25), quantile_sorted(v, 0.5),
          quantile_sorted(v, 0.75), quantile_sorted(v, 1.0)};
}

struct AggregateGroup {
  std::string object;
  double alpha = 0.0;
  std::size_t trials = 0;
  std::size_t succeeded = 0;
  Quartiles path_length, mean_w, min_w, c_manip, c_total;
};

/// Quartiles per (object, alpha) over succeeded trials.
inline std::vector<AggregateGroup> aggregate(const std::vector<TrialRecord>& records) {
  std::map<std::pair<std::string, double>, std::vector<const TrialRecord*>> groups;
  for (const auto& r : records) groups[{r.object, r.alpha}].push_back(&r);
  std::vector<AggregateGroup> out;
  for (const auto& [key, recs] : groups) {
    AggregateGroup g;
    g.object = key.first;
    g.alpha = key.second;
    g.trials = recs.size();
    std::vector<double> len, mw, minw, cm, ct;
    for (const auto* r : recs) {
      if (!r->succeeded) continue;
      ++g.succeeded;
      len.push_back(r->path_length);
      mw.push_back(r->mean_w);
      minw.push_back(r->min_w);
      cm.push_back(r->c_manip);
      ct.push_back(r->c_total);
    }
    g.path_length = quartiles(len);
    g.mean_w = quartiles(mw);
    g.min_w = quartiles(minw);
    g.c_manip = quartiles(cm);
    g.c_total = quartiles(ct);
    out.push_back(std::move(g));
  }
  return out;
}

inline constexpr const char* kBenchmarkCsvHeader =
    "object,trial,seed,alpha,path_length,mean_w,min_w,c_manip,c_total,tree_size,succeeded";

/// Deterministic record table; wall-clock timings go to a separate file.
inline std::string format_benchmark_csv(const std::vector<TrialRecord>& records) {
  std::ostringstream out;
  out << kBenchmarkCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.object << ',' << r.trial << ',' << r.seed << ',' << csv_number(r.alpha) << ',';
    if (r.succeeded) {
      out << csv_number(r.path_length) << ',' << csv_number(r.mean_w) << ',' << csv_number(r.min_w)
          << ',' << csv_number(r.c_manip) << ',' << csv_number(r.c_total);
    } else {
      out << ",,,,";
    }
    out << ',' << r.tree_size << ',' << (r.succeeded ? "true" : "false") << '\n';
  }
  return out.str();
}

inline std::string format_timing_csv(const std::vector<TrialRecord>& records) {
  std::ostringstream out;
  out << "object,trial,seed,alpha,runtime_ms\n";
  for (const auto& r : records)
    out << r.object << ',' << r.trial << ',' << r.seed << ',' << csv_number(r.alpha) << ','
        << csv_number(r.runtime_ms) << '\n';
  return out.str();
}

}  // namespace rrtrmm

#endif  // RRTRMM_BENCHMARK_HPP
