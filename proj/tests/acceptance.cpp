// Copyright 2026 The ACAV Authors
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

// Acceptance suite: one PASS/FAIL line per criterion.
//
// Usage: acav_acceptance <path-to-acav-cli> <golden-dir> <scratch-dir>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "acav/acav.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace acav;

namespace
{

struct Outcome
{
  bool pass{false};
  std::string summary;
};

std::string fmt(const char * f, double a)
{
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

// ---- 1 -------------------------------------------------------------------

Outcome voting_truth_table()
{
  const VotingWeights w{1.0, 1.0, 2.0};
  int mismatches = 0;
  for (int m = 0; m < 8; ++m) {
    const VoteTuple v{(m & 1) != 0, (m & 2) != 0, (m & 4) != 0};
    if (vote(v, w) != oracle::eq1_vote(v, w)) {
      ++mismatches;
    }
  }
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> wd(0.0, 10.0);
  std::uniform_real_distribution<double> kd(0.01, 100.0);
  int scale_fail = 0;
  int mono_fail = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    VotingWeights rw{wd(rng), wd(rng), wd(rng)};
    const double k = trial % 2 == 0 ? kd(rng) : std::ldexp(1.0, static_cast<int>(trial % 20) - 10);
    const VotingWeights sw{k * rw.w_map, k * rw.w_perc, k * rw.w_pln};
    for (int m = 0; m < 8; ++m) {
      const VoteTuple v{(m & 1) != 0, (m & 2) != 0, (m & 4) != 0};
      if (vote(v, rw) != vote(v, sw)) {
        ++scale_fail;
      }
      for (int extra = 0; extra < 8; ++extra) {
        const int m2 = m | extra;
        const VoteTuple v2{(m2 & 1) != 0, (m2 & 2) != 0, (m2 & 4) != 0};
        if (vote(v, rw) && !vote(v2, rw)) {
          ++mono_fail;
        }
      }
    }
  }
  return {mismatches == 0 && scale_fail == 0 && mono_fail == 0,
          "truth-table mismatches " + std::to_string(mismatches) + ", scale failures " +
            std::to_string(scale_fail) + ", monotonicity failures " + std::to_string(mono_fail)};
}

// ---- 2 -------------------------------------------------------------------

Outcome segmenting_oracle()
{
  std::mt19937_64 rng(202);
  int mismatches = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto vectors = oracle::random_vectors(rng, 1 + rng() % 200);
    SimplifierConfig cfg;
    if (trial % 2 == 1) {
      std::uniform_real_distribution<double> wd(0.0, 3.0);
      cfg.weights = {wd(rng), wd(rng), wd(rng) + 0.01};
      const double choices[] = {0.0, 0.25, 0.5, 0.8, 1.0};
      cfg.th_m = choices[rng() % 5];
    }
    const auto segs = segment_recording(vectors, cfg);
    const auto kept = prune_segments(segs, vectors, cfg);
    const auto lit = oracle::algorithm1(vectors, cfg.weights, cfg.th_m);
    bool same = segs.size() == lit.segments.size();
    for (std::size_t k = 0; same && k < segs.size(); ++k) {
      same = segs[k].start + 1 == lit.segments[k].first && segs[k].end + 1 == lit.segments[k].second;
    }
    same = same && kept.start + 1 == lit.kept.first && kept.end + 1 == lit.kept.second;
    if (!same) {
      ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(500 - mismatches) + "/500 sequences match"};
}

// ---- 3 -------------------------------------------------------------------

std::vector<LabeledRecording> simplification_corpus()
{
  std::vector<LabeledRecording> out;
  auto add = [&](std::vector<LabeledRecording> v) {
    for (auto & r : v) {
      out.push_back(std::move(r));
    }
  };
  add(fault_corpus(Archetype::intersection, FaultKind::f7_overtake_all, 10, 0));
  add(fault_corpus(Archetype::intersection, FaultKind::f8_high_speed_near, 10, 100));
  add(fault_corpus(Archetype::merging, FaultKind::f1_ignore_all_priority, 20, 0));
  add(fault_corpus(Archetype::tailgating, FaultKind::f2_wrong_traj_model, 20, 0));
  return out;
}

Outcome simplification_corpus_check()
{
  const auto corpus = simplification_corpus();
  double red = 0.0;
  double rec = 0.0;
  for (const auto & lr : corpus) {
    const auto tr = truncate_at_accident(lr.recording);
    const auto r = simplify(tr);
    red += reduction_ratio(r, tr.frames.size());
    rec += critical_recall(r.kept, lr.critical_frames);
  }
  const double n = static_cast<double>(corpus.size());
  red /= n;
  rec /= n;
  return {corpus.size() == 60 && red >= 0.50 && rec >= 0.90,
          std::to_string(corpus.size()) + " recordings, mean reduction ratio " + fmt("%.4f", red) +
            " (>= 0.50), mean critical recall " + fmt("%.4f", rec) + " (>= 0.90)"};
}

// ---- 4 -------------------------------------------------------------------

Outcome motivating_example()
{
  const auto spec = motivating_example_spec();
  const auto lr = inject_fault(spec, FaultKind::f1_ignore_all_priority);
  if (!lr.collided) {
    return {false, "fixture did not end in a collision"};
  }
  const auto tr = truncate_at_accident(lr.recording);
  const auto r = simplify(tr);
  const double d = tr.frame_duration;
  const double t_interaction = spec.npcs.front().waypoints.front().t;
  std::size_t first = 0;
  while (first < tr.frames.size() && tr.frames[first].t_start + 1e-9 < t_interaction) {
    ++first;
  }
  const std::size_t last = tr.accident->frame;
  const double prefix = tr.frames[first].t_start;
  const double interaction = static_cast<double>(last - first + 1) * d;
  const double kept_s = static_cast<double>(r.kept.length()) * d;
  const bool contains = r.kept.contains(first) && r.kept.contains(last);
  return {contains && kept_s <= 6.0 && prefix >= 13.0,
          "recording " + fmt("%.2f", static_cast<double>(tr.frames.size()) * d) + " s (prefix " +
            fmt("%.2f", prefix) + " s, interaction " + fmt("%.2f", interaction) + " s), kept " +
            fmt("%.2f", kept_s) + " s, frames [" + std::to_string(r.kept.start) + ", " +
            std::to_string(r.kept.end) + "] " + (contains ? "contain" : "miss") + " interaction [" +
            std::to_string(first) + ", " + std::to_string(last) + "]"};
}

// ---- 5 -------------------------------------------------------------------

Outcome fault_attribution()
{
  struct Case
  {
    Archetype archetype;
    FaultKind fault;
    double target;
  };
  const Case cases[] = {{Archetype::merging, FaultKind::f1_ignore_all_priority, 0.90},
                        {Archetype::tailgating, FaultKind::f2_wrong_traj_model, 0.90},
                        {Archetype::intersection, FaultKind::f7_overtake_all, 0.80},
                        {Archetype::intersection, FaultKind::f8_high_speed_near, 0.80}};
  std::vector<Attribution> all;
  bool pass = true;
  std::string summary;
  for (const auto & c : cases) {
    const auto corpus = fault_corpus(c.archetype, c.fault, 20, 1000);
    std::size_t correct = 0;
    for (const auto & lr : corpus) {
      const auto r = analyze(lr.recording);
      all.push_back({lr.injected_fault, lr.expected_main_cause, r.report.main_cause});
      correct += r.report.main_cause == lr.expected_main_cause ? 1 : 0;
    }
    const double acc = static_cast<double>(correct) / static_cast<double>(corpus.size());
    pass = pass && acc >= c.target;
    summary += std::string(to_string(c.fault)).substr(0, 2) + " " + std::to_string(correct) + "/" +
               std::to_string(corpus.size()) + ", ";
  }
  const double precision = event_precision(all);
  pass = pass && precision >= 0.95;
  return {pass, summary + "event precision " + fmt("%.4f", precision) + " (>= 0.95)"};
}

// ---- 6 -------------------------------------------------------------------

Outcome frenet_geometry()
{
  std::mt19937_64 rng(606);
  double worst_proj = 0.0;
  double worst_trip = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto pts = oracle::random_polyline(rng);
    const ReferencePath path(pts);
    const auto samples = oracle::dense_samples(path.points(), 100000);
    std::uniform_real_distribution<double> sd(0.0, path.length());
    for (;;) {
      std::uniform_real_distribution<double> xd(pts.front().x - 10.0, pts.back().x + 10.0);
      std::uniform_real_distribution<double> yd(-40.0, 40.0);
      const Vec2 p{xd(rng), yd(rng)};
      const double brute = oracle::nearest_distance(samples, p);
      if (brute < 0.5) {
        continue;  // sampling error of the oracle grows near the path
      }
      const FrenetCoord c = path.project(p);
      worst_proj = std::max(worst_proj, std::abs(std::abs(c.l) - brute));
      worst_proj = std::max(worst_proj, std::abs(distance(path.point_at(c.s), p) - std::abs(c.l)));
      break;
    }
    for (int k = 0; k < 20; ++k) {
      const double s = sd(rng);
      const Vec2 p = path.point_at(s);
      const FrenetCoord c = path.project(p);
      worst_trip = std::max({worst_trip, std::abs(c.s - s), std::abs(c.l), distance(path.to_cartesian(c), p)});
    }
  }
  return {worst_proj <= 1e-6 && worst_trip <= 1e-6,
          "max projection gap " + fmt("%.2e", worst_proj) + " m, max round-trip error " +
            fmt("%.2e", worst_trip) + " m (<= 1e-6)"};
}

// ---- 7 -------------------------------------------------------------------

Outcome intersection_oracle()
{
  std::mt19937_64 rng(707);
  int presence_fail = 0;
  double worst_dt = 0.0;
  int hits = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto curve = oracle::random_curve(rng);
    const auto block = oracle::random_block(rng, curve);
    const double tol = 0.1;
    const auto got = curve_block_intersect(curve, block, tol);
    const auto want = oracle::sampled_intersect(curve, block, tol, 0.001);
    if (got.has_value() != want.has_value()) {
      ++presence_fail;
    } else if (got) {
      ++hits;
      worst_dt = std::max(worst_dt, std::abs(*got - *want));
    }
  }
  return {presence_fail == 0 && worst_dt <= 0.05,
          std::to_string(hits) + " hits / 100 pairs, presence mismatches " + std::to_string(presence_fail) +
            ", max earliest-t gap " + fmt("%.4f", worst_dt) + " s (<= 0.05)"};
}

// ---- 8 -------------------------------------------------------------------

Outcome out_of_control()
{
  const CatConfig cfg;
  int detected = 0;
  int clean_flags = 0;
  for (int k = 0; k < 20; ++k) {
    const double drift = cfg.deviation_threshold + 0.1 + 0.075 * k;
    const auto spec = skid_fixture_spec(static_cast<std::uint64_t>(k), drift);
    const auto rec = generate(spec).recording;
    bool hit = false;
    for (std::size_t i = 0; i < rec.frames.size() && !hit; ++i) {
      if (rec.frames[i].t_start + 1e-9 >= spec.skid->onset) {
        hit = detect_out_of_control(rec, i, cfg).flagged;
      }
    }
    detected += hit ? 1 : 0;

    const auto calm = generate(skid_fixture_spec(static_cast<std::uint64_t>(k), 0.0)).recording;
    for (std::size_t i = 0; i < calm.frames.size(); ++i) {
      clean_flags += detect_out_of_control(calm, i, cfg).flagged ? 1 : 0;
    }
  }
  return {detected == 20 && clean_flags == 0,
          "skids detected " + std::to_string(detected) + "/20, flags on zero-deviation fixtures " +
            std::to_string(clean_flags)};
}

// ---- 9 -------------------------------------------------------------------

std::string slurp(const fs::path & p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const std::string & cli, const fs::path & scratch)
{
  std::vector<LabeledRecording> fixtures;
  fixtures.push_back(inject_fault(motivating_example_spec(), FaultKind::f1_ignore_all_priority));
  fixtures.push_back(fault_corpus(Archetype::intersection, FaultKind::f7_overtake_all, 1, 0).front());
  fixtures.push_back(fault_corpus(Archetype::tailgating, FaultKind::f2_wrong_traj_model, 1, 0).front());
  std::size_t files = 0;
  std::size_t diffs = 0;
  for (std::size_t k = 0; k < fixtures.size(); ++k) {
    const fs::path dir = scratch / ("det_" + std::to_string(k));
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path rec = dir / "fixture.rec.jsonl";
    std::ofstream(rec, std::ios::binary) << write_recording_string(fixtures[k].recording);
    for (const char * run : {"a", "b"}) {
      const std::string cmd = "\"" + cli + "\" analyze \"" + rec.string() + "\" --plot --out \"" +
                              (dir / run).string() + "\" > /dev/null";
      if (std::system(cmd.c_str()) != 0) {
        return {false, "cli failed on fixture " + std::to_string(k)};
      }
    }
    for (const auto & e : fs::directory_iterator(dir / "a")) {
      ++files;
      const fs::path twin = dir / "b" / e.path().filename();
      if (!fs::exists(twin) || slurp(e.path()) != slurp(twin)) {
        ++diffs;
      }
    }
    std::size_t count_b = 0;
    for ([[maybe_unused]] const auto & e : fs::directory_iterator(dir / "b")) {
      ++count_b;
    }
    if (count_b != static_cast<std::size_t>(std::distance(fs::directory_iterator(dir / "a"), {}))) {
      ++diffs;
    }
  }
  return {diffs == 0 && files > 6,
          std::to_string(files) + " files over " + std::to_string(fixtures.size()) + " fixtures, " +
            std::to_string(diffs) + " differ"};
}

// ---- 10 ------------------------------------------------------------------

Outcome timeline_golden(const fs::path & golden_dir)
{
  const auto report = oracle::timeline_report();
  const std::string md = render_markdown(report);
  std::vector<std::string> times;
  for (const auto & row : report.timeline) {
    times.push_back(fmt("%.1f", row.t));
  }
  const std::vector<std::string> want_times{"0.0", "0.4", "0.8", "2.6"};
  const bool times_ok = times == want_times && report.accident && fmt("%.1f", report.accident->t) == "4.3";
  const fs::path golden = golden_dir / "timeline_report.md";
  if (!fs::exists(golden)) {
    return {false, "golden file missing: " + golden.string()};
  }
  const bool same = slurp(golden) == md;
  return {times_ok && same, std::string("transitions ") + (times_ok ? "0, 0.4, 0.8, 2.6 s, accident 4.3 s" : "wrong") +
                              ", golden " + (same ? "matches" : "differs")};
}

}  // namespace

int main(int argc, char ** argv)
{
  if (argc < 4) {
    std::fprintf(stderr, "usage: %s <acav-cli> <golden-dir> <scratch-dir>\n", argv[0]);
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path golden = argv[2];
  const fs::path scratch = argv[3];
  fs::create_directories(scratch);

  struct Criterion
  {
    int id;
    const char * name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
    {1, "voting truth table", 1.0, voting_truth_table},
    {2, "segmenting oracle equivalence", 10.0, segmenting_oracle},
    {3, "simplification corpus", 60.0, simplification_corpus_check},
    {4, "motivating example", 5.0, motivating_example},
    {5, "fault attribution", 300.0, fault_attribution},
    {6, "frenet geometry", 10.0, frenet_geometry},
    {7, "intersection oracle", 10.0, intersection_oracle},
    {8, "out of control", 5.0, out_of_control},
    {9, "determinism", std::numeric_limits<double>::infinity(), [&] { return determinism(cli, scratch); }},
    {10, "golden timeline report", std::numeric_limits<double>::infinity(), [&] { return timeline_golden(golden); }},
  };

  int failed = 0;
  for (const auto & c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception & e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    failed += pass ? 0 : 1;
    std::string budget = std::isfinite(c.budget_s) ? " < " + fmt("%.0f", c.budget_s) + " s" : "";
    std::printf("criterion %2d %s: %s | %s | %.2f s%s%s\n", c.id, pass ? "PASS" : "FAIL", c.name, o.summary.c_str(),
                secs, budget.c_str(), in_time ? "" : " (over budget)");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
