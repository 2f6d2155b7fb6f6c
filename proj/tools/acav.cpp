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

// acav: generate, simplify, analyze and evaluate driving recordings.
//
// Exit codes: 0 success, 2 input error, 3 no accident in recording.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "acav/acav.hpp"

namespace fs = std::filesystem;

namespace
{

constexpr int kExitInput = 2;
constexpr int kExitNoAccident = 3;

struct Options
{
  std::string weights{"1,1,2"};
  double th_m{0.8};
  double th_err{2.0};
  double deviation{0.5};
  double horizon{8.0};
  double frame_duration{acav::kDefaultFrameDuration};
  bool plot{false};
  std::string out{"."};
  unsigned jobs{1};
  int verbosity{0};
};

acav::VotingWeights parse_weights(const std::string & text)
{
  std::vector<double> w;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      w.push_back(std::stod(item, &used));
      if (used != item.size()) {
        throw std::invalid_argument(item);
      }
    } catch (const std::exception &) {
      throw acav::InputError("--weights: '" + item + "' is not a number");
    }
  }
  if (w.size() != 3) {
    throw acav::InputError("--weights expects three comma-separated values");
  }
  acav::VotingWeights vw{w[0], w[1], w[2]};
  vw.validate();
  return vw;
}

acav::AnalysisConfig analysis_config(const Options & o)
{
  acav::AnalysisConfig c;
  c.simplifier.weights = parse_weights(o.weights);
  c.simplifier.th_m = o.th_m;
  c.set_th_err(o.th_err);
  c.cat.deviation_threshold = o.deviation;
  c.cat.st.horizon = o.horizon;
  c.validate();
  return c;
}

acav::AlignedRecording load_recording(const std::string & path, double frame_duration)
{
  std::ifstream in(path);
  if (!in) {
    throw acav::InputError("cannot open " + path);
  }
  if (!(frame_duration > 0.0)) {
    throw acav::InputError("--frame-duration must be positive");
  }
  auto rec = acav::read_recording(in, frame_duration);
  if (rec.id.empty()) {
    rec.id = fs::path(path).stem().string();
  }
  return rec;
}

void write_file(const fs::path & path, const std::string & content)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw acav::Error("cannot write " + path.string());
  }
  out << content;
}

fs::path ensure_dir(const std::string & dir)
{
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) {
    throw acav::Error("cannot create directory " + dir + ": " + ec.message());
  }
  return p;
}

std::optional<std::uint64_t> env_seed()
{
  const char * v = std::getenv("ACAV_SEED");
  if (v == nullptr || *v == '\0') {
    return std::nullopt;
  }
  try {
    return std::stoull(v);
  } catch (const std::exception &) {
    throw acav::InputError("ACAV_SEED must be an unsigned integer");
  }
}

void add_analysis_flags(CLI::App * cmd, Options & o)
{
  cmd->add_option("--weights", o.weights, "Voting weights map,perception,planning")->capture_default_str();
  cmd->add_option("--th-m", o.th_m, "Irrelevant-frame ratio threshold")->capture_default_str();
  cmd->add_option("--th-err", o.th_err, "Prediction error threshold (m)")->capture_default_str();
  cmd->add_option("--deviation", o.deviation, "Out-of-control deviation threshold (m)")->capture_default_str();
  cmd->add_option("--horizon", o.horizon, "ST graph horizon (s)")->capture_default_str();
  cmd->add_option("--frame-duration", o.frame_duration, "Frame duration (s)")->capture_default_str();
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  cmd->add_flag("-v,--verbose", o.verbosity, "Verbose output");
}

void write_report_files(const acav::AnalysisResult & r, const fs::path & dir, bool plot)
{
  write_file(dir / "report.json", acav::to_json(r.report).dump(2) + "\n");
  write_file(dir / "report.md", acav::render_markdown(r.report));
  if (plot) {
    for (const auto & [frame, g] : r.graphs) {
      write_file(dir / ("st_" + std::to_string(frame) + ".svg"), acav::render_st_svg(g, frame));
    }
  }
}

int cmd_gen(
  const Options & o, const std::string & spec_file, const std::string & archetype, std::uint64_t seed,
  const std::string & fault_name, std::size_t count)
{
  const fs::path dir = ensure_dir(o.out);
  std::optional<acav::FaultKind> fault;
  if (!fault_name.empty()) {
    fault = acav::parse_fault(fault_name);
  }
  if (auto s = env_seed()) {
    seed = *s;
  }
  std::vector<acav::ScenarioSpec> specs;
  if (!spec_file.empty()) {
    std::ifstream in(spec_file);
    if (!in) {
      throw acav::InputError("cannot open " + spec_file);
    }
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception & e) {
      throw acav::InputError(spec_file + ": " + e.what());
    }
    specs.push_back(acav::scenario_from_json(j));
    if (env_seed()) {
      specs.back().seed = seed;
    }
  } else if (!archetype.empty()) {
    const auto a = acav::parse_archetype(archetype);
    for (std::size_t k = 0; k < count; ++k) {
      specs.push_back(acav::sample_scenario(a, seed + k));
    }
  } else {
    throw acav::InputError("gen needs --spec or --archetype");
  }

  for (const auto & spec : specs) {
    auto lr = fault ? acav::inject_fault(spec, *fault) : acav::generate(spec);
    if (fault && !lr.collided) {
      std::cerr << "warning: " << lr.recording.id << ": injected fault produced no collision\n";
    }
    const std::string stem = lr.recording.id;
    write_file(dir / (stem + ".rec.jsonl"), acav::write_recording_string(lr.recording));
    write_file(dir / (stem + ".labels.json"), acav::label_json(lr).dump(2) + "\n");
    std::cout << (dir / (stem + ".rec.jsonl")).string() << "\n";
  }
  return 0;
}

int cmd_simplify(const Options & o, const std::string & path)
{
  const auto cfg = analysis_config(o);
  const auto rec = acav::truncate_at_accident(load_recording(path, o.frame_duration));
  const auto r = acav::simplify(rec, cfg.simplifier, cfg.features);
  nlohmann::json j;
  j["recording_id"] = rec.id;
  j["total_frames"] = rec.frames.size();
  j["kept"] = {{"start", r.kept.start},
               {"end", r.kept.end},
               {"t_start", acav::detail::tidy(rec.frames[r.kept.start].t_start)},
               {"t_end", acav::detail::tidy(rec.frames[r.kept.end].t_start + rec.frame_duration)}};
  j["ratio"] = r.reduction_ratio;
  nlohmann::json segs = nlohmann::json::array();
  for (const auto & s : r.segments_all) {
    segs.push_back({s.start, s.end});
  }
  j["segments"] = segs;
  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (o.out != ".") {
    write_file(ensure_dir(o.out) / "simplify.json", text);
  }
  return 0;
}

int cmd_analyze(const Options & o, const std::string & path)
{
  const auto cfg = analysis_config(o);
  const auto r = acav::analyze(load_recording(path, o.frame_duration), cfg);
  const fs::path dir = ensure_dir(o.out);
  write_report_files(r, dir, o.plot);
  std::cout << "main cause: "
            << (r.report.main_cause ? std::string(acav::to_string(*r.report.main_cause)) : "none") << "\n";
  if (o.verbosity > 0) {
    std::cout << acav::render_markdown(r.report);
  }
  return 0;
}

int cmd_report(const Options & o, const std::string & path, bool as_json)
{
  const auto cfg = analysis_config(o);
  const auto r = acav::analyze(load_recording(path, o.frame_duration), cfg);
  std::cout << (as_json ? acav::to_json(r.report).dump(2) + "\n" : acav::render_markdown(r.report));
  return 0;
}

int cmd_plot(const Options & o, const std::string & path, std::optional<std::size_t> frame)
{
  const auto cfg = analysis_config(o);
  const auto rec = load_recording(path, o.frame_duration);
  const fs::path dir = ensure_dir(o.out);
  if (frame) {
    if (*frame >= rec.frames.size()) {
      throw acav::InputError("frame " + std::to_string(*frame) + " out of range");
    }
    const auto g = acav::build_st_graph(rec, *frame, cfg.cat.st);
    write_file(dir / ("st_" + std::to_string(*frame) + ".svg"), acav::render_st_svg(g, *frame));
    return 0;
  }
  const auto r = acav::analyze(rec, cfg);
  for (const auto & [f, g] : r.graphs) {
    write_file(dir / ("st_" + std::to_string(f) + ".svg"), acav::render_st_svg(g, f));
  }
  std::cout << r.graphs.size() << " plot(s) written\n";
  return 0;
}

int cmd_eval(const Options & o, const std::string & corpus_dir)
{
  const auto cfg = analysis_config(o);
  if (!fs::is_directory(corpus_dir)) {
    throw acav::InputError(corpus_dir + " is not a directory");
  }
  std::vector<fs::path> files;
  for (const auto & e : fs::directory_iterator(corpus_dir)) {
    const auto name = e.path().filename().string();
    if (e.is_regular_file() && name.size() > 10 && name.ends_with(".rec.jsonl")) {
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw acav::InputError(corpus_dir + " holds no recordings (*.rec.jsonl)");
  }

  std::vector<std::optional<acav::CorpusEntry>> results(files.size());
  std::vector<std::string> warnings(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      const auto & file = files[i];
      try {
        const auto rec = load_recording(file.string(), o.frame_duration);
        std::string label_path = file.string();
        label_path.replace(label_path.size() - 10, 10, ".labels.json");
        std::optional<acav::Labels> labels;
        if (std::ifstream lin(label_path); lin) {
          nlohmann::json lj;
          try {
            lin >> lj;
          } catch (const nlohmann::json::exception & e) {
            throw acav::InputError(label_path + ": " + e.what());
          }
          labels = acav::labels_from_json(lj);
        }
        const auto r = acav::analyze(rec, cfg);
        acav::CorpusEntry e;
        e.id = rec.id;
        e.total_frames = r.truncated.frames.size();
        e.kept = r.simplification.kept;
        if (labels) {
          for (auto f : labels->critical_frames) {
            if (f < e.total_frames) {
              e.critical_frames.push_back(f);
            }
          }
          e.attribution.fault = labels->injected_fault;
          e.attribution.expected = labels->expected_main_cause;
        }
        e.attribution.detected = r.report.main_cause;
        results[i] = std::move(e);
      } catch (const std::exception & ex) {
        warnings[i] = file.filename().string() + ": " + ex.what();
      }
    }
  };
  const unsigned jobs = std::max(1u, o.jobs);
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < jobs; ++k) {
    pool.emplace_back(worker);
  }
  worker();
  for (auto & t : pool) {
    t.join();
  }

  std::vector<acav::CorpusEntry> entries;
  std::size_t errors = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (results[i]) {
      entries.push_back(std::move(*results[i]));
    } else {
      ++errors;
      std::cerr << "warning: skipped " << warnings[i] << "\n";
    }
  }
  const auto stats = acav::corpus_stats(entries, errors);
  const fs::path dir = ensure_dir(o.out);
  write_file(dir / "stats.json", acav::to_json(stats).dump(2) + "\n");
  const auto table = acav::stats_table(stats);
  write_file(dir / "stats.txt", table);
  std::cout << table;
  return 0;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Accident recording simplification and causality analysis"};
  app.require_subcommand(1);
  Options o;

  std::string spec_file;
  std::string archetype;
  std::uint64_t seed = 0;
  std::string fault;
  std::size_t count = 1;
  auto * gen = app.add_subcommand("gen", "Generate a synthetic recording and its label file");
  gen->add_option("--spec", spec_file, "Scenario spec (JSON)");
  gen->add_option("--archetype", archetype, "intersection | merging | tailgating");
  gen->add_option("--seed", seed, "Scenario seed (ACAV_SEED overrides)");
  gen->add_option("--fault", fault, "Fault to inject (f1..f8 or full name)");
  gen->add_option("--count", count, "Consecutive seeds to generate")->check(CLI::PositiveNumber);
  gen->add_option("--out", o.out, "Output directory")->capture_default_str();

  std::string input;
  auto * simp = app.add_subcommand("simplify", "Print the kept segment of a recording");
  simp->add_option("recording", input, "Recording file")->required();
  add_analysis_flags(simp, o);

  auto * an = app.add_subcommand("analyze", "Write report.json, report.md and optional ST plots");
  an->add_option("recording", input, "Recording file")->required();
  an->add_flag("--plot", o.plot, "Write st_<frame>.svg per safety-critical frame");
  add_analysis_flags(an, o);

  bool as_json = false;
  auto * rep = app.add_subcommand("report", "Print the causality report");
  rep->add_option("recording", input, "Recording file")->required();
  rep->add_flag("--json", as_json, "Print JSON instead of markdown");
  add_analysis_flags(rep, o);

  std::optional<std::size_t> frame;
  auto * plot = app.add_subcommand("plot", "Write ST graph SVGs");
  plot->add_option("recording", input, "Recording file")->required();
  plot->add_option("--frame", frame, "Plot this frame only");
  add_analysis_flags(plot, o);

  auto * ev = app.add_subcommand("eval", "Evaluate a labelled corpus directory");
  ev->add_option("corpus", input, "Directory of *.rec.jsonl with *.labels.json")->required();
  ev->add_option("--jobs", o.jobs, "Parallel workers")->capture_default_str();
  add_analysis_flags(ev, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  try {
    if (gen->parsed()) {
      return cmd_gen(o, spec_file, archetype, seed, fault, count);
    }
    if (simp->parsed()) {
      return cmd_simplify(o, input);
    }
    if (an->parsed()) {
      return cmd_analyze(o, input);
    }
    if (rep->parsed()) {
      return cmd_report(o, input, as_json);
    }
    if (plot->parsed()) {
      return cmd_plot(o, input, frame);
    }
    if (ev->parsed()) {
      return cmd_eval(o, input);
    }
  } catch (const acav::NoAccidentError & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoAccident;
  } catch (const acav::InputError & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
