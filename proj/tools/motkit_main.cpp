// motkit command-line driver: track, eval, simulate, mine, bench.
// Exit codes: 0 success, 1 usage/config error, 2 data error.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "motkit/bench.hpp"
#include "motkit/config.hpp"
#include "motkit/io.hpp"
#include "motkit/kernels.hpp"
#include "motkit/metrics.hpp"
#include "motkit/sim.hpp"
#include "motkit/tracker.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct TrackArgs {
  std::string dets;
  std::string embs;
  std::string out;
  std::string timing;
  std::string config;
  std::string format = "mot";
  std::vector<std::string> overrides;
};

std::vector<mot::MotRow> detection_rows(const std::string& path,
                                        const std::string& format) {
  if (format == "kitti") {
    std::vector<mot::MotRow> rows;
    for (const mot::KittiRow& r : mot::read_kitti(path)) {
      rows.push_back({r.frame, -1, r.bbox, r.score});
    }
    return rows;
  }
  return mot::read_mot(path);
}

void write_hypotheses(const std::vector<mot::FrameResult>& results,
                      const std::string& path, const std::string& format) {
  if (format == "kitti") {
    std::vector<mot::KittiRow> rows;
    for (const mot::FrameResult& fr : results) {
      for (const mot::TrackOutput& out : fr.outputs) {
        rows.push_back({fr.frame, out.id, "Car", -1.0, -1.0, -10.0, out.bbox,
                        -1.0, -1.0, -1.0, -1000.0, -1000.0, -1000.0, -10.0,
                        out.confidence});
      }
    }
    mot::write_kitti(std::move(rows), path);
    return;
  }
  mot::write_mot(mot::mot_rows_from_results(results), path);
}

json timing_json(const mot::StageTimings& t) {
  const double frames = t.frames > 0 ? static_cast<double>(t.frames) : 1.0;
  json j;
  j["frames"] = t.frames;
  j["fps"] = t.fps();
  j["mean_frame_ms"] = t.mean_frame_ms();
  j["stages_ms"] = {
      {"predict", {{"mean", t.predict_ms / frames}, {"max", t.predict_max_ms}}},
      {"matrix", {{"mean", t.matrix_ms / frames}, {"max", t.matrix_max_ms}}},
      {"solve", {{"mean", t.solve_ms / frames}, {"max", t.solve_max_ms}}},
      {"update", {{"mean", t.update_ms / frames}, {"max", t.update_max_ms}}},
  };
  j["kernel_backend"] =
      mot::kernels::backend_name(mot::kernels::active_backend());
  return j;
}

int cmd_track(const TrackArgs& args) {
  const mot::Config cfg = mot::make_config(args.config, args.overrides);
  const bool needs_embeddings = cfg.tracker.cost.beta > 0.0;
  if (needs_embeddings && args.embs.empty()) {
    std::cerr << "track: beta > 0 requires --embs (or set beta 0 in config)\n";
    return 2;
  }

  const std::vector<mot::MotRow> rows = detection_rows(args.dets, args.format);
  std::optional<mot::EmbeddingMap> embeddings;
  if (!args.embs.empty()) {
    embeddings = mot::read_embeddings(args.embs);
  }
  const mot::DetectionStream stream = mot::assemble_detections(
      rows, embeddings ? &*embeddings : nullptr, needs_embeddings);

  const mot::SequenceResult result = mot::run_sequence(stream, cfg.tracker);
  write_hypotheses(result.frames, args.out, args.format);

  const std::string timing_path =
      args.timing.empty() ? args.out + ".timing.json" : args.timing;
  std::ofstream timing_out(timing_path);
  if (!timing_out) {
    std::cerr << "track: cannot write " << timing_path << "\n";
    return 2;
  }
  timing_out << timing_json(result.timings).dump(2) << "\n";

  std::cout << "tracked " << result.frames.size() << " frames, "
            << result.timings.fps() << " fps (tracking stages only)\n";
  return 0;
}

struct EvalArgs {
  std::string gt;
  std::string hyp;
  std::string format = "mot";
  double iou_threshold = 0.5;
  std::string json_path;
};

mot::TrackFile load_track_file(const std::string& path,
                               const std::string& format) {
  if (format == "kitti") {
    return mot::track_file_from_kitti(mot::read_kitti(path));
  }
  return mot::track_file_from_mot(mot::read_mot(path));
}

json report_json(const mot::MotReport& r) {
  json j;
  j["MOTA"] = r.mota;
  j["MOTP"] = r.motp;
  j["FP"] = r.fp;
  j["FN"] = r.fn;
  j["IDs"] = r.id_switches;
  j["P"] = r.precision;
  j["R"] = r.recall;
  j["MT"] = r.mt;
  j["ML"] = r.ml;
  j["IDF1"] = r.idf1;
  j["GT"] = r.gt_count;
  j["Matches"] = r.match_count;
  return j;
}

void print_report(const mot::MotReport& r) {
  std::printf("%8s %8s %6s %6s %5s %7s %7s %6s %6s %7s %8s\n", "MOTA", "MOTP",
              "FP", "FN", "IDs", "P", "R", "MT", "ML", "IDF1", "GT");
  std::printf("%8.4f %8.2f %6lld %6lld %5lld %7.2f %7.2f %6.1f %6.1f %7.2f %8lld\n",
              r.mota, r.motp, static_cast<long long>(r.fp),
              static_cast<long long>(r.fn),
              static_cast<long long>(r.id_switches), r.precision, r.recall,
              r.mt, r.ml, r.idf1, static_cast<long long>(r.gt_count));
}

int cmd_eval(const EvalArgs& args) {
  const mot::TrackFile gt = load_track_file(args.gt, args.format);
  const mot::TrackFile hyp = load_track_file(args.hyp, args.format);
  const mot::MotReport report = mot::evaluate(gt, hyp, args.iou_threshold);
  print_report(report);

  const std::string json_path =
      args.json_path.empty() ? args.hyp + ".eval.json" : args.json_path;
  std::ofstream out(json_path);
  if (!out) {
    std::cerr << "eval: cannot write " << json_path << "\n";
    return 2;
  }
  out << report_json(report).dump(2) << "\n";
  return 0;
}

struct SimulateArgs {
  std::string scenario_config;
  std::string out_dir;
  int scenes = 1;
  int jobs = 0;
  std::vector<std::string> overrides;
};

void write_scene(const mot::ScenarioParams& params, const fs::path& dir) {
  const mot::Scenario scenario = mot::generate(params);
  fs::create_directories(dir);

  std::vector<mot::MotRow> gt_rows;
  for (const auto& [frame, boxes] : scenario.gt) {
    for (const mot::TrackedBox& box : boxes) {
      gt_rows.push_back({frame, box.id, box.bbox, 1.0});
    }
  }
  mot::write_mot(std::move(gt_rows), dir / "gt.txt");

  std::vector<mot::MotRow> det_rows;
  mot::EmbeddingMap embeddings;
  for (const auto& [frame, dets] : scenario.detections) {
    std::int64_t index = 0;
    for (const mot::Detection& det : dets) {
      det_rows.push_back({frame, -1, det.bbox, det.score});
      embeddings.emplace(std::make_pair(frame, index++), *det.embedding);
    }
  }
  mot::write_mot(std::move(det_rows), dir / "dets.txt");
  mot::write_embeddings(embeddings, dir / "embeddings.jsonl");
  mot::write_labeled_embeddings(scenario.labeled, dir / "labeled.jsonl");

  json meta;
  meta["seed"] = params.seed;
  meta["bounces"] = json::array();
  for (const auto& [frame, id] : scenario.bounces) {
    meta["bounces"].push_back({frame, id});
  }
  std::ofstream meta_out(dir / "meta.json");
  meta_out << meta.dump(2) << "\n";
}

int cmd_simulate(const SimulateArgs& args) {
  const mot::ScenarioParams base =
      mot::make_scenario(args.scenario_config, args.overrides);
  const fs::path out_dir(args.out_dir);

  if (args.scenes == 1) {
    write_scene(base, out_dir);
    std::cout << "wrote scene to " << out_dir.string() << "\n";
    return 0;
  }

  const int jobs = args.jobs > 0
                       ? args.jobs
                       : static_cast<int>(std::thread::hardware_concurrency());
  std::atomic<int> next{0};
  auto worker = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= args.scenes) break;
      mot::ScenarioParams params = base;
      params.seed = base.seed + static_cast<std::uint64_t>(i);
      char name[32];
      std::snprintf(name, sizeof(name), "scene_%03d", i);
      write_scene(params, out_dir / name);
    }
  };
  std::vector<std::future<void>> pool;
  for (int t = 0; t < std::max(1, jobs); ++t) {
    pool.push_back(std::async(std::launch::async, worker));
  }
  for (auto& f : pool) f.get();
  std::cout << "wrote " << args.scenes << " scenes to " << out_dir.string()
            << "\n";
  return 0;
}

struct MineArgs {
  std::string labeled;
  std::string config;
  std::uint64_t seed = 1;
  int batches = 1;
  std::vector<std::string> overrides;
};

int cmd_mine(const MineArgs& args) {
  const mot::Config cfg = mot::make_config(args.config, args.overrides);
  const std::vector<mot::LabeledInstance> stream =
      mot::read_labeled_embeddings(args.labeled);

  std::size_t total_triplets = 0;
  std::size_t violations = 0;
  double loss_sum = 0.0;
  for (int b = 0; b < args.batches; ++b) {
    const mot::LabeledBatch batch =
        mot::sample_batch(stream, cfg.mining, args.seed + static_cast<std::uint64_t>(b));
    const std::vector<mot::Triplet> triplets = mot::mine_hard_triplets(batch);
    if (triplets.empty()) {
      std::cerr << "mine: batch produced no triplets\n";
      return 2;
    }
    loss_sum += mot::triplet_loss(triplets, batch.items, cfg.mining.margin);
    for (const mot::Triplet& t : triplets) {
      if (!mot::margin_satisfied(batch.items[t.anchor].embedding,
                                 batch.items[t.positive].embedding,
                                 batch.items[t.negative].embedding,
                                 cfg.mining.margin)) {
        ++violations;
      }
    }
    total_triplets += triplets.size();
  }

  std::printf("batches:            %d\n", args.batches);
  std::printf("triplets:           %zu\n", total_triplets);
  std::printf("mean loss:          %.6f\n",
              loss_sum / static_cast<double>(args.batches));
  std::printf("margin violations:  %.4f\n",
              static_cast<double>(violations) /
                  static_cast<double>(total_triplets));
  return 0;
}

struct BenchArgs {
  std::vector<int> tracks = {8, 16, 32, 64, 128};
  int dim = 128;
  std::int64_t frames = 20;
  int repeats = 20;
  std::uint64_t seed = 7;
  std::string json_path;
  std::string backend = "auto";
};

int cmd_bench(const BenchArgs& args) {
  if (args.backend == "scalar") {
    mot::kernels::force_backend(mot::kernels::Backend::Scalar);
  } else if (args.backend == "avx2") {
    mot::kernels::force_backend(mot::kernels::Backend::Avx2);
  }
  std::cout << "kernel backend: "
            << mot::kernels::backend_name(mot::kernels::active_backend())
            << "\n";
  std::printf("%7s %12s %12s %12s %12s %12s %12s\n", "tracks", "predict_ms",
              "matrix_ms", "solve_ms", "update_ms", "step_ms", "step_p95");
  json out = json::array();
  for (const mot::BenchPoint& p :
       mot::bench_sweep(args.tracks, args.dim, args.frames, args.repeats,
                        args.seed)) {
    std::printf("%7d %12.4f %12.4f %12.4f %12.4f %12.4f %12.4f\n", p.tracks,
                p.predict_ms, p.matrix_ms, p.solve_ms, p.update_ms, p.step_ms,
                p.step_p95_ms);
    out.push_back({{"tracks", p.tracks},
                   {"dim", p.dim},
                   {"frames", p.frames},
                   {"repeats", p.repeats},
                   {"predict_ms", p.predict_ms},
                   {"matrix_ms", p.matrix_ms},
                   {"solve_ms", p.solve_ms},
                   {"update_ms", p.update_ms},
                   {"step_ms", p.step_ms},
                   {"step_p95_ms", p.step_p95_ms}});
  }
  if (!args.json_path.empty()) {
    std::ofstream jout(args.json_path);
    if (!jout) {
      std::cerr << "bench: cannot write " << args.json_path << "\n";
      return 2;
    }
    jout << out.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"motkit: online multi-object tracking, evaluation and simulation"};
  app.require_subcommand(1);

  TrackArgs track_args;
  CLI::App* track = app.add_subcommand(
      "track", "Run the tracker over a detection file and write hypotheses");
  track->add_option("--dets", track_args.dets, "detection file")->required();
  track->add_option("--embs", track_args.embs,
                    "embedding sidecar (JSON Lines); required when beta > 0");
  track->add_option("--out", track_args.out, "hypothesis output file")
      ->required();
  track->add_option("--timing", track_args.timing,
                    "timing JSON path (default: <out>.timing.json)");
  track->add_option("--config", track_args.config, "JSON config file");
  track->add_option("--set", track_args.overrides,
                    "override a config key, e.g. --set beta=0.25");
  track->add_option("--format", track_args.format, "mot|kitti")
      ->check(CLI::IsMember({"mot", "kitti"}));
  track->footer("Config keys:\n" + mot::config_documentation());

  EvalArgs eval_args;
  CLI::App* eval =
      app.add_subcommand("eval", "Evaluate a hypothesis file against ground truth");
  eval->add_option("--gt", eval_args.gt, "ground-truth file")->required();
  eval->add_option("--hyp", eval_args.hyp, "hypothesis file")->required();
  eval->add_option("--format", eval_args.format, "mot|kitti")
      ->check(CLI::IsMember({"mot", "kitti"}));
  eval->add_option("--iou-threshold", eval_args.iou_threshold,
                   "match threshold in (0, 1], default 0.5");
  eval->add_option("--json", eval_args.json_path,
                   "report JSON path (default: <hyp>.eval.json)");

  SimulateArgs sim_args;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Generate synthetic scenes (ground truth + detections + embeddings)");
  simulate->add_option("--scenario-config", sim_args.scenario_config,
                       "scenario JSON config (keys below; --set can stand in)");
  simulate->add_option("--out-dir", sim_args.out_dir, "output directory")
      ->required();
  simulate->add_option("--scenes", sim_args.scenes,
                       "number of scenes (seeds increment from the base seed)");
  simulate->add_option("--jobs", sim_args.jobs,
                       "parallel workers (default: hardware threads)");
  simulate->add_option("--set", sim_args.overrides,
                       "override a scenario key, e.g. --set seed=7");
  simulate->footer("Scenario keys:\n" + mot::scenario_documentation());

  MineArgs mine_args;
  CLI::App* mine = app.add_subcommand(
      "mine", "Sample batches from a labeled embedding stream and report "
              "hard-triplet statistics");
  mine->add_option("--labeled-embs", mine_args.labeled,
                   "labeled embedding stream (JSON Lines)")
      ->required();
  mine->add_option("--config", mine_args.config, "JSON config file");
  mine->add_option("--set", mine_args.overrides,
                   "override a config key, e.g. --set margin=0.3");
  mine->add_option("--seed", mine_args.seed, "batch sampling seed");
  mine->add_option("--batches", mine_args.batches, "number of batches");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand(
      "bench", "Time tracking stages against synthetic track counts");
  bench->add_option("--tracks", bench_args.tracks,
                    "track counts (default 8 16 32 64 128)");
  bench->add_option("--dim", bench_args.dim, "embedding dimension");
  bench->add_option("--frames", bench_args.frames, "frames per run");
  bench->add_option("--repeats", bench_args.repeats, "runs per point");
  bench->add_option("--seed", bench_args.seed, "scene seed");
  bench->add_option("--json", bench_args.json_path, "write results as JSON");
  bench->add_option("--backend", bench_args.backend,
                    "kernel backend: auto|scalar|avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (track->parsed()) return cmd_track(track_args);
    if (eval->parsed()) return cmd_eval(eval_args);
    if (simulate->parsed()) return cmd_simulate(sim_args);
    if (mine->parsed()) return cmd_mine(mine_args);
    if (bench->parsed()) return cmd_bench(bench_args);
  } catch (const mot::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
