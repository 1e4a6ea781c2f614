#include <doctest.h>

#include <cstdlib>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "motkit/config.hpp"
#include "test_support.hpp"

using test_support::TempDir;
using test_support::read_text;
using test_support::write_text;

namespace {

const std::string kCli = MOTKIT_CLI_PATH;

int run(const std::string& args, const std::string& out_file) {
  const std::string cmd = kCli + " " + args + " > " + out_file + " 2>&1";
  const int rc = std::system(cmd.c_str());
  if (rc == -1 || !WIFEXITED(rc)) return -1;
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help exits zero and lists the subcommands") {
  TempDir dir;
  const auto log = dir.file("help.txt").string();
  CHECK(run("--help", log) == 0);
  const std::string text = read_text(log);
  for (const char* cmd : {"track", "eval", "simulate", "mine", "bench"}) {
    CHECK(text.find(cmd) != std::string::npos);
  }
}

TEST_CASE("track --help documents every config key with its default") {
  TempDir dir;
  const auto log = dir.file("help.txt").string();
  CHECK(run("track --help", log) == 0);
  const std::string text = read_text(log);
  // every key named in the config documentation must appear in the help
  std::istringstream keys(mot::config_documentation());
  std::string line;
  int checked = 0;
  while (std::getline(keys, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key.empty()) continue;
    CHECK(text.find(key) != std::string::npos);
    CHECK(text.find("default") != std::string::npos);
    ++checked;
  }
  CHECK(checked >= 19);
}

TEST_CASE("usage errors exit with code 1") {
  TempDir dir;
  const auto log = dir.file("log.txt").string();
  CHECK(run("", log) == 1);                          // missing subcommand
  CHECK(run("track", log) == 1);                     // missing required flags
  CHECK(run("eval --no-such-flag", log) == 1);       // unknown option
  CHECK(run("track --dets a --out b --format bogus", log) == 1);
}

TEST_CASE("config errors exit with code 1, data errors with 2") {
  TempDir dir;
  const auto log = dir.file("log.txt").string();

  write_text(dir.file("bad_key.json"), "{\"no_such_key\": 1}");
  write_text(dir.file("dets.txt"), "1,-1,10,20,30,40,1,-1,-1,-1\n");
  CHECK(run("track --dets " + dir.file("dets.txt").string() + " --out " +
                dir.file("h.txt").string() + " --config " +
                dir.file("bad_key.json").string(),
            log) == 1);

  write_text(dir.file("bad_value.json"), "{\"max_cost\": -1}");
  CHECK(run("track --dets " + dir.file("dets.txt").string() + " --out " +
                dir.file("h.txt").string() + " --config " +
                dir.file("bad_value.json").string(),
            log) == 1);

  write_text(dir.file("corrupt.txt"), "1,-1,10,20\n");
  CHECK(run("track --dets " + dir.file("corrupt.txt").string() + " --out " +
                dir.file("h.txt").string() + " --embs /nonexistent.jsonl",
            log) == 2);
  CHECK(run("eval --gt /nonexistent.txt --hyp /nonexistent.txt", log) == 2);
}

TEST_CASE("tracking with beta > 0 demands an embedding sidecar") {
  TempDir dir;
  const auto log = dir.file("log.txt").string();
  write_text(dir.file("dets.txt"), "1,-1,10,20,30,40,1,-1,-1,-1\n");
  CHECK(run("track --dets " + dir.file("dets.txt").string() + " --out " +
                dir.file("h.txt").string(),
            log) == 2);
  const std::string text = read_text(log);
  CHECK(text.find("beta") != std::string::npos);

  // a beta = 0 config runs without the sidecar
  write_text(dir.file("beta0.json"), "{\"beta\": 0.0, \"alpha\": 1.0}");
  CHECK(run("track --dets " + dir.file("dets.txt").string() + " --out " +
                dir.file("h.txt").string() + " --config " +
                dir.file("beta0.json").string(),
            log) == 0);
}

TEST_CASE("command-line overrides stack on top of the config file") {
  TempDir dir;
  const auto log = dir.file("log.txt").string();
  write_text(dir.file("dets.txt"), "1,-1,10,20,30,40,1,-1,-1,-1\n");

  // beta zeroed from the command line alone
  CHECK(run("track --dets " + dir.file("dets.txt").string() + " --out " +
                dir.file("h.txt").string() + " --set beta=0 --set alpha=1.0",
            log) == 0);

  // overrides win over the file
  write_text(dir.file("cfg.json"), "{\"beta\": 0.5}");
  CHECK(run("track --dets " + dir.file("dets.txt").string() + " --out " +
                dir.file("h.txt").string() + " --config " +
                dir.file("cfg.json").string() + " --set beta=0",
            log) == 0);

  // unknown keys and malformed pairs are config errors
  CHECK(run("track --dets " + dir.file("dets.txt").string() + " --out " +
                dir.file("h.txt").string() + " --set bogus=1",
            log) == 1);
  CHECK(run("track --dets " + dir.file("dets.txt").string() + " --out " +
                dir.file("h.txt").string() + " --set beta",
            log) == 1);

  // simulate can run entirely from overrides
  const std::string out = (dir.path() / "scene").string();
  CHECK(run("simulate --out-dir " + out +
                " --set seed=5 --set objects=3 --set frames=10 "
                "--set embedding_dim=8",
            log) == 0);
  CHECK(std::filesystem::exists(std::filesystem::path(out) / "gt.txt"));
}

TEST_CASE("simulate, track, eval and mine chain end to end") {
  TempDir dir;
  const auto log = dir.file("log.txt").string();
  write_text(dir.file("scenario.json"),
             "{\"objects\": 8, \"frames\": 60, \"seed\": 11, "
             "\"embedding_noise\": 0.05, \"embedding_dim\": 32}");

  const std::string scene = (dir.path() / "scene").string();
  REQUIRE(run("simulate --scenario-config " +
                  dir.file("scenario.json").string() + " --out-dir " + scene,
              log) == 0);

  const std::string hyp = dir.file("hyp.txt").string();
  REQUIRE(run("track --dets " + scene + "/dets.txt --embs " + scene +
                  "/embeddings.jsonl --out " + hyp,
              log) == 0);
  CHECK(std::filesystem::exists(hyp + ".timing.json"));

  const std::string report = dir.file("eval.json").string();
  REQUIRE(run("eval --gt " + scene + "/gt.txt --hyp " + hyp + " --json " +
                  report,
              log) == 0);
  const nlohmann::json j = nlohmann::json::parse(read_text(report));
  CHECK(j.at("MOTA").get<double>() == 1.0);
  CHECK(j.at("IDs").get<std::int64_t>() == 0);
  CHECK(j.at("FP").get<std::int64_t>() == 0);
  CHECK(j.at("FN").get<std::int64_t>() == 0);
  // report keys mirror the metric table abbreviations
  for (const char* key : {"MOTA", "MOTP", "FP", "FN", "IDs", "P", "R", "MT",
                          "ML", "IDF1"}) {
    CHECK(j.contains(key));
  }

  REQUIRE(run("mine --labeled-embs " + scene + "/labeled.jsonl --seed 5", log) ==
          0);
  const std::string mine_text = read_text(log);
  CHECK(mine_text.find("triplets") != std::string::npos);
  CHECK(mine_text.find("mean loss") != std::string::npos);
  CHECK(mine_text.find("margin violations") != std::string::npos);
}

TEST_CASE("eval reproduces the swap fixture through the file interface") {
  TempDir dir;
  const auto log = dir.file("log.txt").string();
  std::string gt, hyp;
  for (int f = 1; f <= 10; ++f) {
    gt += std::to_string(f) + ",1,0,0,10,10,1,-1,-1,-1\n";
    gt += std::to_string(f) + ",2,100,100,10,10,1,-1,-1,-1\n";
    const int id_a = f <= 5 ? 7 : 8;
    const int id_b = f <= 5 ? 8 : 7;
    hyp += std::to_string(f) + "," + std::to_string(id_a) +
           ",0,0,10,10,1,-1,-1,-1\n";
    hyp += std::to_string(f) + "," + std::to_string(id_b) +
           ",100,100,10,10,1,-1,-1,-1\n";
  }
  write_text(dir.file("gt.txt"), gt);
  write_text(dir.file("hyp.txt"), hyp);
  const std::string report = dir.file("eval.json").string();
  REQUIRE(run("eval --gt " + dir.file("gt.txt").string() + " --hyp " +
                  dir.file("hyp.txt").string() + " --json " + report,
              log) == 0);
  const nlohmann::json j = nlohmann::json::parse(read_text(report));
  CHECK(j.at("IDs").get<std::int64_t>() == 2);
  CHECK(j.at("FP").get<std::int64_t>() == 0);
  CHECK(j.at("FN").get<std::int64_t>() == 0);
  CHECK(j.at("MOTA").get<double>() == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(j.at("MOTP").get<double>() == 100.0);
}

TEST_CASE("mine reports zero loss on a noise-free well-separated stream") {
  TempDir dir;
  const auto log = dir.file("log.txt").string();
  write_text(dir.file("scenario.json"),
             "{\"objects\": 8, \"frames\": 40, \"seed\": 12, "
             "\"embedding_noise\": 0.0, \"embedding_dim\": 64}");
  const std::string scene = (dir.path() / "scene").string();
  REQUIRE(run("simulate --scenario-config " +
                  dir.file("scenario.json").string() + " --out-dir " + scene,
              log) == 0);
  REQUIRE(run("mine --labeled-embs " + scene + "/labeled.jsonl --seed 5", log) ==
          0);
  const std::string text = read_text(log);
  CHECK(text.find("mean loss:          0.000000") != std::string::npos);
  CHECK(text.find("margin violations:  0.0000") != std::string::npos);
}

TEST_CASE("kitti format tracks end to end") {
  TempDir dir;
  const auto log = dir.file("log.txt").string();
  // two cars moving right, 20 frames, no occlusion
  std::string gt;
  for (int f = 0; f < 20; ++f) {
    const double x = 100.0 + 2.0 * f;
    gt += std::to_string(f) + " 1 Car 0 0 0 " + std::to_string(x) + " 100 " +
          std::to_string(x + 60.0) + " 150 1 1 1 0 0 0 0\n";
    gt += std::to_string(f) + " 2 Car 0 0 0 " + std::to_string(x + 200.0) +
          " 200 " + std::to_string(x + 250.0) + " 260 1 1 1 0 0 0 0\n";
  }
  write_text(dir.file("gt.txt"), gt);

  write_text(dir.file("beta0.json"), "{\"beta\": 0.0, \"alpha\": 1.0}");
  const std::string hyp = dir.file("hyp.txt").string();
  REQUIRE(run("track --format kitti --dets " + dir.file("gt.txt").string() +
                  " --out " + hyp + " --config " +
                  dir.file("beta0.json").string(),
              log) == 0);
  REQUIRE(run("eval --format kitti --gt " + dir.file("gt.txt").string() +
                  " --hyp " + hyp,
              log) == 0);
  const std::string text = read_text(log);
  CHECK(text.find("1.0000") != std::string::npos);  // MOTA column
}

TEST_CASE("simulate fans out scenes with incrementing seeds") {
  TempDir dir;
  const auto log = dir.file("log.txt").string();
  write_text(dir.file("scenario.json"),
             "{\"objects\": 4, \"frames\": 20, \"seed\": 100, "
             "\"embedding_dim\": 16}");
  const std::string out = (dir.path() / "scenes").string();
  REQUIRE(run("simulate --scenario-config " +
                  dir.file("scenario.json").string() + " --out-dir " + out +
                  " --scenes 3 --jobs 2",
              log) == 0);
  for (const char* scene : {"scene_000", "scene_001", "scene_002"}) {
    CHECK(std::filesystem::exists(std::filesystem::path(out) / scene / "gt.txt"));
  }
  // different seeds produce different ground truth
  const std::string a =
      read_text(std::filesystem::path(out) / "scene_000" / "gt.txt");
  const std::string b =
      read_text(std::filesystem::path(out) / "scene_001" / "gt.txt");
  CHECK(a != b);

  // missing mandatory seed is a config error
  write_text(dir.file("no_seed.json"), "{\"objects\": 4}");
  CHECK(run("simulate --scenario-config " + dir.file("no_seed.json").string() +
                " --out-dir " + out,
            log) == 1);
}

TEST_CASE("bench emits the sweep table and JSON") {
  TempDir dir;
  const auto log = dir.file("log.txt").string();
  const std::string json_path = dir.file("bench.json").string();
  REQUIRE(run("bench --tracks 8 --tracks 16 --dim 32 --frames 5 --repeats 3 "
              "--json " + json_path,
              log) == 0);
  const nlohmann::json j = nlohmann::json::parse(read_text(json_path));
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 2);
  CHECK(j[0].at("tracks") == 8);
  CHECK(j[1].at("tracks") == 16);
  for (const char* key : {"predict_ms", "matrix_ms", "solve_ms", "update_ms",
                          "step_ms", "step_p95_ms"}) {
    CHECK(j[0].contains(key));
  }
  const std::string text = read_text(log);
  CHECK(text.find("kernel backend") != std::string::npos);
}

}  // TEST_SUITE
