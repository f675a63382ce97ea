#include "doctest.h"
#include "oracles.hpp"

#include "cli.hpp"
#include "streammvc/error.hpp"
#include "streammvc/harness.hpp"
#include "streammvc/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

using namespace smvc;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("streammvc_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Result {
  int code;
  std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ConsensusState small_state(std::uint64_t seed) {
  SyntheticSpec spec;
  spec.n = 30;
  spec.k = 3;
  spec.dims = {5, 4};
  spec.seed = seed;
  auto [views, p] = apply_missing(generate_synthetic(spec).views, 0.2, seed);
  return run_stream(views, 3);
}

}  // namespace

TEST_CASE("format_double round-trips") {
  std::mt19937_64 rng(1);
  const Matrix vals = oracle::gaussian(1, 200, rng, 1e3);
  for (Index i = 0; i < vals.cols(); ++i) CHECK(std::stod(io::format_double(vals(0, i))) == vals(0, i));
  CHECK(io::format_double(0.5) == "0.5");
}

TEST_CASE("view and label files round-trip") {
  TempDir dir;
  ViewBatch v;
  v.data = Matrix(2, 3);
  v.data << 1.5, -2, 1e-300, 0.1, 3, 7;
  v.ids = {"a", "b", "c"};
  io::write_view(dir / "v.csv", v);
  const ViewBatch back = io::read_view(dir / "v.csv", 4);
  CHECK(back.data == v.data);
  CHECK(back.ids == v.ids);
  CHECK(back.view_index == 4);

  io::write_text(dir / "l.csv", "id,label\nx,7\ny,3\nz,7\n");
  const LabeledSamples l = io::read_labels(dir / "l.csv");
  CHECK(l.truth.labels == std::vector<int>{0, 1, 0});
  CHECK(l.truth.k == 2);

  io::write_text(dir / "bad.csv", "id,f0\na,1\na,2\n");
  CHECK_THROWS_AS(io::read_view(dir / "bad.csv"), Error);
  io::write_text(dir / "nan.csv", "id,f0\na,nan\n");
  CHECK_THROWS_AS(io::read_view(dir / "nan.csv"), Error);
  io::write_text(dir / "ragged.csv", "id,f0,f1\na,1\n");
  CHECK_THROWS_AS(io::read_view(dir / "ragged.csv"), DataError);
}

TEST_CASE("checkpoint round-trip is bit-exact") {
  TempDir dir;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ConsensusState s = small_state(seed);
    io::save_checkpoint(dir / "c.json", s);
    const ConsensusState back = io::load_checkpoint(dir / "c.json");
    CHECK(back.z == s.z);
    CHECK(back.registry == s.registry);
    CHECK(back.k == s.k);
    CHECK(back.views_seen == s.views_seen);
  }
}

TEST_CASE("corrupt checkpoints are rejected") {
  TempDir dir;
  const ConsensusState s = small_state(3);
  io::save_checkpoint(dir / "c.json", s);
  const std::string good = slurp(dir / "c.json");

  SUBCASE("truncated file exits 3 and is left untouched") {
    io::write_text(dir / "t.json", good.substr(0, good.size() / 2));
    const std::string before = slurp(dir / "t.json");
    ViewBatch v;
    v.data = Matrix::Ones(5, 2);
    v.ids = {"s0", "s1"};
    io::write_view(dir / "v.csv", v);
    const Result r = run_cli({"resume", "--checkpoint", dir / "t.json", dir / "v.csv"});
    CHECK(r.code == 3);
    CHECK(json::parse(r.err)["kind"] == "data");
    CHECK(slurp(dir / "t.json") == before);
  }
  SUBCASE("version mismatch") {
    json doc = json::parse(good);
    doc["format_version"] = io::kCheckpointVersion + 1;
    CHECK_THROWS_AS(io::checkpoint_from_json(doc), DataError);
  }
  SUBCASE("non-orthonormal Z") {
    json doc = json::parse(good);
    doc["z"][0] = 5.0;
    CHECK_THROWS_AS(io::checkpoint_from_json(doc), DataError);
  }
  SUBCASE("missing field") {
    json doc = json::parse(good);
    doc.erase("ids");
    CHECK_THROWS_AS(io::checkpoint_from_json(doc), DataError);
  }
}

TEST_CASE("cli synth is deterministic") {
  TempDir dir;
  const auto args = [&](const std::string& sub) {
    return std::vector<std::string>{"synth", "--n", "40", "--k", "2", "--views", "2", "--dims", "3,4", "--seed", "9",
                                    "--out-dir", dir / sub};
  };
  REQUIRE(run_cli(args("a")).code == 0);
  REQUIRE(run_cli(args("b")).code == 0);
  for (const char* f : {"view_1.csv", "view_2.csv", "labels.csv"}) {
    CHECK(slurp(dir / (std::string("a/") + f)) == slurp(dir / (std::string("b/") + f)));
  }
  CHECK(run_cli({"synth", "--n", "10", "--k", "0"}).code == 2);
  CHECK(run_cli({"synth", "--n", "10", "--k", "2", "--views", "2", "--dims", "3,4,5", "--out-dir", dir / "c"}).code == 2);
}

TEST_CASE("cli corrupt") {
  TempDir dir;
  REQUIRE(run_cli({"synth", "--n", "10", "--k", "2", "--views", "3", "--dims", "3", "--out-dir", dir / "d"}).code == 0);
  const std::vector<std::string> views{dir / "d/view_1.csv", dir / "d/view_2.csv", dir / "d/view_3.csv"};

  std::vector<std::string> zero{"corrupt", "--ratio", "0", "--out-dir", dir / "z"};
  zero.insert(zero.end(), views.begin(), views.end());
  REQUIRE(run_cli(zero).code == 0);
  for (int t = 1; t <= 3; ++t) {
    const std::string f = "view_" + std::to_string(t) + ".csv";
    CHECK(slurp(dir / ("z/" + f)) == slurp(dir / ("d/" + f)));
  }

  std::vector<std::string> some{"corrupt", "--ratio", "0.3", "--seed", "4", "--out-dir", dir / "s"};
  some.insert(some.end(), views.begin(), views.end());
  REQUIRE(run_cli(some).code == 0);
  const json manifest = json::parse(slurp(dir / "s/manifest.json"));
  REQUIRE(manifest["views"].size() == 3);
  for (const auto& v : manifest["views"]) CHECK(v["dropped"].size() == 3);
  CHECK(io::read_view(dir / "s/view_2.csv").ids.size() == 7);

  std::vector<std::string> bad{"corrupt", "--ratio", "0.9", "--out-dir", dir / "x"};
  bad.insert(bad.end(), views.begin(), views.end());
  CHECK(run_cli(bad).code == 2);
}

TEST_CASE("cli run then resume equals a single run") {
  TempDir dir;
  REQUIRE(run_cli({"synth", "--n", "60", "--k", "3", "--views", "3", "--dims", "4,5,6", "--seed", "2", "--out-dir",
               dir / "d"})
              .code == 0);
  std::vector<std::string> corrupt{"corrupt", "--ratio", "0.2", "--seed", "1", "--out-dir", dir / "c"};
  for (int t = 1; t <= 3; ++t) corrupt.push_back(dir / ("d/view_" + std::to_string(t) + ".csv"));
  REQUIRE(run_cli(corrupt).code == 0);
  const std::string v1 = dir / "c/view_1.csv", v2 = dir / "c/view_2.csv", v3 = dir / "c/view_3.csv";

  REQUIRE(run_cli({"run", "--k", "3", "--out-dir", dir / "full", "--checkpoint", dir / "full.json", v1, v2, v3}).code == 0);
  REQUIRE(run_cli({"run", "--k", "3", "--out-dir", dir / "part", "--checkpoint", dir / "part.json", v1, v2}).code == 0);
  const Result r = run_cli({"resume", "--checkpoint", dir / "part.json", "--out", dir / "resumed.json", "--labels",
                        dir / "resumed_labels.csv", v3});
  REQUIRE(r.code == 0);

  const ConsensusState full = io::load_checkpoint(dir / "full.json");
  const ConsensusState resumed = io::load_checkpoint(dir / "resumed.json");
  CHECK(full.z == resumed.z);
  CHECK(full.registry == resumed.registry);
  CHECK(slurp(dir / "full/labels.csv") == slurp(dir / "resumed_labels.csv"));

  const json diag = json::parse(slurp(dir / "full/diagnostics.json"));
  CHECK(diag["status"] == "ok");
  CHECK(diag["views"].size() == 3);

  const Result ev = run_cli({"eval", "--labels", dir / "full/labels.csv", "--truth", dir / "d/labels.csv"});
  REQUIRE(ev.code == 0);
  CHECK(json::parse(ev.out)["acc"].get<double>() == 1.0);

  CHECK(run_cli({"run", "--k", "0", v1}).code == 2);
  CHECK(run_cli({"run", "--k", "3", "--out-dir", dir / "wrong", v1, v1}).code == 0);
  CHECK(run_cli({"run", "--k", "50", "--out-dir", dir / "big", v1}).code == 2);
  CHECK(json::parse(slurp(dir / "big/diagnostics.json"))["status"] == "error");
}

TEST_CASE("cli eval") {
  TempDir dir;
  io::write_text(dir / "t.csv", "id,label\na,0\nb,0\nc,1\nd,1\n");
  io::write_text(dir / "p.csv", "id,label\nd,5\nc,5\nb,2\na,2\n");
  io::write_text(dir / "q.csv", "id,label\na,0\nb,0\nc,1\ne,1\n");
  const Result same = run_cli({"eval", "--labels", dir / "t.csv", "--truth", dir / "t.csv"});
  REQUIRE(same.code == 0);
  const json m = json::parse(same.out);
  for (const char* key : {"acc", "nmi", "purity", "fscore"}) CHECK(m[key].get<double>() == doctest::Approx(1.0));

  const Result perm = run_cli({"eval", "--labels", dir / "p.csv", "--truth", dir / "t.csv", "--format", "json"});
  REQUIRE(perm.code == 0);
  CHECK(json::parse(perm.out)["acc"].get<double>() == 1.0);

  const Result bad = run_cli({"eval", "--labels", dir / "q.csv", "--truth", dir / "t.csv"});
  CHECK(bad.code == 3);
  CHECK(bad.err.find("d") != std::string::npos);
  CHECK(bad.err.find("e") != std::string::npos);
}

TEST_CASE("cli bench modes") {
  TempDir dir;
  const Result ratio = run_cli({"bench", "--mode", "ratio", "--n", "60", "--k", "2", "--reps", "2", "--ratios", "0,0.3",
                            "--restarts", "2", "--dims", "4", "--out-dir", dir / "r"});
  REQUIRE(ratio.code == 0);
  CHECK(json::parse(slurp(dir / "r/summary.json"))["ratios"].size() == 2);

  const Result order = run_cli({"bench", "--mode", "order", "--n", "60", "--k", "2", "--perms", "3", "--restarts", "2",
                            "--dims", "4", "--out-dir", dir / "o"});
  REQUIRE(order.code == 0);
  CHECK(json::parse(slurp(dir / "o/summary.json"))["orders"] == 3);

  const Result scale = run_cli({"bench", "--mode", "scale", "--ns", "100,200", "--scale-k", "2", "--scale-d", "4",
                            "--iters", "2", "--repeats", "1", "--out-dir", dir / "s"});
  REQUIRE(scale.code == 0);
  CHECK(json::parse(slurp(dir / "s/summary.json"))["points"].size() == 2);

  CHECK(run_cli({"bench", "--mode", "nope"}).code == 2);
}
