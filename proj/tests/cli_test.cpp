#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path& work_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "infrank_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = "cd '" + work_dir().string() + "' && '" INFRANK_BIN "' " + args + " >out.txt 2>err.txt";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const std::string kQuick =
    "--n-influencers 30 --n-windows 4 --hidden-dim 4 --epochs 2 --list-size 4 --lists-per-batch 4 --history 2";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit with 1") {
    CHECK(run("") == 1);
    CHECK(run("frobnicate") == 1);
    CHECK(run("ablate not-a-variant --out-dir u") == 1);
    CHECK(run("sweep sideways --out-dir u") == 1);
    CHECK(run("eval --scores tarot") == 1);
    CHECK(run("train --epochs minus-one") == 1);
  }

  TEST_CASE("missing inputs exit with 2") {
    CHECK(run("train --out-dir nowhere " + kQuick) == 2);
    CHECK(run("eval --out-dir nowhere") == 2);
    CHECK(run("generate --config missing.json") != 0);
    CHECK(slurp(work_dir() / "err.txt").find("missing.json") != std::string::npos);
  }

  TEST_CASE("bad config files") {
    std::ofstream(work_dir() / "bad.json") << R"({"train":{"epochz":3}})";
    CHECK(run("generate --config bad.json") == 1);
    CHECK(slurp(work_dir() / "err.txt").find("epochz") != std::string::npos);
    std::ofstream(work_dir() / "good.json") << R"({"out_dir":"fromfile","world":{"n_influencers":30,"n_windows":4}})";
    CHECK(run("generate --config good.json") == 0);
    CHECK(fs::exists(work_dir() / "fromfile" / "data" / "posts.jsonl"));
  }

  TEST_CASE("generate, train, eval") {
    CHECK(run("generate --out-dir r " + kQuick) == 0);
    CHECK(run("train --out-dir r " + kQuick) == 0);
    CHECK(fs::exists(work_dir() / "r" / "model.ckpt"));
    CHECK(run("eval --out-dir r " + kQuick) == 0);
    const auto report = slurp(work_dir() / "r" / "report.csv");
    CHECK(report.rfind("# config=", 0) == 0);
    CHECK(run("eval --scores followers --out-dir r " + kQuick) == 0);
  }

  TEST_CASE("gradcheck") {
    CHECK(run("gradcheck") == 0);
    CHECK(slurp(work_dir() / "out.txt").find("passed") != std::string::npos);
    CHECK(run("gradcheck --corrupt-gradient") == 3);
  }
}
