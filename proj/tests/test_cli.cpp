#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("numeracy_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Runs the CLI with `args` (already shell-quoted where needed).
Outcome cli(const std::string& args) {
  const fs::path out = scratch() / "stdout.txt";
  const std::string cmd = std::string("\"") + NUMERACY_CLI + "\" " + args + " > \"" + out.string() + "\" 2> \"" +
                          (scratch() / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  Outcome o;
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.out = slurp(out);
  return o;
}

std::string at(const std::string& name) { return "\"" + (scratch() / name).string() + "\""; }

}  // namespace

TEST_CASE("encode and decode") {
  Outcome o = cli("encode --scheme 10e 832");
  CHECK(o.code == 0);
  CHECK(o.out == "8 10e2 3 10e1 2 10e0\n");
  o = cli("encode --scheme words 832");
  CHECK(o.out == "eight hundred thirty-two\n");
  o = cli("encode --scheme fixedchar --max-digits 4 832");
  CHECK(o.out == "0 8 3 2\n");
  o = cli("encode --scheme 10e -- -165");
  CHECK(o.out == "- 1 10e2 6 10e1 5 10e0\n");
  o = cli("decode --scheme 10e \"8 10e2 3 10e1 2 10e0\"");
  CHECK(o.code == 0);
  CHECK(o.out == "832\n");
  o = cli("encode --json --scheme 10 832");
  CHECK(nlohmann::json::parse(o.out)[0]["wire"] == "8 100 3 10 2");
}

TEST_CASE("exit codes") {
  CHECK(cli("encode --no-such-flag 1").code == 2);
  CHECK(cli("frobnicate").code == 2);
  CHECK(cli("encode --scheme words --base 19 5").code == 3);
  CHECK(cli("encode --scheme 10e --max-digits 4 5").code == 3);
  CHECK(cli("eval --gold /nonexistent/gold.jsonl --pred /nonexistent/p.jsonl").code == 4);
  CHECK(cli("decode --scheme 10e \"9 10e2 9 10e0\"").code == 5);
  CHECK(cli("encode 12x").code == 5);
  {
    std::ofstream bad(scratch() / "bad.jsonl");
    bad << "{\"question\": \n";
  }
  CHECK(cli("eval --gold " + at("bad.jsonl") + " --pred " + at("bad.jsonl")).code == 5);
}

TEST_CASE("gen is deterministic and replays from its config echo") {
  REQUIRE(cli("gen --preset figure2-smoke --scheme 10e --seed 1 --out " + at("a.jsonl")).code == 0);
  REQUIRE(cli("gen --preset figure2-smoke --scheme 10e --seed 1 --out " + at("b.jsonl")).code == 0);
  CHECK(slurp(scratch() / "a.train.jsonl") == slurp(scratch() / "b.train.jsonl"));
  CHECK(slurp(scratch() / "a.test.jsonl") == slurp(scratch() / "b.test.jsonl"));
  const auto manifest = nlohmann::json::parse(slurp(scratch() / "a.train.manifest.json"));
  CHECK(manifest["count"] == 7290);

  // Replaying the echo, with the output redirected, yields the same bytes.
  auto echo = nlohmann::json::parse(slurp(scratch() / "a.config.json"));
  echo["options"]["out"] = (scratch() / "c.jsonl").string();
  {
    std::ofstream f(scratch() / "replay.json");
    f << echo.dump();
  }
  REQUIRE(cli("gen --config " + at("replay.json")).code == 0);
  CHECK(slurp(scratch() / "c.train.jsonl") == slurp(scratch() / "a.train.jsonl"));
  // Flags given after --config override it.
  REQUIRE(cli("gen --config " + at("replay.json") + " --seed 2").code == 0);
  CHECK(slurp(scratch() / "c.train.jsonl") != slurp(scratch() / "a.train.jsonl"));
}

TEST_CASE("eval, train and infer") {
  REQUIRE(cli("gen --scheme char --method balanced --max-digits 2 --count 40 --seed 3 --out " + at("g.jsonl")).code ==
          0);
  // Gold answers as predictions score 1.0.
  {
    std::ifstream in(scratch() / "g.jsonl");
    std::ofstream out(scratch() / "perfect.jsonl");
    std::string line;
    for (std::size_t i = 0; std::getline(in, line); ++i) {
      const auto j = nlohmann::json::parse(line);
      out << nlohmann::json{{"index", i}, {"prediction", j["answer"]}}.dump() << "\n";
    }
  }
  Outcome o = cli("eval --json --gold " + at("g.jsonl") + " --pred " + at("perfect.jsonl") + " --csv " +
                  at("perfect.csv"));
  REQUIRE(o.code == 0);
  CHECK(nlohmann::json::parse(o.out)["overall_accuracy"] == 1.0);
  CHECK(slurp(scratch() / "perfect.csv").rfind("length,count,correct,accuracy", 0) == 0);
  o = cli("eval --json --gold " + at("g.jsonl") + " --pred " + at("perfect.jsonl") + " --pred " +
          at("perfect.jsonl"));
  REQUIRE(o.code == 0);
  CHECK(o.out.find("half_width") != std::string::npos);

  o = cli("train --quiet --json --train " + at("g.jsonl") + " --test " + at("g.jsonl") + " --out " + at("m.bin") +
          " --width 16 --heads 2 --ff 32 --layers 1 --epochs 1");
  REQUIRE(o.code == 0);
  const auto summary = nlohmann::json::parse(o.out);
  CHECK(summary["epoch"] == 1);
  CHECK(fs::exists(scratch() / "m.log.csv"));
  CHECK(fs::exists(scratch() / "m.config.json"));
  CHECK(cli("train --quiet --train " + at("g.jsonl") + " --out " + at("m2.bin") + " --width 30 --heads 4").code == 3);

  REQUIRE(cli("infer --checkpoint " + at("m.bin") + " --data " + at("g.jsonl") + " --max-len 4 --out " +
              at("p.jsonl"))
              .code == 0);
  o = cli("eval --json --gold " + at("g.jsonl") + " --pred " + at("p.jsonl"));
  REQUIRE(o.code == 0);
  CHECK(nlohmann::json::parse(o.out)["n"] == 40);
  CHECK(cli("infer --checkpoint " + at("g.jsonl") + " --question \"What is 1 plus 1 ?\"").code == 5);
}

TEST_CASE("analyze") {
  const Outcome o = cli("analyze --json \"1 10e2 1 10e0\"");
  REQUIRE(o.code == 0);
  const auto j = nlohmann::json::parse(o.out);
  CHECK(j.dump().find("missing_exponents") != std::string::npos);
  fs::remove_all(scratch());
}
