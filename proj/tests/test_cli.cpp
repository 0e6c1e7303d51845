#include <doctest.h>

#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "support.hpp"

using namespace xfid;
using json = nlohmann::json;

namespace {

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

struct Project {
  explicit Project(const std::string& endpoint = "http://127.0.0.1:9/v1/chat/completions") : dir("cli") {
    const auto r = test::run_command(std::string(XFID_FIXTURE_BIN) + " " + q(dir.path()) + " --prompt-dir " +
                                     q(XFID_PROMPT_DIR) + " --endpoint " + endpoint);
    REQUIRE(r.exit_code == 0);
  }

  test::CommandResult xfid(const std::string& args) const {
    return test::run_command(std::string(XFID_BIN) + " --config " + q(dir / "xfid.toml") + " " + args);
  }

  std::filesystem::path out(const std::string& name) const { return dir / "out" / name; }

  test::TempDir dir;
};

// Source text -> reference translation, read from the bilingual fixture.
std::map<std::string, std::string> reference_translations(const std::filesystem::path& corpus) {
  std::map<std::string, std::string> out;
  std::ifstream in(corpus);
  for (std::string line; std::getline(in, line);) {
    const json j = json::parse(line);
    if (j.contains("text_tgt") && j["text_tgt"].is_string()) out[j["text"]] = j["text_tgt"];
  }
  return out;
}

}  // namespace

TEST_CASE("cli usage errors") {
  CHECK(test::run_command(std::string(XFID_BIN)).exit_code != 0);
  CHECK(test::run_command(std::string(XFID_BIN) + " frobnicate").exit_code != 0);
  const auto missing = test::run_command(std::string(XFID_BIN) + " --config /nonexistent/xfid.toml ingest");
  CHECK(missing.exit_code == 1);
  CHECK(missing.err.find("/nonexistent/xfid.toml") != std::string::npos);
}

TEST_CASE("cosine without embeddings names the missing file") {
  Project p;
  REQUIRE(p.xfid("ingest").exit_code == 0);
  const auto r = p.xfid("cosine");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find(p.out("emb_src.bin").string()) != std::string::npos);
}

TEST_CASE("offline pipeline stages and parity determinism") {
  Project p;
  for (const char* stage : {"ingest", "embed", "cosine", "cka", "parity"}) {
    const auto r = p.xfid(stage);
    CHECK_MESSAGE(r.exit_code == 0, stage << ": " << r.err);
  }
  const std::string first = test::read_file(p.out("parity.csv"));
  CHECK(first.starts_with("# "));
  CHECK(p.xfid("parity").exit_code == 0);
  CHECK(test::read_file(p.out("parity.csv")) == first);
  CHECK(p.xfid("--seed 8 parity").exit_code == 0);
  CHECK(test::read_file(p.out("parity.csv")) != first);

  const auto report = p.xfid("report");
  CHECK(report.exit_code == 0);
  for (const char* name : {"prevalence_syn.md", "cosine_syn.md", "cka_syn.md", "parity_syn.md", "verdict_syn.md",
                           "parity_syn.csv", "verdict_syn.csv"}) {
    CHECK_MESSAGE(std::filesystem::exists(p.out("report") / name), name);
  }
  CHECK(report.out.find("verdict") != std::string::npos);
}

TEST_CASE("parity imports external fold metrics") {
  Project p;
  REQUIRE(p.xfid("ingest").exit_code == 0);
  std::string csv = "foundation,fold,en_auc,pl_auc\n";
  for (int i = 1; i <= 5; ++i) csv += "care," + std::to_string(i) + ",0.85,0.84\n";
  test::write_file(p.dir / "folds.csv", csv);
  auto r = p.xfid("parity --input " + q(p.dir / "folds.csv"));
  CHECK_MESSAGE(r.exit_code == 0, r.err);
  CHECK(test::read_file(p.out("parity.csv")).find("care") != std::string::npos);

  test::write_file(p.dir / "short.csv", "foundation,fold,en_auc,pl_auc\ncare,1,0.85,0.84\n");
  r = p.xfid("parity --input " + q(p.dir / "short.csv"));
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("MissingFolds") != std::string::npos);
}

TEST_CASE("translate and judge through a mock provider") {
  std::map<std::string, std::string> reference;
  test::MockChatServer server([&](const std::string& system, const std::string& user, int) {
    if (system.find("judge") != std::string::npos || user.starts_with("SOURCE:\n")) {
      return test::MockReply{200,
                             R"({"score": 9, "category": "clean", "dimensions": {"tone": 9, "slang": 9, "formatting": 10, "proper_nouns": 10}, "notes": ""})",
                             false, std::chrono::milliseconds(0)};
    }
    const auto it = reference.find(user);
    return test::MockReply{200, it == reference.end() ? "???" : it->second, false, std::chrono::milliseconds(0)};
  });
  Project p(server.endpoint());
  reference = reference_translations(p.dir / "corpus.jsonl");
  REQUIRE(reference.size() == 50);

  REQUIRE(p.xfid("--corpus " + q(p.dir / "corpus_en.jsonl") + " ingest").exit_code == 0);
  auto r = p.xfid("translate");
  CHECK_MESSAGE(r.exit_code == 0, r.err);
  CHECK(server.calls() == 50);
  const auto translated = test::read_file(p.out("translated.jsonl"));
  CHECK(translated.find("\"text_tgt\":null") == std::string::npos);

  // resumed run is served from the journal
  r = p.xfid("translate");
  CHECK(r.exit_code == 0);
  CHECK(server.calls() == 50);

  REQUIRE(p.xfid("sample").exit_code == 0);
  REQUIRE(p.xfid("translate --sample").exit_code == 0);
  r = p.xfid("judge");
  CHECK_MESSAGE(r.exit_code == 0, r.err);
  const json audit = json::parse(test::read_file(p.out("judge.json")));
  CHECK(audit.dump().find("\"clean\"") != std::string::npos);
}

TEST_CASE("unreachable provider exits with the transport code") {
  Project p("http://127.0.0.1:9/v1/chat/completions");
  std::string toml = test::read_file(p.dir / "xfid.toml");
  toml.replace(toml.find("max_retries = 3"), 15, "max_retries = 0");
  test::write_file(p.dir / "xfid.toml", toml);
  REQUIRE(p.xfid("--corpus " + q(p.dir / "corpus_en.jsonl") + " ingest").exit_code == 0);
  const auto r = p.xfid("--subcorpus everyday translate");
  CHECK(r.exit_code == 2);
  CHECK(std::filesystem::exists(p.out("translated_failures.jsonl")));
}
