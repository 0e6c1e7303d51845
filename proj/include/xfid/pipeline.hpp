#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "xfid/config.hpp"

namespace xfid {

/// Per-invocation options shared by the stages.
struct StageRequest {
  std::optional<std::string> subcorpus;          // restrict to one subcorpus
  std::optional<std::filesystem::path> input;    // override the stage's default input
  bool sample = false;                           // translate: work on sample.jsonl
};

struct StageResult {
  int exit_code = 0;  // 0, or 2 when some items failed in transport
  std::vector<std::filesystem::path> outputs;
  std::vector<std::string> messages;
};

/// The file-based stages. Each reads earlier artifacts from cfg.out_dir and
/// writes its own there; every output carries the config hash and seed.
///
///   ingest    corpus -> corpus.jsonl, prevalence.json
///   sample    corpus.jsonl -> sample.jsonl
///   translate sample.jsonl | corpus.jsonl -> sample_translated.jsonl | translated.jsonl
///   judge     sample_translated.jsonl -> verdicts.jsonl, judge.json
///   embed     translated.jsonl (else corpus.jsonl) -> emb_src.bin, emb_tgt.bin
///   cosine    embeddings -> cosine.json
///   cka       embeddings -> cka.json
///   parity    embeddings -> parity.csv, parity.json (or --input external folds)
///   report    all of the above that exist -> report/*.md, report/*.csv
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig cfg);

  const PipelineConfig& config() const { return cfg_; }
  std::filesystem::path artifact(const std::string& name) const { return cfg_.out_dir / name; }

  StageResult ingest(const StageRequest& req = {});
  StageResult sample(const StageRequest& req = {});
  StageResult translate(const StageRequest& req = {});
  StageResult judge(const StageRequest& req = {});
  StageResult embed(const StageRequest& req = {});
  StageResult cosine(const StageRequest& req = {});
  StageResult cka(const StageRequest& req = {});
  StageResult parity(const StageRequest& req = {});
  StageResult report(const StageRequest& req = {});

 private:
  PipelineConfig cfg_;
  FileProvenance provenance_;
};

}  // namespace xfid
