#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace xfid {

struct FixtureOptions {
  std::uint64_t seed = 7;
  std::size_t dim = 16;
  std::string prompt_dir = "../../prompts";  // as written into xfid.toml
  std::string provider_endpoint = "http://127.0.0.1:18080/v1/chat/completions";
};

/// Writes a small synthetic bilingual corpus into dir:
///   corpus.jsonl     50 posts (26 reddit "everyday", 24 twitter "blm") with text_tgt
///   corpus_en.jsonl  the same posts without text_tgt
///   embeddings.jsonl text -> vector table covering every text_src and text_tgt
///   xfid.toml        a config using the table backend
/// Labels follow a fixed arithmetic pattern; embeddings carry one direction
/// per foundation plus noise, and targets are sources plus smaller noise.
void write_synthetic_fixture(const std::filesystem::path& dir, const FixtureOptions& options = {});

}  // namespace xfid
