#include "xfid/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>
#include <toml.hpp>

#include "http_util.hpp"
#include "xfid/error.hpp"

#ifndef XFID_DEFAULT_PROMPT_DIR
#define XFID_DEFAULT_PROMPT_DIR "prompts"
#endif

namespace xfid {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& message) {
  throw Error(ErrorCode::ConfigError, field + ": " + message);
}

/// Typed reads from one TOML table with field-path error messages.
class Section {
 public:
  Section(const toml::table& root, std::string name, std::set<std::string> allowed) : name_(std::move(name)) {
    const toml::node* node = root.get(name_);
    if (!node) return;
    table_ = node->as_table();
    if (!table_) fail(name_, "expected a table");
    for (const auto& [key, value] : *table_) {
      if (!allowed.contains(std::string(key.str()))) fail(name_ + "." + std::string(key.str()), "unknown key");
    }
  }

  const toml::node* find(const std::string& key) const { return table_ ? table_->get(key) : nullptr; }
  std::string path(const std::string& key) const { return name_ + "." + key; }

  void read(const std::string& key, std::string& out) const {
    if (const auto* n = find(key)) {
      auto v = n->value<std::string>();
      if (!n->is_string() || !v) fail(path(key), "expected a string");
      out = *v;
    }
  }

  void read(const std::string& key, std::int64_t& out) const {
    if (const auto* n = find(key)) {
      if (!n->is_integer()) fail(path(key), "expected an integer");
      out = *n->value<std::int64_t>();
    }
  }

  void read(const std::string& key, double& out) const {
    if (const auto* n = find(key)) {
      if (!n->is_number()) fail(path(key), "expected a number");
      out = *n->value<double>();
    }
  }

  template <typename T>
  void read_count(const std::string& key, T& out, std::int64_t min) const {
    std::int64_t v = static_cast<std::int64_t>(out);
    read(key, v);
    if (v < min) fail(path(key), fmt::format("must be >= {}", min));
    out = static_cast<T>(v);
  }

  void read_path(const std::string& key, std::filesystem::path& out, const std::filesystem::path& base) const {
    std::string s;
    read(key, s);
    if (find(key)) {
      if (s.empty()) fail(path(key), "must not be empty");
      out = base / s;
    }
  }

  void read_ms(const std::string& key, std::chrono::milliseconds& out, double unit_ms) const {
    double v = static_cast<double>(out.count()) / unit_ms;
    read(key, v);
    if (!(v >= 0)) fail(path(key), "must be >= 0");
    out = std::chrono::milliseconds(static_cast<std::int64_t>(v * unit_ms + 0.5));
  }

 private:
  std::string name_;
  const toml::table* table_ = nullptr;
};

std::string rel(const std::filesystem::path& p, const std::filesystem::path& base) {
  if (p.empty()) return "";
  return p.lexically_relative(base).generic_string();
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::Io, "SHA-256 failed");
  }
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw Error(ErrorCode::ConfigError,
                fmt::format("line {}: {}", e.source().begin.line, e.description()));
  }
  const std::set<std::string> sections{"run", "corpus", "sample", "embedding", "provider",
                                       "policy", "parity", "thresholds"};
  for (const auto& [key, value] : root) {
    if (!sections.contains(std::string(key.str()))) fail(std::string(key.str()), "unknown section");
  }

  PipelineConfig cfg;
  cfg.base_dir = base_dir;
  cfg.prompt_dir = XFID_DEFAULT_PROMPT_DIR;

  const Section run(root, "run", {"seed", "out", "corpus_name"});
  std::int64_t seed = 0;
  run.read("seed", seed);
  if (seed < 0) fail("run.seed", "must be >= 0");
  cfg.seed = static_cast<std::uint64_t>(seed);
  run.read_path("out", cfg.out_dir, base_dir);
  if (!run.find("out")) cfg.out_dir = base_dir / "out";
  run.read("corpus_name", cfg.corpus_name);
  if (cfg.corpus_name.empty() || cfg.corpus_name.find_first_of("/\\") != std::string::npos) {
    fail("run.corpus_name", "must be a non-empty file-name-safe tag");
  }

  const Section corpus(root, "corpus", {"path", "format"});
  corpus.read_path("path", cfg.corpus_path, base_dir);
  std::string format = "jsonl";
  corpus.read("format", format);
  auto parsed_format = parse_corpus_format(format);
  if (!parsed_format) fail("corpus.format", "expected jsonl or csv");
  cfg.corpus_format = *parsed_format;

  const Section sample(root, "sample", {"size"});
  sample.read_count("size", cfg.sample_size, 1);

  const Section emb(root, "embedding",
                    {"backend", "endpoint", "path", "batch_size", "timeout_s", "token_env", "max_concurrent"});
  std::string backend = "table";
  emb.read("backend", backend);
  if (backend == "http") {
    cfg.embedding_backend = EmbeddingBackendKind::http;
  } else if (backend == "table") {
    cfg.embedding_backend = EmbeddingBackendKind::table;
  } else {
    fail("embedding.backend", "expected http or table");
  }
  emb.read("endpoint", cfg.embedding.endpoint);
  emb.read_path("path", cfg.embedding_table, base_dir);
  emb.read_count("batch_size", cfg.embedding.batch_size, 1);
  emb.read_ms("timeout_s", cfg.embedding.timeout, 1000.0);
  emb.read("token_env", cfg.embedding.token_env);
  emb.read_count("max_concurrent", cfg.embedding.max_concurrent, 1);
  if (cfg.embedding_backend == EmbeddingBackendKind::http) {
    if (cfg.embedding.endpoint.empty()) fail("embedding.endpoint", "required when backend = \"http\"");
    try {
      detail::split_url(cfg.embedding.endpoint);
    } catch (const Error& e) {
      fail("embedding.endpoint", e.detail());
    }
  } else if (cfg.embedding_table.empty()) {
    fail("embedding.path", "required when backend = \"table\"");
  }

  const Section prov(root, "provider", {"endpoint", "model", "token_env", "temperature", "timeout_s", "prompt_dir"});
  prov.read("endpoint", cfg.provider.endpoint);
  if (!cfg.provider.endpoint.empty()) {
    try {
      detail::split_url(cfg.provider.endpoint);
    } catch (const Error& e) {
      fail("provider.endpoint", e.detail());
    }
  }
  prov.read("model", cfg.provider.model);
  prov.read("token_env", cfg.provider.token_env);
  prov.read("temperature", cfg.translate_temperature);
  if (cfg.translate_temperature < 0 || cfg.translate_temperature > 2) fail("provider.temperature", "must be in [0, 2]");
  prov.read_ms("timeout_s", cfg.provider.timeout, 1000.0);
  prov.read_path("prompt_dir", cfg.prompt_dir, base_dir);

  const Section pol(root, "policy",
                    {"max_in_flight", "max_retries", "initial_backoff_ms", "multiplier", "jitter", "max_backoff_ms"});
  pol.read_count("max_in_flight", cfg.policy.max_in_flight, 1);
  pol.read_count("max_retries", cfg.policy.max_retries, 0);
  pol.read_ms("initial_backoff_ms", cfg.policy.initial_backoff, 1.0);
  pol.read("multiplier", cfg.policy.multiplier);
  pol.read("jitter", cfg.policy.jitter);
  pol.read_ms("max_backoff_ms", cfg.policy.max_backoff, 1.0);
  cfg.policy.timeout = cfg.provider.timeout;
  try {
    cfg.policy.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.detail());
  }

  const Section par(root, "parity", {"k", "l2_lambda", "max_iters", "tol", "threshold"});
  par.read_count("k", cfg.k, 2);
  par.read("l2_lambda", cfg.logistic.l2_lambda);
  if (cfg.logistic.l2_lambda < 0) fail("parity.l2_lambda", "must be >= 0");
  par.read_count("max_iters", cfg.logistic.max_iters, 1);
  par.read("tol", cfg.logistic.tol);
  if (!(cfg.logistic.tol > 0)) fail("parity.tol", "must be > 0");
  par.read("threshold", cfg.parity_threshold);

  const Section thr(root, "thresholds", {"cosine", "gap", "clean"});
  thr.read("cosine", cfg.thresholds.cosine);
  thr.read("gap", cfg.thresholds.gap);
  thr.read("clean", cfg.thresholds.clean);
  if (cfg.thresholds.clean < 0 || cfg.thresholds.clean > 100) fail("thresholds.clean", "must be in [0, 100]");
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigError, "config: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  auto base = std::filesystem::absolute(path).parent_path().lexically_normal();
  return parse_config(buf.str(), base);
}

void validate_paths(const PipelineConfig& cfg) {
  if (!cfg.corpus_path.empty() && !std::filesystem::exists(cfg.corpus_path)) {
    fail("corpus.path", "file not found: " + cfg.corpus_path.string());
  }
  if (cfg.embedding_backend == EmbeddingBackendKind::table && !std::filesystem::exists(cfg.embedding_table)) {
    fail("embedding.path", "file not found: " + cfg.embedding_table.string());
  }
}

std::string PipelineConfig::canonical() const {
  json j;
  j["run"] = {{"seed", seed}, {"corpus_name", corpus_name}};
  j["corpus"] = {{"path", rel(corpus_path, base_dir)},
                 {"format", corpus_format == CorpusFormat::jsonl ? "jsonl" : "csv"}};
  j["sample"] = {{"size", sample_size}};
  j["embedding"] = {{"backend", embedding_backend == EmbeddingBackendKind::http ? "http" : "table"},
                    {"endpoint", embedding.endpoint},
                    {"path", rel(embedding_table, base_dir)},
                    {"batch_size", embedding.batch_size}};
  j["provider"] = {{"endpoint", provider.endpoint},
                   {"model", provider.model},
                   {"temperature", translate_temperature}};
  j["policy"] = {{"max_retries", policy.max_retries}};
  j["parity"] = {{"k", k},
                 {"l2_lambda", logistic.l2_lambda},
                 {"max_iters", logistic.max_iters},
                 {"tol", logistic.tol},
                 {"threshold", parity_threshold}};
  j["thresholds"] = {{"cosine", thresholds.cosine}, {"gap", thresholds.gap}, {"clean", thresholds.clean}};
  return j.dump();
}

std::string PipelineConfig::hash() const { return sha256_hex(canonical()); }

}  // namespace xfid
