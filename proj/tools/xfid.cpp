#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "xfid/config.hpp"
#include "xfid/error.hpp"
#include "xfid/pipeline.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kTransport = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Validate machine-translated annotated corpora"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path = "xfid.toml";
  std::optional<std::string> corpus;
  std::optional<std::string> subcorpus;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> input;
  bool sample = false;

  app.add_option("--config", config_path, "TOML config file")->capture_default_str();
  app.add_option("--corpus", corpus, "corpus file (overrides corpus.path)");
  app.add_option("--subcorpus", subcorpus, "restrict the stage to one subcorpus");
  app.add_option("--seed", seed, "random seed (overrides run.seed)");
  app.add_option("--out", out, "output directory (overrides run.out)");

  const std::pair<const char*, const char*> stages[] = {
      {"ingest", "load and validate the corpus; write corpus.jsonl and prevalence"},
      {"sample", "stratified judge sample per subcorpus"},
      {"translate", "translate posts through the chat provider"},
      {"judge", "audit translated sample with the LLM judge"},
      {"embed", "embed source and target texts"},
      {"cosine", "pairwise cross-lingual cosine statistics"},
      {"cka", "linear CKA between embedding spaces"},
      {"parity", "classifier parity with paired t-tests"},
      {"report", "render tables and the verdict"},
  };
  for (const auto& [stage_name, help] : stages) {
    CLI::App* sub = app.add_subcommand(stage_name, help);
    if (std::string_view(stage_name) == "translate") {
      sub->add_flag("--sample", sample, "translate sample.jsonl instead of the full corpus");
    }
    if (std::string_view(stage_name) != "report" && std::string_view(stage_name) != "cosine" &&
        std::string_view(stage_name) != "cka" && std::string_view(stage_name) != "ingest") {
      sub->add_option("--input", input, "stage input file (parity: external per-fold metrics CSV)");
    }
  }

  CLI11_PARSE(app, argc, argv);
  const std::string stage = app.get_subcommands().front()->get_name();

  try {
    xfid::PipelineConfig cfg = xfid::load_config(config_path);
    if (corpus) cfg.corpus_path = std::filesystem::absolute(*corpus).lexically_normal();
    if (seed) cfg.seed = *seed;
    if (out) cfg.out_dir = std::filesystem::absolute(*out).lexically_normal();
    if (stage == "ingest") xfid::validate_paths(cfg);

    xfid::StageRequest req;
    req.subcorpus = subcorpus;
    if (input) req.input = std::filesystem::absolute(*input).lexically_normal();
    req.sample = sample;

    xfid::Pipeline pipeline(std::move(cfg));
    xfid::StageResult result;
    if (stage == "ingest") result = pipeline.ingest(req);
    else if (stage == "sample") result = pipeline.sample(req);
    else if (stage == "translate") result = pipeline.translate(req);
    else if (stage == "judge") result = pipeline.judge(req);
    else if (stage == "embed") result = pipeline.embed(req);
    else if (stage == "cosine") result = pipeline.cosine(req);
    else if (stage == "cka") result = pipeline.cka(req);
    else if (stage == "parity") result = pipeline.parity(req);
    else result = pipeline.report(req);

    for (const auto& m : result.messages) fmt::print(stderr, "{}: {}\n", stage, m);
    for (const auto& p : result.outputs) fmt::print("{}\n", p.string());
    return result.exit_code;
  } catch (const xfid::Error& e) {
    fmt::print(stderr, "xfid {}: {}\n", stage, e.what());
    return e.is_transport() ? kTransport : kValidation;
  } catch (const std::exception& e) {
    fmt::print(stderr, "xfid {}: {}\n", stage, e.what());
    return kValidation;
  }
  return kOk;
}
