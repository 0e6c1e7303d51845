#include "xfid/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "xfid/artifact_checks.hpp"
#include "xfid/error.hpp"
#include "xfid/judge.hpp"
#include "xfid/parity.hpp"
#include "xfid/prompts.hpp"
#include "xfid/report.hpp"
#include "xfid/rng.hpp"
#include "xfid/similarity.hpp"

namespace xfid {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

json meta_of(const FileProvenance& p) { return {{"config_hash", p.config_hash}, {"seed", p.seed}}; }

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

void write_json(const fs::path& path, json body, const FileProvenance& p) {
  body["_meta"] = meta_of(p);
  write_file(path, body.dump(2) + "\n");
}

void require_file(const fs::path& path, std::string_view what) {
  if (!fs::exists(path)) {
    throw Error(ErrorCode::ConfigError, fmt::format("{} not found: {}", what, path.string()));
  }
}

json read_json(const fs::path& path, std::string_view what) {
  require_file(path, what);
  std::ifstream in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, path.string() + ": " + e.what());
  }
}

void write_jsonl(const fs::path& path, const std::vector<std::string>& lines, const FileProvenance& p) {
  std::string out = json{{"_meta", meta_of(p)}}.dump() + "\n";
  for (const auto& l : lines) out += l + "\n";
  write_file(path, out);
}

CorpusSlice load_artifact(const fs::path& path, std::string_view what, const StageRequest& req) {
  require_file(path, what);
  CorpusSlice slice = load_corpus(path, CorpusFormat::jsonl);
  if (req.subcorpus) {
    slice = slice.filter_subcorpus(*req.subcorpus);
    if (slice.empty()) {
      throw Error(ErrorCode::ConfigError, "--subcorpus: no posts tagged '" + *req.subcorpus + "' in " + path.string());
    }
  }
  return slice;
}

json summary_json(const SimilaritySummary& s) {
  return {{"n", s.n}, {"mean", s.mean}, {"std", s.std}, {"p05", s.p05}, {"p95", s.p95}};
}

SimilaritySummary summary_from(const json& j) {
  return {j.at("n").get<std::size_t>(), j.at("mean").get<double>(), j.at("std").get<double>(),
          j.at("p05").get<double>(), j.at("p95").get<double>()};
}

json cka_json(const CkaResult& r) {
  return {{"value", r.value}, {"n", r.n}, {"d_src", r.d_src}, {"d_tgt", r.d_tgt}};
}

CkaResult cka_from(const json& j) {
  return {j.at("value").get<double>(), j.at("n").get<std::size_t>(), j.at("d_src").get<std::size_t>(),
          j.at("d_tgt").get<std::size_t>()};
}

json prevalence_json(const std::string& label, const Prevalence& p) {
  json counts = json::object();
  for (Foundation f : kFoundations) counts[std::string(name(f))] = p.counts[index_of(f)];
  return {{"subcorpus", label}, {"n", p.n}, {"counts", counts}};
}

PrevalenceRow prevalence_from(const json& j) {
  PrevalenceRow row;
  row.subcorpus = j.at("subcorpus").get<std::string>();
  row.prevalence.n = j.at("n").get<std::size_t>();
  for (Foundation f : kFoundations) {
    row.prevalence.counts[index_of(f)] = j.at("counts").at(std::string(name(f))).get<std::size_t>();
  }
  return row;
}

json audit_json(const JudgeAudit& a) {
  return {{"subcorpus", a.subcorpus}, {"n", a.n},         {"clean", a.clean},
          {"minor", a.minor},         {"error", a.error}, {"mean_score", a.mean_score}};
}

JudgeAudit audit_from(const json& j) {
  JudgeAudit a;
  a.subcorpus = j.at("subcorpus").get<std::string>();
  a.n = j.at("n").get<std::size_t>();
  a.clean = j.at("clean").get<std::size_t>();
  a.minor = j.at("minor").get<std::size_t>();
  a.error = j.at("error").get<std::size_t>();
  a.mean_score = j.at("mean_score").get<double>();
  return a;
}

json parity_row_json(const ParityRow& r) {
  json folds = json::array();
  for (const auto& f : r.per_fold) folds.push_back({{"en_auc", f.en}, {"pl_auc", f.pl}});
  return {{"foundation", std::string(name(r.foundation))},
          {"en_auc", r.en_auc},
          {"pl_auc", r.pl_auc},
          {"gap", r.gap},
          {"p_gt0", r.p_gt0},
          {"p_lt_thresh", r.p_lt_thresh},
          {"threshold", r.threshold},
          {"degenerate", r.degenerate},
          {"per_fold", folds}};
}

ParityRow parity_row_from(const json& j) {
  ParityRow r;
  auto f = parse_foundation(j.at("foundation").get<std::string>());
  if (!f) throw Error(ErrorCode::MalformedRecord, "parity.json: unknown foundation");
  r.foundation = *f;
  r.en_auc = j.at("en_auc").get<double>();
  r.pl_auc = j.at("pl_auc").get<double>();
  r.gap = j.at("gap").get<double>();
  r.p_gt0 = j.at("p_gt0").get<double>();
  r.p_lt_thresh = j.at("p_lt_thresh").get<double>();
  r.threshold = j.at("threshold").get<double>();
  r.degenerate = j.at("degenerate").get<bool>();
  for (const auto& fold : j.at("per_fold")) {
    r.per_fold.push_back({fold.at("en_auc").get<double>(), fold.at("pl_auc").get<double>()});
  }
  return r;
}

/// Loaded embedding pair plus the corpus rows they belong to.
struct EmbeddingSet {
  EmbeddingMatrix src;
  EmbeddingMatrix tgt;
  CorpusSlice corpus;
  std::vector<std::pair<std::string, std::vector<std::size_t>>> groups;  // subcorpus -> rows
  std::vector<std::size_t> all_rows;
};

EmbeddingSet load_embeddings(const Pipeline& p, const StageRequest& req) {
  const fs::path src_path = p.artifact("emb_src.bin");
  const fs::path tgt_path = p.artifact("emb_tgt.bin");
  require_file(src_path, "embeddings file");
  require_file(tgt_path, "embeddings file");
  EmbeddingSet set;
  set.src = load_matrix(src_path);
  set.tgt = load_matrix(tgt_path);
  if (set.src.ids() != set.tgt.ids()) {
    throw Error(ErrorCode::MisalignedIds, "emb_src.bin and emb_tgt.bin list different ids");
  }

  fs::path corpus_path = p.artifact("corpus.jsonl");
  const fs::path sidecar = p.artifact("emb_src.bin.meta.json");
  if (fs::exists(sidecar)) {
    const json meta = read_json(sidecar, "embedding metadata");
    if (meta.contains("input")) corpus_path = fs::path(meta["input"].get<std::string>());
    if (corpus_path.is_relative()) corpus_path = p.config().out_dir / corpus_path;
  }
  require_file(corpus_path, "corpus for embeddings");
  set.corpus = load_corpus(corpus_path, CorpusFormat::jsonl);

  std::unordered_map<std::string_view, std::string_view> sub_of;
  for (const Post& post : set.corpus.posts) sub_of.emplace(post.id, post.subcorpus);
  std::map<std::string, std::size_t> slot;
  for (std::size_t r = 0; r < set.src.rows(); ++r) {
    auto it = sub_of.find(set.src.ids()[r]);
    if (it == sub_of.end()) {
      throw Error(ErrorCode::MisalignedIds, "embedding id " + set.src.ids()[r] + " not in " + corpus_path.string());
    }
    const std::string sub(it->second);
    if (req.subcorpus && sub != *req.subcorpus) continue;
    auto [s, inserted] = slot.emplace(sub, set.groups.size());
    if (inserted) set.groups.push_back({sub, {}});
    set.groups[s->second].second.push_back(r);
    set.all_rows.push_back(r);
  }
  if (set.all_rows.empty()) {
    throw Error(ErrorCode::ConfigError, "--subcorpus: no embedded posts tagged '" + req.subcorpus.value_or("") + "'");
  }
  return set;
}

bool is_transport(const ItemFailure& f) {
  return f.code == ErrorCode::ExhaustedRetries || f.code == ErrorCode::BackendUnavailable;
}

json failure_json(const ItemFailure& f) {
  return {{"id", f.id}, {"error", std::string(to_string(f.code))}, {"detail", f.detail}};
}

}  // namespace

Pipeline::Pipeline(PipelineConfig cfg) : cfg_(std::move(cfg)), provenance_(cfg_.provenance()) {
  fs::create_directories(cfg_.out_dir);
}

StageResult Pipeline::ingest(const StageRequest& req) {
  if (cfg_.corpus_path.empty()) throw Error(ErrorCode::ConfigError, "corpus.path: not set");
  if (!fs::exists(cfg_.corpus_path)) {
    throw Error(ErrorCode::ConfigError, "corpus.path: file not found: " + cfg_.corpus_path.string());
  }
  CorpusSlice slice = load_corpus(cfg_.corpus_path, cfg_.corpus_format);
  slice.name = cfg_.corpus_name;
  if (req.subcorpus) {
    slice = slice.filter_subcorpus(*req.subcorpus);
    if (slice.empty()) throw Error(ErrorCode::ConfigError, "--subcorpus: no posts tagged '" + *req.subcorpus + "'");
  }
  if (slice.empty()) throw Error(ErrorCode::EmptyCorpus, cfg_.corpus_path.string() + " holds no posts");

  StageResult result;
  save_corpus(slice, artifact("corpus.jsonl"), CorpusFormat::jsonl, provenance_);
  result.outputs.push_back(artifact("corpus.jsonl"));

  json rows = json::array();
  for (const auto& sub : slice.subcorpora()) rows.push_back(prevalence_json(sub, prevalence(slice.filter_subcorpus(sub))));
  write_json(artifact("prevalence.json"), {{"rows", rows}, {"overall", prevalence_json("Overall", prevalence(slice))}},
             provenance_);
  result.outputs.push_back(artifact("prevalence.json"));
  result.messages.push_back(fmt::format("ingested {} posts in {} subcorpora", slice.size(), slice.subcorpora().size()));
  return result;
}

StageResult Pipeline::sample(const StageRequest& req) {
  const CorpusSlice slice = load_artifact(req.input.value_or(artifact("corpus.jsonl")), "corpus artifact", req);
  CorpusSlice out;
  out.name = slice.name;
  for (const auto& sub : slice.subcorpora()) {
    const CorpusSlice part =
        stratified_sample(slice.filter_subcorpus(sub), cfg_.sample_size, mix_seed(cfg_.seed, stable_hash(sub)));
    out.posts.insert(out.posts.end(), part.posts.begin(), part.posts.end());
  }
  save_corpus(out, artifact("sample.jsonl"), CorpusFormat::jsonl, provenance_);
  StageResult result;
  result.outputs.push_back(artifact("sample.jsonl"));
  result.messages.push_back(fmt::format("sampled {} posts", out.size()));
  return result;
}

StageResult Pipeline::translate(const StageRequest& req) {
  const std::string stem = req.sample ? "sample_translated" : "translated";
  const fs::path input = req.input.value_or(artifact(req.sample ? "sample.jsonl" : "corpus.jsonl"));
  CorpusSlice slice = load_artifact(input, "translation input", req);
  if (cfg_.provider.endpoint.empty()) throw Error(ErrorCode::ConfigError, "provider.endpoint: not set");

  HttpChatProvider provider(cfg_.provider);
  Journal journal(artifact(stem + "_journal.jsonl"), provenance_);
  TranslateOptions options{cfg_.translate_temperature, &journal};

  StageResult result;
  std::vector<ItemFailure> failures;
  BatchStats totals;
  for (Platform platform : {Platform::reddit, Platform::twitter}) {
    CorpusSlice group;
    std::vector<std::size_t> where;
    for (std::size_t i = 0; i < slice.size(); ++i) {
      if (slice.posts[i].platform == platform) {
        group.posts.push_back(slice.posts[i]);
        where.push_back(i);
      }
    }
    if (group.empty()) continue;
    const PromptTemplate prompt = load_named_prompt(cfg_.prompt_dir, translation_prompt_for(platform));
    TranslateResult tr = translate_batch(group, prompt, provider, cfg_.policy, options);
    for (std::size_t k = 0; k < where.size(); ++k) slice.posts[where[k]] = std::move(tr.slice.posts[k]);
    failures.insert(failures.end(), tr.failures.begin(), tr.failures.end());
    totals.calls += tr.stats.calls;
    totals.retries += tr.stats.retries;
    totals.skipped += tr.stats.skipped;
    totals.peak_in_flight = std::max(totals.peak_in_flight, tr.stats.peak_in_flight);
  }

  save_corpus(slice, artifact(stem + ".jsonl"), CorpusFormat::jsonl, provenance_);
  result.outputs.push_back(artifact(stem + ".jsonl"));

  std::vector<std::string> checks;
  std::size_t flagged = 0;
  for (const Post& post : slice.posts) {
    if (!post.text_tgt) continue;
    const auto violations = artifact_checks(post.text_src, *post.text_tgt, post.platform);
    if (violations.empty()) continue;
    ++flagged;
    json list = json::array();
    for (const auto& v : violations) list.push_back({{"kind", std::string(name(v.kind))}, {"token", v.token}});
    checks.push_back(json{{"id", post.id}, {"violations", list}}.dump());
  }
  write_jsonl(artifact(stem + "_artifacts.jsonl"), checks, provenance_);
  result.outputs.push_back(artifact(stem + "_artifacts.jsonl"));

  std::vector<std::string> failure_lines;
  for (const auto& f : failures) failure_lines.push_back(failure_json(f).dump());
  write_jsonl(artifact(stem + "_failures.jsonl"), failure_lines, provenance_);
  result.outputs.push_back(artifact(stem + "_failures.jsonl"));

  result.messages.push_back(fmt::format("translated {} posts: {} calls, {} retries, {} resumed, peak in-flight {}, "
                                        "{} failures, {} with artifact violations",
                                        slice.size(), totals.calls, totals.retries, totals.skipped,
                                        totals.peak_in_flight, failures.size(), flagged));
  if (std::any_of(failures.begin(), failures.end(), is_transport)) result.exit_code = 2;
  return result;
}

StageResult Pipeline::judge(const StageRequest& req) {
  const CorpusSlice slice =
      load_artifact(req.input.value_or(artifact("sample_translated.jsonl")), "translated sample", req);
  if (cfg_.provider.endpoint.empty()) throw Error(ErrorCode::ConfigError, "provider.endpoint: not set");
  const PromptTemplate prompt = load_named_prompt(cfg_.prompt_dir, kJudgePrompt);
  HttpChatProvider provider(cfg_.provider);
  Journal journal(artifact("judge_journal.jsonl"), provenance_);
  const JudgeResult jr = judge_batch(slice, prompt, provider, cfg_.policy, JudgeOptions{0.0, &journal});

  StageResult result;
  std::vector<std::string> lines;
  for (const auto& v : jr.verdicts) lines.push_back(verdict_to_json(v));
  write_jsonl(artifact("verdicts.jsonl"), lines, provenance_);
  result.outputs.push_back(artifact("verdicts.jsonl"));

  const auto audits = aggregate_audit(jr.verdicts, [&](const std::string& id) -> std::optional<std::string> {
    const Post* p = slice.find(id);
    return p ? std::optional<std::string>(p->subcorpus) : std::nullopt;
  });
  json rows = json::array();
  for (const auto& a : audits) rows.push_back(audit_json(a));
  json failures = json::array();
  for (const auto& f : jr.failures) failures.push_back(failure_json(f));
  write_json(artifact("judge.json"),
             {{"audits", rows}, {"overall", audit_json(pooled_audit(jr.verdicts, "Overall"))}, {"failures", failures}},
             provenance_);
  result.outputs.push_back(artifact("judge.json"));
  result.messages.push_back(fmt::format("judged {} posts: {} calls, {} retries, {} resumed, {} failures",
                                        jr.verdicts.size(), jr.stats.calls, jr.stats.retries, jr.stats.skipped,
                                        jr.failures.size()));
  if (std::any_of(jr.failures.begin(), jr.failures.end(), is_transport)) result.exit_code = 2;
  return result;
}

StageResult Pipeline::embed(const StageRequest& req) {
  fs::path input;
  if (req.input) {
    input = *req.input;
  } else {
    input = fs::exists(artifact("translated.jsonl")) ? artifact("translated.jsonl") : artifact("corpus.jsonl");
  }
  const CorpusSlice slice = load_artifact(input, "embedding input", req);
  std::vector<std::string> ids;
  std::vector<std::string> src;
  std::vector<std::string> tgt;
  for (const Post& p : slice.posts) {
    if (!p.text_tgt) throw Error(ErrorCode::MissingField, "text_tgt missing for post " + p.id + " in " + input.string());
    ids.push_back(p.id);
    src.push_back(p.text_src);
    tgt.push_back(*p.text_tgt);
  }

  std::unique_ptr<EmbeddingBackend> backend;
  if (cfg_.embedding_backend == EmbeddingBackendKind::table) {
    require_file(cfg_.embedding_table, "embedding.path");
    backend = std::make_unique<TableEmbeddingBackend>(cfg_.embedding_table);
  } else {
    backend = std::make_unique<HttpEmbeddingBackend>(cfg_.embedding);
  }
  const EmbeddingMatrix m_src = fetch_embeddings(*backend, cfg_.embedding, src, ids);
  const EmbeddingMatrix m_tgt = fetch_embeddings(*backend, cfg_.embedding, tgt, ids);

  StageResult result;
  const fs::path input_ref =
      input.parent_path() == cfg_.out_dir ? input.filename() : fs::absolute(input).lexically_normal();
  for (const auto& [side, m] : {std::pair<std::string, const EmbeddingMatrix*>{"src", &m_src}, {"tgt", &m_tgt}}) {
    const fs::path path = artifact("emb_" + side + ".bin");
    fs::create_directories(path.parent_path());
    save_matrix(*m, path);
    write_json(fs::path(path.string() + ".meta.json"),
               {{"side", side}, {"rows", m->rows()}, {"dim", m->dim()}, {"input", input_ref.generic_string()}},
               provenance_);
    result.outputs.push_back(path);
  }
  result.messages.push_back(fmt::format("embedded {} pairs, d={}", m_src.rows(), m_src.dim()));
  return result;
}

StageResult Pipeline::cosine(const StageRequest& req) {
  const EmbeddingSet set = load_embeddings(*this, req);
  const std::vector<double> all = pairwise_cosine(set.src, set.tgt);
  std::vector<std::pair<std::string, std::vector<double>>> grouped;
  for (const auto& [sub, rows] : set.groups) {
    std::vector<double> v;
    v.reserve(rows.size());
    for (std::size_t r : rows) v.push_back(all[r]);
    grouped.emplace_back(sub, std::move(v));
  }
  const CosineTable table = cosine_table(grouped);
  json rows = json::array();
  for (const auto& row : table.rows) {
    json j = summary_json(row.summary);
    j["subcorpus"] = row.subcorpus;
    rows.push_back(j);
  }
  write_json(artifact("cosine.json"), {{"rows", rows}, {"overall", summary_json(table.overall)}}, provenance_);
  StageResult result;
  result.outputs.push_back(artifact("cosine.json"));
  result.messages.push_back(fmt::format("cosine over {} pairs: mean {:.3f}", table.overall.n, table.overall.mean));
  return result;
}

StageResult Pipeline::cka(const StageRequest& req) {
  const EmbeddingSet set = load_embeddings(*this, req);
  json rows = json::array();
  for (const auto& [sub, idx] : set.groups) {
    json j = cka_json(linear_cka(set.src.select(idx), set.tgt.select(idx)));
    j["subcorpus"] = sub;
    rows.push_back(j);
  }
  const CkaResult overall = linear_cka(set.src.select(set.all_rows), set.tgt.select(set.all_rows));
  write_json(artifact("cka.json"), {{"rows", rows}, {"overall", cka_json(overall)}}, provenance_);
  StageResult result;
  result.outputs.push_back(artifact("cka.json"));
  result.messages.push_back(fmt::format("linear CKA over {} pairs: {:.3f}", overall.n, overall.value));
  return result;
}

StageResult Pipeline::parity(const StageRequest& req) {
  StageResult result;
  std::vector<ParitySection> sections;
  json skipped = json::array();

  if (req.input) {
    ParitySection section{req.subcorpus.value_or("external"), {}};
    for (auto& ext : import_external_folds(*req.input, cfg_.k)) {
      section.rows.push_back(parity_from_folds(ext.foundation, std::move(ext.per_fold), cfg_.parity_threshold));
    }
    sections.push_back(std::move(section));
  } else {
    const EmbeddingSet set = load_embeddings(*this, req);
    ParityOptions options;
    options.k = cfg_.k;
    options.logistic = cfg_.logistic;
    options.threshold = cfg_.parity_threshold;
    for (const auto& [sub, idx] : set.groups) {
      const EmbeddingMatrix src = set.src.select(idx);
      const EmbeddingMatrix tgt = set.tgt.select(idx);
      const FoundationLabels labels = labels_for(set.corpus, src);
      options.seed = mix_seed(cfg_.seed, stable_hash(sub));
      ParitySection section{sub, {}};
      for (const auto& [foundation, y] : labels) {
        try {
          auto rows = run_parity(src, tgt, FoundationLabels{{foundation, y}}, options);
          section.rows.push_back(std::move(rows.front()));
        } catch (const Error& e) {
          if (e.code() != ErrorCode::FoldClassCollapse && e.code() != ErrorCode::SingleClass &&
              e.code() != ErrorCode::TooFewSamples) {
            throw;
          }
          skipped.push_back({{"subcorpus", sub}, {"foundation", std::string(name(foundation))}, {"reason", e.what()}});
          result.messages.push_back(fmt::format("skipped {}/{}: {}", sub, name(foundation), e.what()));
        }
      }
      sections.push_back(std::move(section));
    }
  }

  std::string csv = fmt::format("# config_hash={} seed={}\n", provenance_.config_hash, provenance_.seed);
  csv += "subcorpus,foundation,en_auc,pl_auc,gap,p_gt0,p_lt_thresh,threshold,degenerate\n";
  json js = json::array();
  for (const auto& section : sections) {
    json rows = json::array();
    for (const auto& r : section.rows) {
      csv += fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", section.subcorpus,
                         name(r.foundation), r.en_auc, r.pl_auc, r.gap, r.p_gt0, r.p_lt_thresh, r.threshold,
                         r.degenerate ? 1 : 0);
      rows.push_back(parity_row_json(r));
    }
    js.push_back({{"subcorpus", section.subcorpus}, {"rows", rows}});
  }
  write_file(artifact("parity.csv"), csv);
  write_json(artifact("parity.json"), {{"sections", js}, {"skipped", skipped}, {"k", cfg_.k}}, provenance_);
  result.outputs.push_back(artifact("parity.csv"));
  result.outputs.push_back(artifact("parity.json"));
  return result;
}

StageResult Pipeline::report(const StageRequest&) {
  StageResult result;
  ReportBundle bundle;
  bundle.corpus = cfg_.corpus_name;
  bundle.provenance = provenance_;

  auto load = [&](const std::string& file) -> std::optional<json> {
    const fs::path path = artifact(file);
    if (!fs::exists(path)) return std::nullopt;
    json j = read_json(path, file);
    if (j.contains("_meta") && j["_meta"].value("config_hash", "") != provenance_.config_hash) {
      result.messages.push_back(file + " was produced under a different config hash");
    }
    return j;
  };

  try {
    if (auto j = load("prevalence.json")) {
      for (const auto& row : j->at("rows")) bundle.prevalence.push_back(prevalence_from(row));
      if (j->at("rows").size() > 1) bundle.prevalence.push_back(prevalence_from(j->at("overall")));
    }
    if (auto j = load("judge.json")) {
      for (const auto& row : j->at("audits")) bundle.judge.push_back(audit_from(row));
      bundle.judge_overall = audit_from(j->at("overall"));
    }
    if (auto j = load("cosine.json")) {
      for (const auto& row : j->at("rows")) bundle.cosine.push_back({row.at("subcorpus"), summary_from(row)});
      bundle.cosine_overall = summary_from(j->at("overall"));
    }
    if (auto j = load("cka.json")) {
      for (const auto& row : j->at("rows")) bundle.cka.push_back({row.at("subcorpus"), cka_from(row)});
      bundle.cka_overall = cka_from(j->at("overall"));
    }
    if (auto j = load("parity.json")) {
      for (const auto& s : j->at("sections")) {
        ParitySection section{s.at("subcorpus").get<std::string>(), {}};
        for (const auto& row : s.at("rows")) section.rows.push_back(parity_row_from(row));
        bundle.parity.push_back(std::move(section));
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("stage artifact: ") + e.what());
  }

  const bool any = !bundle.prevalence.empty() || bundle.has_judge() || bundle.has_cosine() ||
                   !bundle.cka.empty() || bundle.has_parity();
  if (!any) throw Error(ErrorCode::EmptyBundle, "no stage artifacts in " + cfg_.out_dir.string());
  bundle.verdict = verdict(bundle, cfg_.thresholds);

  const fs::path dir = artifact("report");
  for (ReportFormat format : {ReportFormat::markdown, ReportFormat::csv}) {
    const auto docs = render(bundle, format);
    write_documents(docs, dir);
    for (const auto& d : docs) result.outputs.push_back(dir / d.name);
  }
  std::string summary = fmt::format("verdict: {}", name(bundle.verdict->level));
  for (const auto& r : bundle.verdict->reasons) summary += "; " + r;
  result.messages.push_back(summary);
  return result;
}

}  // namespace xfid
