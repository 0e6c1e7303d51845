#include "xfid/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "xfid/csv.hpp"
#include "xfid/error.hpp"
#include "xfid/rng.hpp"
#include "xfid/text_format.hpp"

namespace xfid {

using json = nlohmann::json;

namespace {

constexpr std::array<std::string_view, 5> kNames{"authority", "care", "fairness",
                                                 "loyalty", "sanctity"};
constexpr std::array<std::string_view, 5> kDisplay{"Authority", "Care", "Fairness",
                                                   "Loyalty", "Sanctity"};
constexpr std::array<std::string_view, 5> kAbbrev{"Au", "Ca", "Fa", "Lo", "Sa"};

const std::vector<std::string> kCsvColumns{
    "id",       "text",    "text_tgt", "corpus",   "subcorpus", "platform",
    "authority", "care",   "fairness", "loyalty",  "sanctity",  "non_moral"};

[[noreturn]] void malformed(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(line) + ": " + what);
}

[[noreturn]] void missing(std::size_t line, const std::string& field) {
  throw Error(ErrorCode::MissingField, field + " (line " + std::to_string(line) + ")");
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::optional<bool> coerce_text_bool(std::string_view raw) {
  const std::string v = lower(raw);
  if (v == "true" || v == "1" || v == "yes" || v == "t" || v == "y") return true;
  if (v == "false" || v == "0" || v == "no" || v == "f" || v == "n") return false;
  return std::nullopt;
}

bool coerce_bool(const json& value, std::size_t line, const std::string& field) {
  if (value.is_boolean()) return value.get<bool>();
  if (value.is_number_integer() || value.is_number_unsigned()) return value.get<long long>() != 0;
  if (value.is_number_float()) {
    const double d = value.get<double>();
    if (!std::isfinite(d)) malformed(line, field + " is not a finite number");
    return d != 0.0;
  }
  if (value.is_string()) {
    if (auto b = coerce_text_bool(value.get<std::string>())) return *b;
  }
  malformed(line, field + " cannot be read as a boolean");
}

std::string required_string(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) missing(line, key);
  if (!it->is_string()) malformed(line, std::string(key) + " must be a string");
  return it->get<std::string>();
}

Platform required_platform(std::string_view raw, std::size_t line) {
  auto p = parse_platform(raw);
  if (!p) malformed(line, "unknown platform '" + std::string(raw) + "'");
  return *p;
}

void check_post(const Post& post, std::size_t line) {
  if (post.text_src.empty()) malformed(line, "text is empty");
  if (post.non_moral && post.any_label()) {
    malformed(line, "post " + post.id + " is non_moral but carries a foundation label");
  }
}

Post post_from_json(const json& obj, std::size_t line) {
  if (!obj.is_object()) malformed(line, "record is not a JSON object");
  Post post;
  post.id = required_string(obj, "id", line);
  if (post.id.empty()) malformed(line, "id is empty");
  post.text_src = required_string(obj, "text", line);
  if (auto it = obj.find("text_tgt"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) malformed(line, "text_tgt must be a string or null");
    post.text_tgt = it->get<std::string>();
  }
  if (auto it = obj.find("corpus"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) malformed(line, "corpus must be a string");
    post.corpus = it->get<std::string>();
  }
  post.subcorpus = required_string(obj, "subcorpus", line);
  post.platform = required_platform(required_string(obj, "platform", line), line);

  auto labels = obj.find("labels");
  if (labels == obj.end() || labels->is_null()) missing(line, "labels");
  if (!labels->is_object()) malformed(line, "labels must be an object");
  for (Foundation f : kFoundations) {
    const std::string key(name(f));
    auto it = labels->find(key);
    if (it == labels->end() || it->is_null()) missing(line, "labels." + key);
    post.labels[index_of(f)] = coerce_bool(*it, line, "labels." + key);
  }
  if (auto it = obj.find("non_moral"); it != obj.end() && !it->is_null()) {
    post.non_moral = coerce_bool(*it, line, "non_moral");
  }
  check_post(post, line);
  return post;
}

std::string post_to_jsonl(const Post& post) {
  nlohmann::ordered_json out;
  out["id"] = post.id;
  out["text"] = post.text_src;
  out["text_tgt"] = post.text_tgt ? nlohmann::ordered_json(*post.text_tgt)
                                  : nlohmann::ordered_json(nullptr);
  out["corpus"] = post.corpus;
  out["subcorpus"] = post.subcorpus;
  out["platform"] = std::string(name(post.platform));
  nlohmann::ordered_json labels;
  for (Foundation f : kFoundations) labels[std::string(name(f))] = post.label(f);
  out["labels"] = labels;
  out["non_moral"] = post.non_moral;
  return out.dump();
}

void add_unique(CorpusSlice& slice, std::unordered_set<std::string>& seen, Post post,
                std::size_t line) {
  if (!seen.insert(post.id).second) {
    throw Error(ErrorCode::DuplicateId, post.id + " (line " + std::to_string(line) + ")");
  }
  slice.posts.push_back(std::move(post));
}

CorpusSlice read_jsonl(std::istream& in, std::string slice_name) {
  CorpusSlice slice;
  slice.name = std::move(slice_name);
  std::unordered_set<std::string> seen;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.find_first_not_of(" \t") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(raw);
    } catch (const json::parse_error& e) {
      malformed(line, std::string("invalid JSON: ") + e.what());
    }
    if (obj.is_object() && obj.contains("_meta")) continue;
    add_unique(slice, seen, post_from_json(obj, line), line);
  }
  return slice;
}

CorpusSlice read_csv(std::istream& in, std::string slice_name) {
  CorpusSlice slice;
  slice.name = std::move(slice_name);
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header) return slice;

  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header->fields.size(); ++i) column[header->fields[i]] = i;
  for (const char* required : {"id", "text", "subcorpus", "platform"}) {
    if (!column.count(required)) missing(header->line, required);
  }
  for (Foundation f : kFoundations) {
    if (!column.count(std::string(name(f)))) missing(header->line, "labels");
  }

  std::unordered_set<std::string> seen;
  while (auto rec = reader.next()) {
    const std::size_t line = rec->line;
    if (rec->fields.size() != header->fields.size()) {
      malformed(line, "expected " + std::to_string(header->fields.size()) + " fields, got " +
                          std::to_string(rec->fields.size()));
    }
    auto cell = [&](const std::string& key) -> const std::string& {
      return rec->fields[column.at(key)];
    };
    auto optional_cell = [&](const std::string& key) -> std::optional<std::size_t> {
      auto it = column.find(key);
      if (it == column.end()) return std::nullopt;
      return it->second;
    };

    Post post;
    post.id = cell("id");
    if (post.id.empty()) missing(line, "id");
    post.text_src = cell("text");
    if (post.text_src.empty()) missing(line, "text");
    if (auto idx = optional_cell("text_tgt")) {
      // An unquoted empty cell is null; a quoted "" is an empty translation.
      if (!rec->fields[*idx].empty() || rec->quoted[*idx]) post.text_tgt = rec->fields[*idx];
    }
    if (auto idx = optional_cell("corpus")) post.corpus = rec->fields[*idx];
    post.subcorpus = cell("subcorpus");
    if (post.subcorpus.empty()) missing(line, "subcorpus");
    post.platform = required_platform(cell("platform"), line);
    for (Foundation f : kFoundations) {
      const std::string key(name(f));
      const std::string& raw = cell(key);
      if (raw.empty()) missing(line, "labels." + key);
      auto b = coerce_text_bool(raw);
      if (!b) malformed(line, "labels." + key + " cannot be read as a boolean");
      post.labels[index_of(f)] = *b;
    }
    if (auto idx = optional_cell("non_moral"); idx && !rec->fields[*idx].empty()) {
      auto b = coerce_text_bool(rec->fields[*idx]);
      if (!b) malformed(line, "non_moral cannot be read as a boolean");
      post.non_moral = *b;
    }
    check_post(post, line);
    add_unique(slice, seen, std::move(post), line);
  }
  return slice;
}

}  // namespace

std::string_view name(Foundation f) { return kNames[index_of(f)]; }
std::string_view display_name(Foundation f) { return kDisplay[index_of(f)]; }
std::string_view abbrev(Foundation f) { return kAbbrev[index_of(f)]; }

std::optional<Foundation> parse_foundation(std::string_view text) {
  const std::string v = lower(text);
  for (Foundation f : kFoundations) {
    if (v == name(f) || v == lower(abbrev(f))) return f;
  }
  return std::nullopt;
}

std::string_view name(Platform p) { return p == Platform::reddit ? "reddit" : "twitter"; }

std::optional<Platform> parse_platform(std::string_view text) {
  const std::string v = lower(text);
  if (v == "reddit") return Platform::reddit;
  if (v == "twitter") return Platform::twitter;
  return std::nullopt;
}

std::optional<CorpusFormat> parse_corpus_format(std::string_view text) {
  const std::string v = lower(text);
  if (v == "jsonl") return CorpusFormat::jsonl;
  if (v == "csv") return CorpusFormat::csv;
  return std::nullopt;
}

bool Post::any_label() const {
  return std::any_of(labels.begin(), labels.end(), [](bool b) { return b; });
}

std::vector<std::string> CorpusSlice::subcorpora() const {
  std::vector<std::string> out;
  for (const Post& p : posts) {
    if (std::find(out.begin(), out.end(), p.subcorpus) == out.end()) out.push_back(p.subcorpus);
  }
  return out;
}

CorpusSlice CorpusSlice::filter_subcorpus(std::string_view subcorpus) const {
  CorpusSlice out;
  out.name = name + "/" + std::string(subcorpus);
  for (const Post& p : posts) {
    if (p.subcorpus == subcorpus) out.posts.push_back(p);
  }
  return out;
}

const Post* CorpusSlice::find(std::string_view id) const {
  for (const Post& p : posts) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

void validate_post(const Post& post) { check_post(post, 0); }

CorpusSlice read_corpus(std::istream& in, CorpusFormat format, std::string slice_name) {
  return format == CorpusFormat::jsonl ? read_jsonl(in, std::move(slice_name))
                                       : read_csv(in, std::move(slice_name));
}

CorpusSlice load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open corpus file " + path.string());
  return read_corpus(in, format, path.stem().string());
}

void write_corpus(const CorpusSlice& slice, std::ostream& out, CorpusFormat format,
                  const std::optional<FileProvenance>& provenance) {
  if (format == CorpusFormat::jsonl) {
    if (provenance) {
      nlohmann::ordered_json meta;
      meta["_meta"]["config_hash"] = provenance->config_hash;
      meta["_meta"]["seed"] = provenance->seed;
      out << meta.dump() << '\n';
    }
    for (const Post& p : slice.posts) out << post_to_jsonl(p) << '\n';
    return;
  }

  if (provenance) {
    out << "# config_hash=" << provenance->config_hash << " seed=" << provenance->seed << '\n';
  }
  out << csv::join_row(kCsvColumns) << '\n';
  for (const Post& p : slice.posts) {
    std::vector<std::string> cells{csv::escape(p.id), csv::escape(p.text_src)};
    // Bare empty cell means null; an empty translation is written as "".
    cells.push_back(p.text_tgt ? (p.text_tgt->empty() ? "\"\"" : csv::escape(*p.text_tgt)) : "");
    cells.push_back(csv::escape(p.corpus));
    cells.push_back(csv::escape(p.subcorpus));
    cells.emplace_back(name(p.platform));
    for (Foundation f : kFoundations) cells.emplace_back(p.label(f) ? "true" : "false");
    cells.emplace_back(p.non_moral ? "true" : "false");
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line.push_back(',');
      line += cells[i];
    }
    out << line << '\n';
  }
}

void save_corpus(const CorpusSlice& slice, const std::filesystem::path& path,
                 CorpusFormat format, const std::optional<FileProvenance>& provenance) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write corpus file " + path.string());
  write_corpus(slice, out, format, provenance);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

CorpusSlice stratified_sample(const CorpusSlice& slice, std::size_t n, std::uint64_t seed) {
  if (n > slice.size()) {
    throw Error(ErrorCode::SampleTooLarge, "requested " + std::to_string(n) + " of " +
                                               std::to_string(slice.size()) + " posts");
  }
  std::map<Stratum, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < slice.posts.size(); ++i) {
    const Post& p = slice.posts[i];
    strata[Stratum{p.any_label(), p.non_moral}].push_back(i);
  }

  // Largest-remainder apportionment; remainders compared exactly as
  // (n * size) mod N, ties broken by stratum order.
  const std::size_t total = slice.size();
  struct Quota {
    Stratum key;
    std::size_t take;
    std::size_t remainder;
  };
  std::vector<Quota> quotas;
  std::size_t assigned = 0;
  for (const auto& [key, members] : strata) {
    const std::size_t scaled = n * members.size();
    quotas.push_back({key, scaled / total, scaled % total});
    assigned += scaled / total;
  }
  std::vector<std::size_t> order(quotas.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return quotas[a].remainder > quotas[b].remainder;
  });
  for (std::size_t i = 0; assigned < n && i < order.size(); ++i, ++assigned) {
    ++quotas[order[i]].take;
  }

  std::vector<std::size_t> chosen;
  chosen.reserve(n);
  std::uint64_t salt = 0;
  for (const Quota& q : quotas) {
    const auto& members = strata.at(q.key);
    const auto perm = seeded_permutation(members.size(), mix_seed(seed, salt++));
    for (std::size_t i = 0; i < q.take; ++i) chosen.push_back(members[perm[i]]);
  }
  std::sort(chosen.begin(), chosen.end());

  CorpusSlice out;
  out.name = slice.name + "/sample";
  out.posts.reserve(chosen.size());
  for (std::size_t idx : chosen) out.posts.push_back(slice.posts[idx]);
  return out;
}

double Prevalence::percent(Foundation f) const {
  if (n == 0) return 0.0;
  return 100.0 * static_cast<double>(counts[index_of(f)]) / static_cast<double>(n);
}

std::string Prevalence::display(Foundation f) const {
  return format_tenths(percent_tenths(counts[index_of(f)], n));
}

Prevalence prevalence(const CorpusSlice& slice) {
  if (slice.empty()) throw Error(ErrorCode::EmptyCorpus, "prevalence of empty slice " + slice.name);
  Prevalence out;
  out.n = slice.size();
  for (const Post& p : slice.posts) {
    for (Foundation f : kFoundations) {
      if (p.label(f)) ++out.counts[index_of(f)];
    }
  }
  return out;
}

}  // namespace xfid
