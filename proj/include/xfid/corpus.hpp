#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace xfid {

/// The five moral foundations, in the canonical table order (Au, Ca, Fa, Lo, Sa).
enum class Foundation { authority = 0, care, fairness, loyalty, sanctity };

inline constexpr std::array<Foundation, 5> kFoundations{
    Foundation::authority, Foundation::care, Foundation::fairness,
    Foundation::loyalty, Foundation::sanctity};

std::string_view name(Foundation f);          // "care"
std::string_view display_name(Foundation f);  // "Care"
std::string_view abbrev(Foundation f);        // "Ca"
std::optional<Foundation> parse_foundation(std::string_view text);

inline constexpr std::size_t index_of(Foundation f) {
  return static_cast<std::size_t>(f);
}

enum class Platform { reddit, twitter };

std::string_view name(Platform p);
std::optional<Platform> parse_platform(std::string_view text);

/// One corpus record. Labels are pre-binarized upstream; multi-annotator
/// aggregation is out of scope for this toolkit.
struct Post {
  std::string id;
  std::string text_src;
  std::optional<std::string> text_tgt;
  std::string corpus;
  std::string subcorpus;
  Platform platform = Platform::reddit;
  std::array<bool, 5> labels{};
  bool non_moral = false;

  bool label(Foundation f) const { return labels[index_of(f)]; }
  bool any_label() const;

  bool operator==(const Post&) const = default;
};

/// Ordered, immutable-after-load collection of posts.
struct CorpusSlice {
  std::string name;
  std::vector<Post> posts;

  std::size_t size() const { return posts.size(); }
  bool empty() const { return posts.empty(); }

  /// Distinct subcorpus tags in order of first appearance.
  std::vector<std::string> subcorpora() const;

  /// Posts of one subcorpus, order preserved. Name is "<name>/<subcorpus>".
  CorpusSlice filter_subcorpus(std::string_view subcorpus) const;

  const Post* find(std::string_view id) const;

  bool operator==(const CorpusSlice&) const = default;
};

enum class CorpusFormat { jsonl, csv };

std::optional<CorpusFormat> parse_corpus_format(std::string_view text);

/// Provenance written as the first line of JSONL outputs ({"_meta": {...}})
/// or a leading '#' comment in CSV outputs. Readers skip it.
struct FileProvenance {
  std::string config_hash;
  std::uint64_t seed = 0;
};

/// Loads every record in file order.
/// Throws Error with MissingField, DuplicateId, MalformedRecord (the message
/// carries the line number) or Io.
CorpusSlice load_corpus(const std::filesystem::path& path, CorpusFormat format);
CorpusSlice read_corpus(std::istream& in, CorpusFormat format, std::string name);

void save_corpus(const CorpusSlice& slice, const std::filesystem::path& path,
                 CorpusFormat format,
                 const std::optional<FileProvenance>& provenance = std::nullopt);
void write_corpus(const CorpusSlice& slice, std::ostream& out, CorpusFormat format,
                  const std::optional<FileProvenance>& provenance = std::nullopt);

/// Throws MalformedRecord if a post breaks a Post invariant.
void validate_post(const Post& post);

/// Stratum key for sampling: (has any foundation label, non_moral flag).
struct Stratum {
  bool any_label = false;
  bool non_moral = false;
  auto operator<=>(const Stratum&) const = default;
};

/// Proportional stratified sample of n posts. Per-stratum quotas are the floor
/// of the exact share plus one for the largest remainders, so each quota is
/// within 1 of its exact proportion. Members are chosen by a seeded
/// permutation; output keeps the slice's original order.
/// Throws SampleTooLarge if n > slice.size().
CorpusSlice stratified_sample(const CorpusSlice& slice, std::size_t n, std::uint64_t seed);

/// Per-foundation prevalence over all posts (non-moral posts count in N).
struct Prevalence {
  std::array<std::size_t, 5> counts{};
  std::size_t n = 0;

  double percent(Foundation f) const;
  /// Half-up to one decimal, e.g. "37.4".
  std::string display(Foundation f) const;
};

/// Throws EmptyCorpus on an empty slice.
Prevalence prevalence(const CorpusSlice& slice);

}  // namespace xfid
