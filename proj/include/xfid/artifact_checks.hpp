#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "xfid/corpus.hpp"

namespace xfid {

enum class ViolationKind {
  EmptyTranslation,
  HashtagAltered,
  MentionAltered,
  UrlAltered,
  CyrillicLeakage,
};

std::string_view name(ViolationKind kind);

struct Violation {
  ViolationKind kind = ViolationKind::EmptyTranslation;
  std::string token;  // offending source token, or the first Cyrillic run

  auto operator<=>(const Violation&) const = default;
};

/// Word characters for tag boundaries: ASCII letters, digits and '_', Latin-1
/// and Latin Extended-A/B letters, Greek and Cyrillic.
bool is_word_codepoint(char32_t cp);
bool is_cyrillic(char32_t cp);

/// URLs start at "http://", "https://" or "www." and run to whitespace, minus
/// trailing punctuation. Hashtags and mentions are '#'/'@' not preceded by a
/// word character, followed by a maximal run of word characters, and are not
/// looked for inside URLs. Results keep first-occurrence order, no repeats.
std::vector<std::string> extract_urls(std::string_view text);
std::vector<std::string> extract_hashtags(std::string_view text);
std::vector<std::string> extract_mentions(std::string_view text);

/// Mechanical preservation checks on one translated pair. Every hashtag,
/// mention and URL of src must appear as the same token in tgt; tgt must hold
/// no Cyrillic code point and must not be blank. The rules are identical for
/// both platforms. Order: empty, hashtags, mentions, URLs, Cyrillic.
std::vector<Violation> artifact_checks(std::string_view src, std::string_view tgt, Platform platform);

}  // namespace xfid
