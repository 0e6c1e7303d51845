#include "xfid/artifact_checks.hpp"

#include <algorithm>

namespace xfid {

namespace {

struct Cp {
  char32_t value;
  std::size_t begin;
  std::size_t end;
};

// Invalid sequences decode to U+FFFD one byte at a time.
std::vector<Cp> decode(std::string_view s) {
  std::vector<Cp> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    char32_t cp = 0xFFFD;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 >> 5) == 0x6) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 >> 4) == 0xE) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 >> 3) == 0x1E) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      out.push_back({0xFFFD, i, i + 1});
      ++i;
      continue;
    }
    bool ok = i + len <= s.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (b & 0x3F);
      }
    }
    if (!ok) {
      out.push_back({0xFFFD, i, i + 1});
      ++i;
      continue;
    }
    out.push_back({cp, i, i + len});
    i += len;
  }
  return out;
}

bool is_space(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v' ||
         cp == 0xA0 || cp == 0x2028 || cp == 0x2029 || cp == 0x3000 || (cp >= 0x2000 && cp <= 0x200A);
}

bool trailing_punct(char c) {
  static constexpr std::string_view kPunct = ".,;:!?)]}'\"";
  return kPunct.find(c) != std::string_view::npos;
}

struct Span {
  std::size_t begin;
  std::size_t end;
};

std::vector<Span> url_spans(std::string_view text) {
  std::vector<Span> spans;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t start = std::string_view::npos;
    for (std::string_view prefix : {"https://", "http://", "www."}) {
      const auto p = text.find(prefix, i);
      if (p != std::string_view::npos && p < start) start = p;
    }
    if (start == std::string_view::npos) break;
    std::size_t end = start;
    while (end < text.size()) {
      const auto c = static_cast<unsigned char>(text[end]);
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') break;
      ++end;
    }
    std::size_t trimmed = end;
    while (trimmed > start && trailing_punct(text[trimmed - 1])) --trimmed;
    spans.push_back({start, trimmed});
    i = end;
  }
  return spans;
}

void push_unique(std::vector<std::string>& out, std::string token) {
  if (std::find(out.begin(), out.end(), token) == out.end()) out.push_back(std::move(token));
}

std::vector<std::string> extract_tags(std::string_view text, char sigil) {
  const auto spans = url_spans(text);
  const auto cps = decode(text);
  auto in_url = [&](std::size_t byte) {
    return std::any_of(spans.begin(), spans.end(),
                       [&](const Span& s) { return byte >= s.begin && byte < s.end; });
  };
  std::vector<std::string> out;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (cps[i].value != static_cast<char32_t>(sigil)) continue;
    if (i > 0 && is_word_codepoint(cps[i - 1].value)) continue;
    if (in_url(cps[i].begin)) continue;
    std::size_t j = i + 1;
    while (j < cps.size() && is_word_codepoint(cps[j].value)) ++j;
    if (j == i + 1) continue;
    push_unique(out, std::string(text.substr(cps[i].begin, cps[j - 1].end - cps[i].begin)));
  }
  return out;
}

}  // namespace

std::string_view name(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::EmptyTranslation: return "EmptyTranslation";
    case ViolationKind::HashtagAltered: return "HashtagAltered";
    case ViolationKind::MentionAltered: return "MentionAltered";
    case ViolationKind::UrlAltered: return "UrlAltered";
    case ViolationKind::CyrillicLeakage: return "CyrillicLeakage";
  }
  return "EmptyTranslation";
}

bool is_cyrillic(char32_t cp) {
  return (cp >= 0x0400 && cp <= 0x052F) || (cp >= 0x2DE0 && cp <= 0x2DFF) ||
         (cp >= 0xA640 && cp <= 0xA69F) || (cp >= 0x1C80 && cp <= 0x1C8F);
}

bool is_word_codepoint(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9') || cp == '_';
  }
  if (cp >= 0xC0 && cp <= 0x24F) return cp != 0xD7 && cp != 0xF7;
  if (cp >= 0x370 && cp <= 0x3FF) return true;
  return is_cyrillic(cp);
}

std::vector<std::string> extract_urls(std::string_view text) {
  std::vector<std::string> out;
  for (const Span& s : url_spans(text)) {
    if (s.end > s.begin) push_unique(out, std::string(text.substr(s.begin, s.end - s.begin)));
  }
  return out;
}

std::vector<std::string> extract_hashtags(std::string_view text) { return extract_tags(text, '#'); }
std::vector<std::string> extract_mentions(std::string_view text) { return extract_tags(text, '@'); }

std::vector<Violation> artifact_checks(std::string_view src, std::string_view tgt, Platform) {
  std::vector<Violation> out;
  const auto cps = decode(tgt);
  if (std::all_of(cps.begin(), cps.end(), [](const Cp& c) { return is_space(c.value); })) {
    out.push_back({ViolationKind::EmptyTranslation, ""});
  }

  auto compare = [&](const std::vector<std::string>& expected, const std::vector<std::string>& found,
                     ViolationKind kind) {
    for (const auto& token : expected) {
      if (std::find(found.begin(), found.end(), token) == found.end()) out.push_back({kind, token});
    }
  };
  compare(extract_hashtags(src), extract_hashtags(tgt), ViolationKind::HashtagAltered);
  compare(extract_mentions(src), extract_mentions(tgt), ViolationKind::MentionAltered);
  compare(extract_urls(src), extract_urls(tgt), ViolationKind::UrlAltered);

  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (!is_cyrillic(cps[i].value)) continue;
    std::size_t j = i;
    while (j < cps.size() && is_cyrillic(cps[j].value)) ++j;
    out.push_back({ViolationKind::CyrillicLeakage,
                   std::string(tgt.substr(cps[i].begin, cps[j - 1].end - cps[i].begin))});
    break;
  }
  return out;
}

}  // namespace xfid
