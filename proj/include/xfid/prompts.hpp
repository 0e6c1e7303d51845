#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "xfid/corpus.hpp"

namespace xfid {

/// A system prompt shipped as a UTF-8 text file:
///
///   name: reddit_p1
///   ---
///   <system text, verbatim to end of file>
///
/// The one-shot pair is read from the "IN: " and "OUT: " lines of the system
/// text when present.
struct PromptTemplate {
  std::string name;
  std::string system_text;
  std::optional<std::pair<std::string, std::string>> one_shot;
};

inline constexpr std::string_view kRedditPrompt = "reddit_p1";
inline constexpr std::string_view kTwitterPrompt = "twitter_p2";
inline constexpr std::string_view kJudgePrompt = "judge";

/// Throws MalformedRecord on a missing name line, missing separator, unknown
/// name or empty system text.
PromptTemplate parse_prompt(std::string_view file_text);
PromptTemplate load_prompt(const std::filesystem::path& path);

/// Loads <dir>/<name>.txt and checks the front-matter name agrees.
PromptTemplate load_named_prompt(const std::filesystem::path& dir, std::string_view name);

/// reddit -> reddit_p1, twitter -> twitter_p2.
std::string_view translation_prompt_for(Platform platform);

/// Platform a translation template is meant for; nullopt for the judge.
std::optional<Platform> platform_of(const PromptTemplate& prompt);

}  // namespace xfid
