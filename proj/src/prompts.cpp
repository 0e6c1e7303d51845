#include "xfid/prompts.hpp"

#include <fstream>
#include <sstream>

#include "xfid/error.hpp"

namespace xfid {

namespace {

bool known_name(std::string_view name) {
  return name == kRedditPrompt || name == kTwitterPrompt || name == kJudgePrompt;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

PromptTemplate parse_prompt(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  const auto eol = text.find('\n');
  if (eol == std::string_view::npos) throw Error(ErrorCode::MalformedRecord, "prompt has no front matter");
  const std::string_view first = strip_cr(text.substr(0, eol));
  if (!first.starts_with("name:")) throw Error(ErrorCode::MalformedRecord, "prompt must start with 'name:'");
  std::string_view name = first.substr(5);
  while (!name.empty() && name.front() == ' ') name.remove_prefix(1);
  while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
  if (!known_name(name)) {
    throw Error(ErrorCode::MalformedRecord, "unknown prompt name '" + std::string(name) + "'");
  }

  std::string_view rest = text.substr(eol + 1);
  const auto sep_end = rest.find('\n');
  if (sep_end == std::string_view::npos || strip_cr(rest.substr(0, sep_end)) != "---") {
    throw Error(ErrorCode::MalformedRecord, "prompt front matter must end with '---'");
  }

  PromptTemplate prompt;
  prompt.name = std::string(name);
  prompt.system_text = std::string(rest.substr(sep_end + 1));
  while (!prompt.system_text.empty() &&
         (prompt.system_text.back() == '\n' || prompt.system_text.back() == '\r')) {
    prompt.system_text.pop_back();
  }
  if (prompt.system_text.empty()) {
    throw Error(ErrorCode::MalformedRecord, "prompt " + prompt.name + " has empty system text");
  }

  std::optional<std::string> in;
  std::optional<std::string> out;
  std::istringstream lines(prompt.system_text);
  for (std::string line; std::getline(lines, line);) {
    if (line.starts_with("IN: ")) in = line.substr(4);
    if (line.starts_with("OUT: ")) out = line.substr(5);
  }
  if (in && out) prompt.one_shot = std::make_pair(*in, *out);
  return prompt;
}

PromptTemplate load_prompt(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << file.rdbuf();
  return parse_prompt(buf.str());
}

PromptTemplate load_named_prompt(const std::filesystem::path& dir, std::string_view name) {
  PromptTemplate prompt = load_prompt(dir / (std::string(name) + ".txt"));
  if (prompt.name != name) {
    throw Error(ErrorCode::MalformedRecord,
                "prompt file for " + std::string(name) + " declares name " + prompt.name);
  }
  return prompt;
}

std::string_view translation_prompt_for(Platform platform) {
  return platform == Platform::reddit ? kRedditPrompt : kTwitterPrompt;
}

std::optional<Platform> platform_of(const PromptTemplate& prompt) {
  if (prompt.name == kRedditPrompt) return Platform::reddit;
  if (prompt.name == kTwitterPrompt) return Platform::twitter;
  return std::nullopt;
}

}  // namespace xfid
