#pragma once

#include <chrono>
#include <string>

namespace xfid {

struct ChatRequest {
  std::string system;
  std::string user;
  double temperature = 0.0;
};

enum class ReplyStatus {
  ok,         // text holds the completion
  transient,  // 429, 408, 5xx, timeout or connection failure; worth retrying
  refusal,    // the model declined
  fatal,      // anything else (4xx, malformed body)
};

struct ChatReply {
  ReplyStatus status = ReplyStatus::fatal;
  std::string text;
  int http_status = 0;
  std::string error;
};

/// A chat-completion service. Implementations must be callable from several
/// threads at once and must not throw for remote failures; those are
/// reported through ChatReply::status.
class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual ChatReply complete(const ChatRequest& request) = 0;
};

struct ProviderConfig {
  std::string endpoint;  // full URL, e.g. https://api.example.com/v1/chat/completions
  std::string model;
  std::string token_env;
  std::chrono::milliseconds timeout{60000};
};

/// OpenAI-style wire format:
///   POST {"model", "temperature", "messages": [{"role":"system",...},{"role":"user",...}]}
///   -> {"choices": [{"message": {"content": str, "refusal": str|null}, "finish_reason": str}]}
/// A non-null refusal or finish_reason "content_filter" counts as a refusal.
class HttpChatProvider final : public ChatProvider {
 public:
  explicit HttpChatProvider(ProviderConfig cfg);
  ChatReply complete(const ChatRequest& request) override;

 private:
  ProviderConfig cfg_;
  std::string origin_;
  std::string path_;
  std::string token_;
};

}  // namespace xfid
