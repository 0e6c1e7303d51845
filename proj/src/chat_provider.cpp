#include "xfid/chat_provider.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "http_util.hpp"

namespace xfid {

using json = nlohmann::json;

HttpChatProvider::HttpChatProvider(ProviderConfig cfg) : cfg_(std::move(cfg)) {
  auto parts = detail::split_url(cfg_.endpoint);
  origin_ = std::move(parts.origin);
  path_ = std::move(parts.path);
  token_ = detail::read_token(cfg_.token_env);
}

ChatReply HttpChatProvider::complete(const ChatRequest& request) {
  httplib::Client client(origin_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(cfg_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  httplib::Headers headers;
  if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
  const json body = {
      {"model", cfg_.model},
      {"temperature", request.temperature},
      {"messages",
       json::array({{{"role", "system"}, {"content", request.system}},
                    {{"role", "user"}, {"content", request.user}}})},
  };

  ChatReply reply;
  auto res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res) {
    reply.status = ReplyStatus::transient;
    reply.error = httplib::to_string(res.error());
    return reply;
  }
  reply.http_status = res->status;
  if (res->status != 200) {
    reply.status = detail::is_transient_status(res->status) ? ReplyStatus::transient : ReplyStatus::fatal;
    reply.error = "HTTP " + std::to_string(res->status);
    return reply;
  }
  try {
    const json parsed = json::parse(res->body);
    const json& choice = parsed.at("choices").at(0);
    const json& message = choice.at("message");
    const bool refused = (message.contains("refusal") && !message["refusal"].is_null()) ||
                         choice.value("finish_reason", std::string()) == "content_filter";
    if (refused) {
      reply.status = ReplyStatus::refusal;
      if (message.contains("refusal") && message["refusal"].is_string()) {
        reply.error = message["refusal"].get<std::string>();
      }
      return reply;
    }
    reply.text = message.at("content").get<std::string>();
    reply.status = ReplyStatus::ok;
  } catch (const json::exception& e) {
    reply.status = ReplyStatus::fatal;
    reply.error = std::string("malformed response: ") + e.what();
  }
  return reply;
}

}  // namespace xfid
