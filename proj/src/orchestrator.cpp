#include "xfid/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include <nlohmann/json.hpp>

#include "xfid/rng.hpp"

namespace xfid {

using json = nlohmann::json;

namespace {

std::string_view status_word(ReplyStatus s) {
  switch (s) {
    case ReplyStatus::ok: return "ok";
    case ReplyStatus::transient: return "retry";
    case ReplyStatus::refusal: return "refusal";
    case ReplyStatus::fatal: return "fatal";
  }
  return "fatal";
}

std::string trim(std::string s) {
  const auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && ws(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && ws(s[i])) ++i;
  return s.substr(i);
}

}  // namespace

void RequestPolicy::validate() const {
  if (max_in_flight < 1) throw Error(ErrorCode::ConfigError, "policy.max_in_flight must be >= 1");
  if (max_retries < 0) throw Error(ErrorCode::ConfigError, "policy.max_retries must be >= 0");
  if (multiplier < 1.0) throw Error(ErrorCode::ConfigError, "policy.multiplier must be >= 1");
  if (jitter < 0.0 || jitter >= 1.0) throw Error(ErrorCode::ConfigError, "policy.jitter must be in [0, 1)");
  if (initial_backoff.count() < 0 || max_backoff < initial_backoff) {
    throw Error(ErrorCode::ConfigError, "policy.max_backoff_ms must be >= policy.initial_backoff_ms");
  }
}

std::chrono::milliseconds RequestPolicy::backoff(int retry, std::string_view item) const {
  const double nominal =
      static_cast<double>(initial_backoff.count()) * std::pow(multiplier, std::max(0, retry - 1));
  std::mt19937_64 gen(mix_seed(stable_hash(item), static_cast<std::uint64_t>(retry)));
  const double u = std::uniform_real_distribution<double>(-1.0, 1.0)(gen);
  const double jittered = std::min(nominal, static_cast<double>(max_backoff.count())) * (1.0 + jitter * u);
  const double capped = std::min(jittered, static_cast<double>(max_backoff.count()));
  return std::chrono::milliseconds(static_cast<std::int64_t>(std::llround(std::max(0.0, capped))));
}

std::vector<JournalEntry> read_journal(const std::filesystem::path& path) {
  std::vector<JournalEntry> out;
  std::ifstream in(path);
  if (!in) return out;
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      if (j.contains("_meta")) continue;
      out.push_back({j.at("id").get<std::string>(), j.at("attempt").get<int>(),
                     j.at("status").get<std::string>(), j.value("output", std::string())});
    } catch (const json::exception&) {
      // a torn final line from an interrupted run is dropped; anything else is corrupt
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw Error(ErrorCode::MalformedRecord,
                  path.string() + " line " + std::to_string(lineno) + ": bad journal entry");
    }
  }
  return out;
}

Journal::Journal(const std::filesystem::path& path, const std::optional<FileProvenance>& provenance) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  if (!fresh) {
    entries_ = read_journal(path);
    for (const auto& e : entries_) {
      if (e.status == "ok") completed_[e.id] = e.output;
    }
  }
  out_.open(path, std::ios::app | std::ios::binary);
  if (!out_) throw Error(ErrorCode::Io, "cannot open journal " + path.string());
  if (fresh && provenance) {
    out_ << json{{"_meta", {{"config_hash", provenance->config_hash}, {"seed", provenance->seed}}}}.dump()
         << '\n' << std::flush;
  }
}

std::optional<std::string> Journal::completed(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = completed_.find(id);
  if (it == completed_.end()) return std::nullopt;
  return it->second;
}

void Journal::append(const JournalEntry& entry) {
  const json j = {{"id", entry.id}, {"attempt", entry.attempt}, {"status", entry.status},
                  {"output", entry.output}};
  std::lock_guard lock(mutex_);
  out_ << j.dump() << '\n' << std::flush;
  if (!out_) throw Error(ErrorCode::Io, "journal write failed");
  entries_.push_back(entry);
  if (entry.status == "ok") completed_[entry.id] = entry.output;
}

std::vector<JournalEntry> Journal::entries() const {
  std::lock_guard lock(mutex_);
  return entries_;
}

RequestPool::RequestPool(ChatProvider& provider, const RequestPolicy& policy, Journal* journal)
    : provider_(provider), policy_(policy), journal_(journal) {
  policy_.validate();
}

CallOutcome RequestPool::call(const std::string& id, const ChatRequest& request, int attempt_base) {
  CallOutcome outcome;
  for (int attempt = 1;; ++attempt) {
    if (attempt > 1 || attempt_base > 0) retries_.fetch_add(1);
    calls_.fetch_add(1);
    const std::size_t now = in_flight_.fetch_add(1) + 1;
    std::size_t peak = peak_.load();
    while (now > peak && !peak_.compare_exchange_weak(peak, now)) {
    }
    ChatReply reply = provider_.complete(request);
    in_flight_.fetch_sub(1);

    outcome.attempts = attempt;
    outcome.status = reply.status;
    outcome.text = reply.status == ReplyStatus::ok ? trim(std::move(reply.text)) : std::string();
    outcome.error = std::move(reply.error);

    const bool retry = reply.status == ReplyStatus::transient && attempt <= policy_.max_retries;
    if (journal_) {
      std::string status(status_word(reply.status));
      if (reply.status == ReplyStatus::transient && !retry) status = "exhausted";
      journal_->append({id, attempt_base + attempt, status,
                        reply.status == ReplyStatus::ok ? outcome.text : outcome.error});
    }
    if (!retry) return outcome;
    std::this_thread::sleep_for(policy_.backoff(attempt, id));
  }
}

void RequestPool::run(std::size_t n, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t workers = std::min(policy_.max_in_flight, n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            next.store(n);
          }
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

BatchStats RequestPool::stats() const {
  return {calls_.load(), retries_.load(), skipped_.load(), peak_.load()};
}

TranslateResult translate_batch(const CorpusSlice& posts, const PromptTemplate& prompt,
                                ChatProvider& provider, const RequestPolicy& policy,
                                const TranslateOptions& options) {
  const auto platform = platform_of(prompt);
  if (!platform) throw Error(ErrorCode::ConfigError, "template " + prompt.name + " is not a translation prompt");
  for (const Post& p : posts.posts) {
    if (p.platform != *platform) {
      throw Error(ErrorCode::ConfigError, "post " + p.id + " is " + std::string(name(p.platform)) +
                                              " but template " + prompt.name + " targets " +
                                              std::string(name(*platform)));
    }
  }

  TranslateResult result;
  result.slice = posts;
  std::vector<std::optional<ItemFailure>> failures(posts.size());
  RequestPool pool(provider, policy, options.journal);

  pool.run(posts.size(), [&](std::size_t i) {
    Post& post = result.slice.posts[i];
    if (post.text_tgt) {
      pool.note_skipped();
      return;
    }
    if (options.journal) {
      if (auto done = options.journal->completed(post.id)) {
        post.text_tgt = std::move(*done);
        pool.note_skipped();
        return;
      }
    }
    const CallOutcome outcome =
        pool.call(post.id, {prompt.system_text, post.text_src, options.temperature});
    switch (outcome.status) {
      case ReplyStatus::ok:
        post.text_tgt = outcome.text;
        break;
      case ReplyStatus::transient:
        failures[i] = ItemFailure{post.id, ErrorCode::ExhaustedRetries,
                                  std::to_string(outcome.attempts) + " attempts: " + outcome.error};
        break;
      case ReplyStatus::refusal:
        failures[i] = ItemFailure{post.id, ErrorCode::ProviderRefusal, outcome.error};
        break;
      case ReplyStatus::fatal:
        failures[i] = ItemFailure{post.id, ErrorCode::BackendUnavailable, outcome.error};
        break;
    }
  });

  for (auto& f : failures) {
    if (f) result.failures.push_back(std::move(*f));
  }
  result.stats = pool.stats();
  return result;
}

}  // namespace xfid
