#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "xfid/artifact_checks.hpp"
#include "xfid/embedding.hpp"
#include "xfid/parity.hpp"

namespace httplib {
class Server;
}

namespace xfid::test {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

struct CommandResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

/// Runs a shell command, capturing stdout and stderr.
CommandResult run_command(const std::string& command);

/// Matrix with i.i.d. standard normal entries and ids "r0", "r1", ...
EmbeddingMatrix random_matrix(std::size_t n, std::size_t d, std::uint64_t seed, double scale = 1.0);

/// What the mock returns for one request.
struct MockReply {
  int status = 200;
  std::string content;           // message content on 200
  bool refusal = false;
  std::chrono::milliseconds delay{0};
};

/// Chat-completion endpoint on 127.0.0.1 backed by a handler. Counts
/// concurrent requests server-side.
class MockChatServer {
 public:
  using Handler = std::function<MockReply(const std::string& system, const std::string& user, int call_index)>;

  explicit MockChatServer(Handler handler);
  ~MockChatServer();

  std::string endpoint() const;
  int port() const { return port_; }
  std::size_t calls() const { return calls_.load(); }
  std::size_t peak_in_flight() const { return peak_.load(); }
  /// user message of every call, in arrival order
  std::vector<std::string> users() const;

 private:
  Handler handler_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<std::size_t> calls_{0};
  std::atomic<std::size_t> in_flight_{0};
  std::atomic<std::size_t> peak_{0};
  mutable std::mutex mutex_;
  std::vector<std::string> users_;
};

/// Synthetic source/translation pair with injected artifact violations.
/// `expected` lists exactly the violations that were injected, unordered.
struct MutatedPair {
  std::string src;
  std::string tgt;
  Platform platform = Platform::twitter;
  std::vector<Violation> expected;
};

MutatedPair mutated_pair(std::mt19937_64& rng);

/// 51,744 cosines from a piecewise-linear quantile function; summary renders
/// as 0.889 / 0.063 / 0.789 / 0.960.
std::vector<double> reference_cosines();

/// Ten stored per-fold EN/PL AUCs for one foundation.
std::vector<FoldAuc> reference_care_folds();

/// Body of a chat-completion response.
std::string completion_body(const std::string& content, bool refusal = false);

}  // namespace xfid::test
