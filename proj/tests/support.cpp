#include "support.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace xfid::test {

using json = nlohmann::json;

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = std::filesystem::temp_directory_path() /
          ("xfid_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

CommandResult run_command(const std::string& command) {
  static std::atomic<int> counter{0};
  const auto err_path = std::filesystem::temp_directory_path() /
                        ("xfid-stderr-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  CommandResult result;
  FILE* pipe = ::popen((command + " 2>" + err_path.string()).c_str(), "r");
  if (pipe == nullptr) return result;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) result.out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.err = read_file(err_path);
  std::filesystem::remove(err_path);
  return result;
}

EmbeddingMatrix random_matrix(std::size_t n, std::size_t d, std::uint64_t seed, double scale) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  std::vector<std::string> ids;
  std::vector<float> data(n * d);
  for (std::size_t i = 0; i < n; ++i) ids.push_back("r" + std::to_string(i));
  for (float& x : data) x = static_cast<float>(scale * normal(gen));
  return EmbeddingMatrix(std::move(ids), d, std::move(data));
}

std::string completion_body(const std::string& content, bool refusal) {
  json message = {{"role", "assistant"}, {"content", refusal ? json(nullptr) : json(content)},
                  {"refusal", refusal ? json("I can't help with that.") : json(nullptr)}};
  return json{{"choices", json::array({{{"index", 0}, {"message", message}, {"finish_reason", "stop"}}})}}.dump();
}

MockChatServer::MockChatServer(Handler handler) : handler_(std::move(handler)), server_(std::make_unique<httplib::Server>()) {
  server_->new_task_queue = [] { return new httplib::ThreadPool(64); };
  server_->Post(R"(/v1/chat/completions)", [this](const httplib::Request& req, httplib::Response& res) {
    const std::size_t now = in_flight_.fetch_add(1) + 1;
    std::size_t peak = peak_.load();
    while (now > peak && !peak_.compare_exchange_weak(peak, now)) {
    }
    const int index = static_cast<int>(calls_.fetch_add(1));
    std::string system;
    std::string user;
    try {
      const json body = json::parse(req.body);
      system = body.at("messages").at(0).at("content").get<std::string>();
      user = body.at("messages").at(1).at("content").get<std::string>();
    } catch (const json::exception&) {
      res.status = 400;
      in_flight_.fetch_sub(1);
      return;
    }
    {
      std::lock_guard lock(mutex_);
      users_.push_back(user);
    }
    const MockReply reply = handler_(system, user, index);
    if (reply.delay.count() > 0) std::this_thread::sleep_for(reply.delay);
    res.status = reply.status;
    if (reply.status == 200) res.set_content(completion_body(reply.content, reply.refusal), "application/json");
    in_flight_.fetch_sub(1);
  });
  port_ = server_->bind_to_any_port("127.0.0.1");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

MockChatServer::~MockChatServer() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string MockChatServer::endpoint() const {
  return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
}

std::vector<std::string> MockChatServer::users() const {
  std::lock_guard lock(mutex_);
  return users_;
}

}  // namespace xfid::test

namespace xfid::test {

namespace {

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& pool) {
  return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
}

bool coin(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

std::vector<std::string> distinct(std::mt19937_64& rng, std::vector<std::string> pool, std::size_t n) {
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(std::min(n, pool.size()));
  return pool;
}

const std::vector<std::string> kEnglish{"why", "don't", "you", "just", "leave", "him", "lol", "this",
                                        "is", "exactly", "matters", "men", "power", "smh", "bro"};
const std::vector<std::string> kPolish{"dlaczego", "po", "prostu", "nie", "zażółć", "gęślą", "jaźń",
                                       "właśnie", "znaczenie", "faceci", "władzy", "stary", "ziom"};
const std::vector<std::string> kHashtags{"#BLM", "#MeToo", "#BlackLivesMatter", "#ICantBreathe",
                                         "#NTA", "#AITA", "#Election2020", "#stopthesteal"};
const std::vector<std::string> kMentions{"@nytimes", "@POTUS", "@jack_dorsey", "@ana", "@kasia99"};
const std::vector<std::string> kUrls{"https://t.co/abc123", "http://example.com/a?b=1",
                                     "www.reddit.com/r/AITA"};
const std::vector<std::string> kCyrillicWords{"привет", "это", "кот", "Москва", "ещё"};
const std::vector<std::string> kPunct{"", "", ",", ".", "!", "?"};

// Returns an edited token that no longer contains the original tag.
std::string edit_tag(std::mt19937_64& rng, const std::string& tag) {
  switch (std::uniform_int_distribution<int>(0, 4)(rng)) {
    case 0: return tag + (tag[0] == '#' ? "u" : "owi");  // Polish inflection
    case 1: return tag.substr(1);                         // sigil dropped
    case 2: return std::string(1, tag[0]) + " " + tag.substr(1);
    case 3: {
      std::string t = tag;
      for (char& c : t) c = static_cast<char>(std::islower(static_cast<unsigned char>(c)) ? std::toupper(c) : std::tolower(c));
      return t;
    }
    default: return tag[0] == '#' ? "#CzarneŻycieMaZnaczenie" : "@Żaneta";
  }
}

}  // namespace

std::vector<double> reference_cosines() {
  constexpr std::size_t n = 51744;
  constexpr std::array<double, 5> u{0.0, 0.05, 0.5, 0.95, 1.0};
  constexpr std::array<double, 5> q{0.6773, 0.789, 0.911, 0.960, 0.995};
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n - 1);
    std::size_t k = 0;
    while (k < 3 && x > u[k + 1]) ++k;
    out[i] = q[k] + (q[k + 1] - q[k]) * (x - u[k]) / (u[k + 1] - u[k]);
  }
  return out;
}

std::vector<FoldAuc> reference_care_folds() {
  constexpr std::array<double, 10> en{0.8948, 0.8334, 0.8595, 0.8189, 0.8760,
                                      0.8456, 0.8710, 0.8405, 0.8532, 0.8344};
  constexpr std::array<double, 10> pl{0.8730, 0.8300, 0.8460, 0.8220, 0.8570,
                                      0.8340, 0.8640, 0.8150, 0.8480, 0.8310};
  std::vector<FoldAuc> out;
  for (std::size_t i = 0; i < en.size(); ++i) out.push_back({en[i], pl[i]});
  return out;
}

MutatedPair mutated_pair(std::mt19937_64& rng) {
  MutatedPair pair;
  pair.platform = coin(rng, 0.5) ? Platform::twitter : Platform::reddit;
  const auto tags = distinct(rng, kHashtags, std::uniform_int_distribution<std::size_t>(0, 3)(rng));
  const auto mentions = distinct(rng, kMentions, std::uniform_int_distribution<std::size_t>(0, 2)(rng));
  const auto urls = distinct(rng, kUrls, coin(rng, 0.4) ? 1 : 0);

  std::vector<std::string> src_tokens;
  for (int i = std::uniform_int_distribution<int>(2, 10)(rng); i > 0; --i) src_tokens.push_back(pick(rng, kEnglish));
  for (const auto* group : {&tags, &mentions, &urls}) {
    for (const auto& t : *group) {
      const auto at = std::uniform_int_distribution<std::size_t>(0, src_tokens.size())(rng);
      src_tokens.insert(src_tokens.begin() + static_cast<long>(at), t + pick(rng, kPunct));
    }
  }
  for (std::size_t i = 0; i < src_tokens.size(); ++i) pair.src += (i ? " " : "") + src_tokens[i];

  if (coin(rng, 0.02)) {
    pair.tgt = coin(rng, 0.5) ? "" : " \n ";
    pair.expected.push_back({ViolationKind::EmptyTranslation, ""});
    for (const auto& t : tags) pair.expected.push_back({ViolationKind::HashtagAltered, t});
    for (const auto& t : mentions) pair.expected.push_back({ViolationKind::MentionAltered, t});
    for (const auto& t : urls) pair.expected.push_back({ViolationKind::UrlAltered, t});
    return pair;
  }

  std::vector<std::string> words;
  for (int i = std::uniform_int_distribution<int>(2, 10)(rng); i > 0; --i) words.push_back(pick(rng, kPolish));
  std::vector<std::string> kept;
  std::vector<Violation> hashtag_v;
  std::vector<Violation> mention_v;
  std::vector<Violation> url_v;
  for (const auto& t : tags) {
    const bool edit = coin(rng, 0.3);
    kept.push_back(edit ? edit_tag(rng, t) : t);
    if (edit) hashtag_v.push_back({ViolationKind::HashtagAltered, t});
  }
  for (const auto& t : mentions) {
    const bool edit = coin(rng, 0.3);
    kept.push_back(edit ? edit_tag(rng, t) : t);
    if (edit) mention_v.push_back({ViolationKind::MentionAltered, t});
  }
  for (const auto& t : urls) {
    const bool edit = coin(rng, 0.2);
    kept.push_back(edit ? t + "pl" : t);
    if (edit) url_v.push_back({ViolationKind::UrlAltered, t});
  }
  for (const auto& t : kept) {
    const auto at = std::uniform_int_distribution<std::size_t>(0, words.size())(rng);
    words.insert(words.begin() + static_cast<long>(at), t + pick(rng, kPunct));
  }

  std::optional<Violation> cyrillic;
  if (coin(rng, 0.3)) {
    const auto at = std::uniform_int_distribution<std::size_t>(0, words.size() - 1)(rng);
    switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
      case 0: {
        const std::string& w = pick(rng, kCyrillicWords);
        words.insert(words.begin() + static_cast<long>(at), w);
        cyrillic = Violation{ViolationKind::CyrillicLeakage, w};
        break;
      }
      case 1: {
        // Cyrillic ending glued to a Polish word
        const auto& w = pick(rng, kPolish);
        words.insert(words.begin() + static_cast<long>(at), w + "ы");
        cyrillic = Violation{ViolationKind::CyrillicLeakage, "ы"};
        break;
      }
      default: {
        // homoglyph: Cyrillic а in place of Latin a
        words.insert(words.begin() + static_cast<long>(at), "stаry");
        cyrillic = Violation{ViolationKind::CyrillicLeakage, "а"};
        break;
      }
    }
  }
  for (std::size_t i = 0; i < words.size(); ++i) pair.tgt += (i ? " " : "") + words[i];

  for (const auto* group : {&hashtag_v, &mention_v, &url_v}) {
    pair.expected.insert(pair.expected.end(), group->begin(), group->end());
  }
  if (cyrillic) pair.expected.push_back(*cyrillic);
  return pair;
}

}  // namespace xfid::test
