#include "xfid/fixture.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <random>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "xfid/corpus.hpp"
#include "xfid/error.hpp"

namespace xfid {

namespace {

using json = nlohmann::json;

struct Phrase {
  const char* en;
  const char* pl;
};

constexpr std::array<Phrase, 5> kRelations{{
    {"my sister", "mojej siostrze"},
    {"my roommate", "mojemu współlokatorowi"},
    {"my boss", "mojemu szefowi"},
    {"my best friend", "mojemu najlepszemu kumplowi"},
    {"my neighbour", "mojemu sąsiadowi"},
}};

constexpr std::array<Phrase, 6> kTopics{{
    {"she can't borrow my car again", "że znowu nie pożyczy mojego auta"},
    {"the party was a disaster", "że impreza była katastrofą"},
    {"I won't cover his shift", "że nie wezmę za niego zmiany"},
    {"the rent split is unfair", "że podział czynszu jest niesprawiedliwy"},
    {"I'm skipping the wedding", "że olewam ten ślub"},
    {"the dog stays with me", "że pies zostaje ze mną"},
}};

constexpr std::array<Phrase, 4> kOpeners{{
    {"Marching again today", "Znowu maszerujemy dzisiaj"},
    {"Cannot believe this happened", "Nie mogę uwierzyć, że to się stało"},
    {"Everyone needs to see this", "Wszyscy muszą to zobaczyć"},
    {"Still waiting for answers", "Wciąż czekamy na odpowiedzi"},
}};

constexpr std::array<Phrase, 6> kClaims{{
    {"justice for the family", "sprawiedliwość dla rodziny"},
    {"the police report was a lie", "raport policji to było kłamstwo"},
    {"we stand together", "stoimy razem"},
    {"silence is complicity smh", "milczenie to współudział smh"},
    {"the city owes us answers", "miasto jest nam winne odpowiedzi"},
    {"this is not over", "to się jeszcze nie skończyło"},
}};

constexpr std::array<const char*, 4> kHashtags{"#BLM", "#BlackLivesMatter", "#JusticeForAll", "#MeToo"};
constexpr std::array<const char*, 3> kMentions{"@CityCouncil", "@nytimes", "@mayor_office"};

/// Standard normal by Box-Muller on raw generator output, so the fixture does
/// not depend on the library's distribution implementation.
class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed) : gen_(seed) {}
  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

Post make_post(std::size_t i) {
  Post p;
  p.corpus = "SYN";
  if (i < 26) {
    p.id = fmt::format("ev{:02}", i);
    p.subcorpus = "everyday";
    p.platform = Platform::reddit;
    const Phrase& rel = kRelations[i % kRelations.size()];
    const Phrase& top = kTopics[(i / kRelations.size()) % kTopics.size()];
    p.text_src = fmt::format("AITA for telling {} that {}? NTA imo lol", rel.en, top.en);
    p.text_tgt = fmt::format("AITA, bo powiedziałem {}, {}? NTA imo lol", rel.pl, top.pl);
    if (i % 4 == 1) {
      p.text_src = ">" + p.text_src;
      *p.text_tgt = ">" + *p.text_tgt;
    }
  } else {
    const std::size_t j = i - 26;
    p.id = fmt::format("blm{:02}", j);
    p.subcorpus = "blm";
    p.platform = Platform::twitter;
    const Phrase& open = kOpeners[j % kOpeners.size()];
    const Phrase& claim = kClaims[(j / kOpeners.size()) % kClaims.size()];
    const char* tag = kHashtags[j % kHashtags.size()];
    const char* mention = kMentions[j % kMentions.size()];
    p.text_src = fmt::format("{} {} {} {}", open.en, tag, claim.en, mention);
    p.text_tgt = fmt::format("{} {} {} {}", open.pl, tag, claim.pl, mention);
    if (j % 3 == 0) {
      const std::string url = fmt::format(" https://t.co/x{:02}", j);
      p.text_src += url;
      *p.text_tgt += url;
    }
  }
  if (i % 6 == 5) {
    p.non_moral = true;
  } else {
    for (std::size_t f = 0; f < 5; ++f) p.labels[f] = ((i * 7 + f * 3) % 5) < 2;
  }
  return p;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << content;
}

std::string float_list(const std::vector<float>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += fmt::format("{:.9g}", v[i]);
  }
  return s + "]";
}

}  // namespace

void write_synthetic_fixture(const std::filesystem::path& dir, const FixtureOptions& options) {
  std::filesystem::create_directories(dir);
  CorpusSlice slice;
  slice.name = "syn";
  for (std::size_t i = 0; i < 50; ++i) slice.posts.push_back(make_post(i));

  save_corpus(slice, dir / "corpus.jsonl", CorpusFormat::jsonl);
  CorpusSlice source_only = slice;
  for (Post& p : source_only.posts) p.text_tgt.reset();
  save_corpus(source_only, dir / "corpus_en.jsonl", CorpusFormat::jsonl);

  const std::size_t d = options.dim;
  Gaussian gauss(options.seed);
  std::vector<std::vector<double>> directions(5, std::vector<double>(d));
  for (auto& dir_vec : directions) {
    for (double& x : dir_vec) x = gauss();
  }
  std::vector<double> shared(d);
  for (double& x : shared) x = 1.5 + 0.5 * gauss();

  std::string table;
  for (const Post& p : slice.posts) {
    std::vector<double> base(d);
    for (std::size_t c = 0; c < d; ++c) {
      base[c] = shared[c] + 0.8 * gauss();
      for (std::size_t f = 0; f < 5; ++f) {
        if (p.labels[f]) base[c] += 0.6 * directions[f][c];
      }
    }
    std::vector<float> src(d);
    std::vector<float> tgt(d);
    for (std::size_t c = 0; c < d; ++c) {
      src[c] = static_cast<float>(base[c] + 0.2 * gauss());
      tgt[c] = static_cast<float>(base[c] + 0.55 * gauss());
    }
    table += "{\"text\":" + json(p.text_src).dump() + ",\"embedding\":" + float_list(src) + "}\n";
    table += "{\"text\":" + json(*p.text_tgt).dump() + ",\"embedding\":" + float_list(tgt) + "}\n";
  }
  write_text(dir / "embeddings.jsonl", table);

  write_text(dir / "xfid.toml", fmt::format(R"([run]
seed = {seed}
out = "out"
corpus_name = "syn"

[corpus]
path = "corpus.jsonl"
format = "jsonl"

[sample]
size = 10

[embedding]
backend = "table"
path = "embeddings.jsonl"
batch_size = 8

[provider]
endpoint = "{endpoint}"
model = "mock"
temperature = 0.3
timeout_s = 10
prompt_dir = "{prompts}"

[policy]
max_in_flight = 20
max_retries = 3
initial_backoff_ms = 20
max_backoff_ms = 200

[parity]
k = 5
l2_lambda = 1e-4
threshold = 0.02

[thresholds]
cosine = 0.80
gap = 0.05
clean = 90.0
)",
                                            fmt::arg("seed", options.seed),
                                            fmt::arg("endpoint", options.provider_endpoint),
                                            fmt::arg("prompts", options.prompt_dir)));
}

}  // namespace xfid
