#include "xfid/embedding.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <exception>
#include <fstream>
#include <thread>
#include <unordered_set>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "http_util.hpp"
#include "xfid/error.hpp"

namespace xfid {

using json = nlohmann::json;

namespace {

constexpr std::array<char, 16> kMagic{'X', 'F', 'I', 'D', 'E', 'M', 'B', '1',
                                      0,   0,   0,   0,   0,   0,   0,   0};

void put_u16(std::ostream& out, std::uint16_t v) {
  const char bytes[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
  out.write(bytes, 2);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>((v >> 16) & 0xff), static_cast<char>(v >> 24)};
  out.write(bytes, 4);
}

bool get_bytes(std::istream& in, unsigned char* dst, std::size_t n) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
  return static_cast<std::size_t>(in.gcount()) == n;
}

std::uint32_t le_u32(const unsigned char* b) {
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void check_finite(std::span<const float> values, std::size_t dim, std::size_t row_offset) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(ErrorCode::NonFiniteEmbedding,
                  "row " + std::to_string(row_offset + i / std::max<std::size_t>(dim, 1)));
    }
  }
}

}  // namespace

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> ids, std::size_t dim,
                                 std::vector<float> data)
    : ids_(std::move(ids)), dim_(dim), data_(std::move(data)) {
  if (data_.size() != ids_.size() * dim_) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(data_.size()) + " values for " + std::to_string(ids_.size()) +
                    " rows of dimension " + std::to_string(dim_));
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& id : ids_) {
    if (!seen.insert(id).second) throw Error(ErrorCode::MalformedRecord, "duplicate id " + id);
  }
  check_finite(data_, dim_, 0);
}

EmbeddingMatrix EmbeddingMatrix::select(std::span<const std::size_t> rows) const {
  std::vector<std::string> ids;
  std::vector<float> data;
  ids.reserve(rows.size());
  data.reserve(rows.size() * dim_);
  for (std::size_t r : rows) {
    ids.push_back(ids_.at(r));
    auto src = row(r);
    data.insert(data.end(), src.begin(), src.end());
  }
  return EmbeddingMatrix(std::move(ids), dim_, std::move(data));
}

HttpEmbeddingBackend::HttpEmbeddingBackend(BackendConfig cfg) : cfg_(std::move(cfg)) {
  auto parts = detail::split_url(cfg_.endpoint);
  origin_ = std::move(parts.origin);
  path_ = std::move(parts.path);
  token_ = detail::read_token(cfg_.token_env);
}

std::vector<std::vector<float>> HttpEmbeddingBackend::embed(std::span<const std::string> texts) {
  httplib::Client client(origin_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(cfg_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  httplib::Headers headers;
  if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
  const json body = {{"texts", std::vector<std::string>(texts.begin(), texts.end())}};

  auto res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorCode::BackendUnavailable,
                cfg_.endpoint + ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::BackendUnavailable,
                cfg_.endpoint + ": HTTP " + std::to_string(res->status));
  }
  std::vector<std::vector<float>> out;
  try {
    const json reply = json::parse(res->body);
    for (const auto& row : reply.at("embeddings")) {
      std::vector<float> v;
      v.reserve(row.size());
      for (const auto& x : row) {
        // null decodes as NaN so the finiteness guard reports it
        v.push_back(x.is_null() ? std::nanf("") : x.get<float>());
      }
      out.push_back(std::move(v));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BackendUnavailable,
                cfg_.endpoint + ": malformed response: " + e.what());
  }
  return out;
}

TableEmbeddingBackend::TableEmbeddingBackend(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open embedding table " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json rec = json::parse(line);
      if (rec.contains("_meta")) continue;
      table_[rec.at("text").get<std::string>()] = rec.at("embedding").get<std::vector<float>>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::MalformedRecord, path.string() + " line " +
                                                  std::to_string(lineno) + ": " + e.what());
    }
  }
}

std::vector<std::vector<float>> TableEmbeddingBackend::embed(std::span<const std::string> texts) {
  std::vector<std::vector<float>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    auto it = table_.find(t);
    if (it == table_.end()) {
      throw Error(ErrorCode::BackendUnavailable,
                  "no table entry for text \"" + t.substr(0, 60) + "\"");
    }
    out.push_back(it->second);
  }
  return out;
}

EmbeddingMatrix fetch_embeddings(EmbeddingBackend& backend, const BackendConfig& cfg,
                                 std::span<const std::string> texts,
                                 std::vector<std::string> ids) {
  if (texts.empty()) throw Error(ErrorCode::EmptyInput, "no texts to embed");
  if (ids.size() != texts.size()) {
    throw Error(ErrorCode::MisalignedIds, std::to_string(ids.size()) + " ids for " +
                                              std::to_string(texts.size()) + " texts");
  }
  if (cfg.batch_size == 0) throw Error(ErrorCode::ConfigError, "batch_size must be >= 1");

  const std::size_t batches = (texts.size() + cfg.batch_size - 1) / cfg.batch_size;
  std::vector<std::vector<std::vector<float>>> results(batches);
  std::vector<std::exception_ptr> failures(batches);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t b = next++; b < batches; b = next++) {
      const std::size_t begin = b * cfg.batch_size;
      const std::size_t count = std::min(cfg.batch_size, texts.size() - begin);
      try {
        results[b] = backend.embed(texts.subspan(begin, count));
      } catch (...) {
        failures[b] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(cfg.max_concurrent, 1, batches);
  {
    std::vector<std::jthread> pool;
    for (std::size_t i = 1; i < workers; ++i) pool.emplace_back(worker);
    worker();
  }

  std::size_t dim = 0;
  std::vector<float> data;
  for (std::size_t b = 0; b < batches; ++b) {
    if (failures[b]) std::rethrow_exception(failures[b]);
    const std::size_t begin = b * cfg.batch_size;
    const std::size_t expected = std::min(cfg.batch_size, texts.size() - begin);
    if (results[b].size() != expected) {
      throw Error(ErrorCode::DimensionMismatch,
                  "batch " + std::to_string(b) + ": " + std::to_string(results[b].size()) +
                      " vectors for " + std::to_string(expected) + " texts");
    }
    for (std::size_t r = 0; r < results[b].size(); ++r) {
      const auto& v = results[b][r];
      if (b == 0 && r == 0) {
        dim = v.size();
        if (dim == 0) throw Error(ErrorCode::DimensionMismatch, "batch 0: empty vector");
        data.reserve(texts.size() * dim);
      }
      if (v.size() != dim) {
        throw Error(ErrorCode::DimensionMismatch,
                    "batch " + std::to_string(b) + ": dimension " + std::to_string(v.size()) +
                        " after " + std::to_string(dim));
      }
      check_finite(v, dim, begin + r);
      data.insert(data.end(), v.begin(), v.end());
    }
  }
  return EmbeddingMatrix(std::move(ids), dim, std::move(data));
}

void write_matrix(const EmbeddingMatrix& m, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, static_cast<std::uint32_t>(m.rows()));
  put_u32(out, static_cast<std::uint32_t>(m.dim()));
  for (const auto& id : m.ids()) {
    if (id.size() > 0xffff) throw Error(ErrorCode::MalformedRecord, "id longer than 65535 bytes");
    put_u16(out, static_cast<std::uint16_t>(id.size()));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
  }
  for (float x : m.data()) put_u32(out, std::bit_cast<std::uint32_t>(x));
}

void save_matrix(const EmbeddingMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  write_matrix(m, out);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

EmbeddingMatrix read_matrix(std::istream& in) {
  std::array<unsigned char, 16> magic{};
  if (!get_bytes(in, magic.data(), magic.size()) ||
      std::memcmp(magic.data(), kMagic.data(), kMagic.size()) != 0) {
    throw Error(ErrorCode::CorruptHeader, "bad magic");
  }
  unsigned char header[8];
  if (!get_bytes(in, header, sizeof header)) {
    throw Error(ErrorCode::CorruptHeader, "header shorter than 24 bytes");
  }
  const std::uint32_t n = le_u32(header);
  const std::uint32_t d = le_u32(header + 4);

  std::vector<std::string> ids;
  for (std::uint32_t i = 0; i < n; ++i) {
    unsigned char len_bytes[2];
    if (!get_bytes(in, len_bytes, 2)) {
      throw Error(ErrorCode::TruncatedPayload, "id table ends at id " + std::to_string(i));
    }
    const std::size_t len = len_bytes[0] | (static_cast<std::size_t>(len_bytes[1]) << 8);
    std::string id(len, '\0');
    if (!get_bytes(in, reinterpret_cast<unsigned char*>(id.data()), len)) {
      throw Error(ErrorCode::TruncatedPayload, "id " + std::to_string(i) + " is cut short");
    }
    ids.push_back(std::move(id));
  }

  std::vector<float> data;
  std::vector<unsigned char> row(static_cast<std::size_t>(d) * 4);
  for (std::uint32_t r = 0; r < n; ++r) {
    if (!get_bytes(in, row.data(), row.size())) {
      throw Error(ErrorCode::TruncatedPayload, "payload ends inside row " + std::to_string(r));
    }
    for (std::uint32_t c = 0; c < d; ++c) {
      data.push_back(std::bit_cast<float>(le_u32(row.data() + 4 * c)));
    }
  }
  return EmbeddingMatrix(std::move(ids), d, std::move(data));
}

EmbeddingMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return read_matrix(in);
}

EmbeddingMatrix l2_normalize(const EmbeddingMatrix& m) {
  std::vector<float> data(m.data());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double sq = 0.0;
    for (float x : m.row(r)) sq += static_cast<double>(x) * x;
    if (sq == 0.0) throw Error(ErrorCode::ZeroRow, "row " + std::to_string(r));
    const double inv = 1.0 / std::sqrt(sq);
    for (std::size_t c = 0; c < m.dim(); ++c) {
      data[r * m.dim() + c] = static_cast<float>(m.row(r)[c] * inv);
    }
  }
  return EmbeddingMatrix(m.ids(), m.dim(), std::move(data));
}

}  // namespace xfid
