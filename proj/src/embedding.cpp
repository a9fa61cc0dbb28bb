#include "poolbench/embedding.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "poolbench/errors.hpp"
#include "poolbench/utf8.hpp"

namespace poolbench {

static_assert(std::numeric_limits<float>::is_iec559, "binary32 required");

TokenEmbeddingMatrix::TokenEmbeddingMatrix(std::string statement_id, std::size_t dim,
                                           std::vector<double> values)
    : statement_id_(std::move(statement_id)), dim_(dim), values_(std::move(values)) {
  if (dim_ == 0) throw ConfigError("embedding dim must be positive");
  if (values_.empty() || values_.size() % dim_ != 0) {
    throw ConfigError("embedding matrix for '" + statement_id_ + "' has " +
                      std::to_string(values_.size()) + " values, not a positive multiple of dim " +
                      std::to_string(dim_));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw ConfigError("non-finite embedding value for '" + statement_id_ + "'");
    }
  }
}

EmbeddingStore::EmbeddingStore(std::size_t dim, std::string provenance)
    : dim_(dim), provenance_(std::move(provenance)) {
  if (dim_ == 0) throw ConfigError("embedding store dim must be positive");
}

void EmbeddingStore::add(TokenEmbeddingMatrix m) {
  if (m.dim() != dim_) {
    throw DataError("embedding for '" + m.statement_id() + "' has dim " +
                    std::to_string(m.dim()) + ", store dim is " + std::to_string(dim_));
  }
  std::string key = m.statement_id();
  if (!entries_.emplace(std::move(key), std::move(m)).second) {
    throw DataError("duplicate embedding id");
  }
}

const TokenEmbeddingMatrix* EmbeddingStore::find(std::string_view id) const {
  const auto it = entries_.find(id);
  return it == entries_.end() ? nullptr : &it->second;
}

namespace {

class LeWriter {
 public:
  explicit LeWriter(std::ostream& out) : out_(out) {}

  void u32(std::uint32_t v) {
    std::array<char, 4> b;
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    bytes(b.data(), b.size());
  }
  void f32(float f) { u32(std::bit_cast<std::uint32_t>(f)); }
  void bytes(const char* p, std::size_t n) {
    out_.write(p, static_cast<std::streamsize>(n));
    if (!out_) throw std::ios_base::failure("write failed");
    written_ += n;
  }
  std::uint64_t written() const { return written_; }

 private:
  std::ostream& out_;
  std::uint64_t written_ = 0;
};

class LeReader {
 public:
  explicit LeReader(std::istream& in) : in_(in) {}

  void bytes(char* p, std::size_t n) {
    in_.read(p, static_cast<std::streamsize>(n));
    const auto got = static_cast<std::size_t>(in_.gcount());
    if (got != n) {
      throw DataError("unexpected end of stream at byte offset " +
                      std::to_string(offset_ + got));
    }
    offset_ += n;
  }
  std::uint32_t u32() {
    std::array<unsigned char, 4> b;
    bytes(reinterpret_cast<char*>(b.data()), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  }
  float f32() { return std::bit_cast<float>(u32()); }
  std::uint64_t offset() const { return offset_; }

 private:
  std::istream& in_;
  std::uint64_t offset_ = 0;
};

std::uint32_t checked_u32(std::size_t n, const char* what) {
  if (n > std::numeric_limits<std::uint32_t>::max()) {
    throw ConfigError(std::string(what) + " exceeds the 32-bit STEB limit");
  }
  return static_cast<std::uint32_t>(n);
}

}  // namespace

std::uint64_t write_steb(const EmbeddingStore& store, std::ostream& out) {
  if (store.empty()) throw ConfigError("refusing to write an empty embedding store");
  LeWriter w(out);
  w.bytes(kStebMagic.data(), kStebMagic.size());
  w.u32(checked_u32(store.dim(), "dim"));
  w.u32(checked_u32(store.size(), "record count"));
  for (const auto& [id, m] : store.entries()) {
    w.u32(checked_u32(id.size(), "id length"));
    w.bytes(id.data(), id.size());
    w.u32(checked_u32(m.tokens(), "token count"));
    for (double v : m.values()) w.f32(static_cast<float>(v));
  }
  return w.written();
}

EmbeddingStore read_steb(std::istream& in, std::string provenance) {
  LeReader r(in);
  std::array<char, 6> magic{};
  try {
    r.bytes(magic.data(), magic.size());
  } catch (const DataError&) {
    throw DataError("unrecognized format: stream shorter than the STEB magic");
  }
  if (std::string_view(magic.data(), magic.size()) != kStebMagic) {
    throw DataError("unrecognized format: bad STEB magic");
  }
  const std::uint32_t dim = r.u32();
  if (dim == 0) throw DataError("STEB format error: dim is zero");
  const std::uint32_t count = r.u32();
  EmbeddingStore store(dim, std::move(provenance));
  for (std::uint32_t rec = 0; rec < count; ++rec) {
    const std::uint64_t record_offset = r.offset();
    const std::uint32_t id_len = r.u32();
    std::string id(id_len, '\0');
    r.bytes(id.data(), id_len);
    if (id.empty() || utf8::find_invalid(id)) {
      throw DataError("STEB format error: invalid id in record at byte offset " +
                      std::to_string(record_offset));
    }
    const std::uint32_t tokens = r.u32();
    if (tokens == 0) {
      throw DataError("STEB format error: record '" + id + "' has zero tokens");
    }
    std::vector<double> values(static_cast<std::size_t>(tokens) * dim);
    for (auto& v : values) {
      v = static_cast<double>(r.f32());
      if (!std::isfinite(v)) {
        throw DataError("STEB format error: non-finite value in record '" + id + "'");
      }
    }
    if (store.find(id)) throw DataError("STEB format error: duplicate id '" + id + "'");
    store.add(TokenEmbeddingMatrix(std::move(id), dim, std::move(values)));
  }
  return store;
}

void write_steb_file(const EmbeddingStore& store, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  write_steb(store, out);
  out.flush();
  if (!out) throw std::ios_base::failure("write failed: " + path.string());
}

EmbeddingStore read_steb_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return read_steb(in, path.filename().string());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

TokenEmbeddingMatrix pseudo_embed(const std::vector<std::string>& tokens, std::size_t dim,
                                  std::string statement_id) {
  if (tokens.empty()) throw ConfigError("pseudo_embed needs at least one token");
  if (dim == 0) throw ConfigError("pseudo_embed dim must be positive");
  std::vector<double> values;
  values.reserve(tokens.size() * dim);
  for (const auto& tok : tokens) {
    SplitMix64 gen(fnv1a64(tok));
    for (std::size_t j = 0; j < dim; ++j) {
      const double unit = static_cast<double>(gen.next() >> 11) * 0x1.0p-53;
      values.push_back(unit * 2.0 - 1.0);
    }
  }
  return TokenEmbeddingMatrix(std::move(statement_id), dim, std::move(values));
}

std::vector<std::string> tokenize_simple(std::string_view text) {
  std::vector<std::string> out;
  if (!utf8::find_invalid(text)) {
    const auto cps = utf8::decode(text);
    std::size_t i = 0;
    while (i < cps.size()) {
      while (i < cps.size() && utf8::is_space(cps[i])) ++i;
      std::size_t begin = i;
      while (i < cps.size() && !utf8::is_space(cps[i])) ++i;
      std::size_t end = i;
      while (begin < end && utf8::is_punct(cps[begin])) ++begin;
      while (end > begin && utf8::is_punct(cps[end - 1])) --end;
      if (begin == end) continue;
      std::string tok;
      for (std::size_t k = begin; k < end; ++k) utf8::append(tok, utf8::to_lower(cps[k]));
      out.push_back(std::move(tok));
    }
  }
  if (out.empty()) out.emplace_back("<empty>");
  return out;
}

}  // namespace poolbench
