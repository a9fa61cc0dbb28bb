#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace poolbench {

// T x d row-major matrix of per-token vectors for one statement.
class TokenEmbeddingMatrix {
 public:
  TokenEmbeddingMatrix() = default;
  // Throws ConfigError unless tokens >= 1, dim >= 1, values.size() == tokens * dim
  // and every value is finite.
  TokenEmbeddingMatrix(std::string statement_id, std::size_t dim, std::vector<double> values);

  const std::string& statement_id() const { return statement_id_; }
  std::size_t dim() const { return dim_; }
  std::size_t tokens() const { return dim_ == 0 ? 0 : values_.size() / dim_; }
  std::span<const double> row(std::size_t t) const {
    return {values_.data() + t * dim_, dim_};
  }
  const std::vector<double>& values() const { return values_; }

  bool operator==(const TokenEmbeddingMatrix&) const = default;

 private:
  std::string statement_id_;
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

// Per-statement token embeddings sharing one width. Ordered by id so that
// serialization is canonical.
class EmbeddingStore {
 public:
  explicit EmbeddingStore(std::size_t dim, std::string provenance = {});

  std::size_t dim() const { return dim_; }
  const std::string& provenance() const { return provenance_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Throws DataError on dim mismatch or duplicate id.
  void add(TokenEmbeddingMatrix m);
  const TokenEmbeddingMatrix* find(std::string_view id) const;
  const std::map<std::string, TokenEmbeddingMatrix, std::less<>>& entries() const {
    return entries_;
  }

  // Provenance is not serialized by STEB, so equality ignores it.
  bool operator==(const EmbeddingStore& o) const {
    return dim_ == o.dim_ && entries_ == o.entries_;
  }

 private:
  std::size_t dim_;
  std::string provenance_;
  std::map<std::string, TokenEmbeddingMatrix, std::less<>> entries_;
};

// STEB v1: "STEB1\0", u32 dim, u32 count, then per record u32 id_len, id bytes,
// u32 token_count, token_count*dim binary32 values. Little-endian, unpadded.
inline constexpr std::string_view kStebMagic{"STEB1\0", 6};

// Returns the number of bytes written. Values are narrowed to binary32.
// Throws ConfigError for an empty store, std::ios_base::failure on I/O error.
std::uint64_t write_steb(const EmbeddingStore& store, std::ostream& out);
// Throws DataError for bad magic, truncation (with byte offset) and invalid
// records.
EmbeddingStore read_steb(std::istream& in, std::string provenance = {});

void write_steb_file(const EmbeddingStore& store, const std::filesystem::path& path);
EmbeddingStore read_steb_file(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view bytes);

// splitmix64 stream.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Deterministic stand-in embedder: row i depends only on tokens[i] and dim.
// Seeded by FNV-1a 64 of the token bytes; each value is splitmix64 output u
// mapped to ((u >> 11) * 2^-53) * 2 - 1.
TokenEmbeddingMatrix pseudo_embed(const std::vector<std::string>& tokens, std::size_t dim,
                                  std::string statement_id = {});

// Lowercase, split on Unicode whitespace, strip leading and trailing
// punctuation, drop empties. Never returns an empty list: "<empty>" stands in
// (also for input that is not valid UTF-8).
std::vector<std::string> tokenize_simple(std::string_view text);

}  // namespace poolbench
