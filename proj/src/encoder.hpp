#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "types.hpp"

namespace ruleke {

using EmbeddingVector = std::vector<double>;

struct EncoderConfig {
  size_t dimension = 256;  // >= 16
  size_t ngram_min = 2;
  size_t ngram_max = 3;
  uint64_t hash_seed = 0;
};

// Produces a unit-norm vector for a relation name. Implementations must be
// deterministic; external embedding providers plug in through this interface.
class Encoder {
public:
  virtual ~Encoder() = default;
  virtual EmbeddingVector encode(const Relation& r) const = 0;
  virtual size_t dimension() const = 0;
};

// Feature-hashed character n-grams. The name is padded with one boundary
// space on each side, every n-gram of each configured size hashes to a bucket
// and a sign, and the accumulated vector is L2-normalized. Collisions are
// accepted noise, as in any hashing vectorizer.
class HashedNgramEncoder : public Encoder {
public:
  explicit HashedNgramEncoder(EncoderConfig config = {});

  EmbeddingVector encode(const Relation& r) const override;
  size_t dimension() const override { return config_.dimension; }
  const EncoderConfig& config() const { return config_; }

private:
  EncoderConfig config_;
};

// Serves vectors from a precomputed table and falls back to `inner` for
// relations the table does not cover.
class CachedEncoder : public Encoder {
public:
  CachedEncoder(std::map<Relation, EmbeddingVector> table, std::shared_ptr<const Encoder> inner);

  EmbeddingVector encode(const Relation& r) const override;
  size_t dimension() const override;

private:
  std::map<Relation, EmbeddingVector> table_;
  std::shared_ptr<const Encoder> inner_;
};

// Memoizes an inner encoder. Not thread-safe; give each worker its own.
class MemoEncoder : public Encoder {
public:
  explicit MemoEncoder(const Encoder& inner) : inner_(inner) {}

  EmbeddingVector encode(const Relation& r) const override {
    auto it = memo_.find(r);
    if (it != memo_.end()) return it->second;
    auto v = inner_.encode(r);
    memo_.emplace(r, v);
    return v;
  }
  size_t dimension() const override { return inner_.dimension(); }

private:
  const Encoder& inner_;
  mutable std::map<Relation, EmbeddingVector> memo_;
};

// Cache file: relation<TAB>v1,v2,... per line. Vectors are L2-normalized on
// load; zero vectors and ragged dimensions are Error{Parse}.
std::map<Relation, EmbeddingVector> load_vector_cache(const std::string& path);

// Both vectors must be unit norm and of equal dimension; the result is
// clamped to [-1, 1] against rounding drift.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

}  // namespace ruleke
