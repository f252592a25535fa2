#include "encoder.hpp"

#include <cmath>
#include <cstdlib>

#include "io.hpp"

namespace ruleke {

namespace {

// FNV-1a over the n-gram bytes with the seed folded into the offset basis.
uint64_t fnv1a(const char* data, size_t len, uint64_t seed) {
  uint64_t h = 14695981039346656037ull ^ (seed * 0x9e3779b97f4a7c15ull);
  for (size_t i = 0; i < len; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 1099511628211ull;
  }
  return h;
}

void normalize_in_place(EmbeddingVector& v, const std::string& what) {
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  if (norm2 == 0.0) throw Error(ErrorCode::Invalid, "zero vector for " + what);
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& x : v) x *= inv;
}

}  // namespace

HashedNgramEncoder::HashedNgramEncoder(EncoderConfig config) : config_(config) {
  if (config_.dimension < 16) throw Error(ErrorCode::Invalid, "encoder dimension < 16");
  if (config_.ngram_min < 1 || config_.ngram_min > config_.ngram_max) {
    throw Error(ErrorCode::Invalid, "bad n-gram range");
  }
}

EmbeddingVector HashedNgramEncoder::encode(const Relation& r) const {
  if (r.empty()) throw Error(ErrorCode::Invalid, "cannot encode empty relation");
  const std::string padded = " " + r + " ";
  EmbeddingVector v(config_.dimension, 0.0);
  bool any = false;
  for (size_t n = config_.ngram_min; n <= config_.ngram_max; ++n) {
    if (padded.size() < n) continue;
    for (size_t i = 0; i + n <= padded.size(); ++i) {
      const uint64_t bucket_hash = fnv1a(padded.data() + i, n, config_.hash_seed);
      const uint64_t sign_hash = fnv1a(padded.data() + i, n, config_.hash_seed ^ 0x5bf03635ull);
      const size_t bucket = bucket_hash % config_.dimension;
      v[bucket] += (sign_hash & 1) ? 1.0 : -1.0;
      any = true;
    }
  }
  if (!any) throw Error(ErrorCode::Invalid, "relation shorter than minimum n-gram: " + r);

  // Signed counts can cancel exactly; keep the vector usable with a single
  // deterministic fallback bucket before normalizing.
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  if (norm2 == 0.0) {
    v[fnv1a(r.data(), r.size(), config_.hash_seed) % config_.dimension] = 1.0;
  }
  normalize_in_place(v, "relation '" + r + "'");
  return v;
}

CachedEncoder::CachedEncoder(std::map<Relation, EmbeddingVector> table,
                             std::shared_ptr<const Encoder> inner)
    : table_(std::move(table)), inner_(std::move(inner)) {
  for (const auto& [rel, vec] : table_) {
    if (vec.size() != dimension()) {
      throw Error(ErrorCode::Invalid, "cached vector dimension mismatch for '" + rel + "'");
    }
  }
}

EmbeddingVector CachedEncoder::encode(const Relation& r) const {
  auto it = table_.find(r);
  if (it != table_.end()) return it->second;
  if (!inner_) throw Error(ErrorCode::NotFound, "no cached vector for '" + r + "'");
  return inner_->encode(r);
}

size_t CachedEncoder::dimension() const {
  if (inner_) return inner_->dimension();
  return table_.empty() ? 0 : table_.begin()->second.size();
}

std::map<Relation, EmbeddingVector> load_vector_cache(const std::string& path) {
  const auto lines = read_lines(path);
  std::map<Relation, EmbeddingVector> table;
  size_t dim = 0;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (is_comment_or_blank(lines[i])) continue;
    const auto fields = split_tabs(lines[i]);
    const std::string where = path + ":" + std::to_string(i + 1);
    if (fields.size() != 2) {
      throw Error(ErrorCode::Parse, where + ": expected relation<TAB>v1,v2,...");
    }
    const Relation rel = normalize_relation(fields[0]);
    if (rel.empty()) throw Error(ErrorCode::Parse, where + ": empty relation");

    EmbeddingVector v;
    std::istringstream ss(fields[1]);
    std::string num;
    while (std::getline(ss, num, ',')) {
      char* end = nullptr;
      const std::string t = trim(num);
      const double x = std::strtod(t.c_str(), &end);
      if (t.empty() || end != t.c_str() + t.size()) {
        throw Error(ErrorCode::Parse, where + ": malformed component '" + num + "'");
      }
      v.push_back(x);
    }
    if (v.empty()) throw Error(ErrorCode::Parse, where + ": empty vector");
    if (dim == 0) dim = v.size();
    if (v.size() != dim) {
      throw Error(ErrorCode::Parse, where + ": dimension mismatch");
    }
    try {
      normalize_in_place(v, "'" + rel + "'");
    } catch (const Error&) {
      throw Error(ErrorCode::Parse, where + ": zero vector");
    }
    table[rel] = std::move(v);
  }
  return table;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorCode::Invalid, "cosine over mismatched dimensions");
  }
  double dot = 0.0;
  for (size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  if (dot > 1.0) dot = 1.0;
  if (dot < -1.0) dot = -1.0;
  return dot;
}

}  // namespace ruleke
