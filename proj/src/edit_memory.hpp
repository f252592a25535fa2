#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "encoder.hpp"
#include "kg.hpp"
#include "types.hpp"

namespace ruleke {

// One knowledge edit r(s, o -> o*). old_object is absent for facts that are
// introduced rather than overwritten, in particular derived edits.
struct Edit {
  Relation relation;
  EntityId subject;
  std::optional<EntityId> old_object;
  EntityId new_object;

  friend bool operator==(const Edit&, const Edit&) = default;
};

struct RetrievalHit {
  Edit edit;
  size_t index;       // insertion position in the memory
  double similarity;  // relation-level cosine, the rerank score
};

// Ordered edit store with two-step retrieval: filter by subject (forward) or
// new object (backward) through the alias table, then rerank the survivors by
// relation similarity. Duplicates are allowed; ties keep the earliest insert.
//
// Build is single-writer. freeze() flips the store read-only; queries are
// safe to share between threads only after that.
class EditMemory {
public:
  EditMemory(const AliasTable& aliases, const Encoder& encoder);

  void insert(Edit e);
  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  size_t size() const { return edits_.size(); }
  const std::vector<Edit>& edits() const { return edits_; }
  const Edit& operator[](size_t i) const { return edits_[i]; }

  // Highest-similarity edit whose subject aliases intersect the query
  // subject's aliases, if that similarity clears theta strictly.
  std::optional<RetrievalHit> retrieve_forward(const EntityId& subject,
                                               const Relation& relation, double theta) const;

  // Same over new_object: a hit means some edit introduced `object`, and the
  // caller continues from that edit's subject.
  std::optional<RetrievalHit> retrieve_backward(const EntityId& object,
                                                const Relation& relation, double theta) const;

  const AliasTable& aliases() const { return aliases_; }
  const Encoder& encoder() const { return encoder_; }

private:
  std::optional<RetrievalHit> best_of(const std::vector<size_t>& candidates,
                                      const Relation& relation, double theta) const;
  std::vector<size_t> candidates_from(const std::map<std::string, std::vector<size_t>>& index,
                                      const std::string& key) const;

  const AliasTable& aliases_;
  const Encoder& encoder_;
  bool frozen_ = false;
  std::vector<Edit> edits_;
  std::vector<EmbeddingVector> relation_vecs_;  // parallel to edits_
  std::map<std::string, std::vector<size_t>> by_subject_;
  std::map<std::string, std::vector<size_t>> by_new_object_;
};

// Edits file: one JSON object per line with fields relation, subject,
// old_object (string or null), new_object.
std::vector<Edit> load_edits(const std::string& path);
void save_edits(const std::vector<Edit>& edits, const std::string& path);
std::string edit_to_json(const Edit& e);

// One JSON object line -> Edit; errors are Error{Parse} naming `where`.
Edit edit_from_line(const std::string& line, const std::string& where);

}  // namespace ruleke
