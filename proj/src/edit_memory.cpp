#include "edit_memory.hpp"

#include <algorithm>

#include <json.hpp>

#include "io.hpp"

namespace ruleke {

EditMemory::EditMemory(const AliasTable& aliases, const Encoder& encoder)
    : aliases_(aliases), encoder_(encoder) {}

void EditMemory::insert(Edit e) {
  if (frozen_) throw Error(ErrorCode::State, "insert into frozen edit memory");
  if (e.relation.empty() || e.subject.empty() || e.new_object.empty()) {
    throw Error(ErrorCode::Invalid, "edit with empty field");
  }
  const size_t index = edits_.size();
  relation_vecs_.push_back(encoder_.encode(e.relation));
  for (const auto& key : aliases_.expand(e.subject)) by_subject_[key].push_back(index);
  for (const auto& key : aliases_.expand(e.new_object)) by_new_object_[key].push_back(index);
  edits_.push_back(std::move(e));
}

std::vector<size_t> EditMemory::candidates_from(
    const std::map<std::string, std::vector<size_t>>& index, const std::string& key) const {
  // Probe under every alias of the query string. The index also holds every
  // edit under every alias of its own key, so two alias sets intersect iff
  // some probe lands.
  std::vector<size_t> out;
  for (const auto& probe : aliases_.expand(key)) {
    auto it = index.find(probe);
    if (it == index.end()) continue;
    out.insert(out.end(), it->second.begin(), it->second.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<RetrievalHit> EditMemory::best_of(const std::vector<size_t>& candidates,
                                                const Relation& relation, double theta) const {
  if (candidates.empty()) return std::nullopt;
  const auto query_vec = encoder_.encode(relation);
  size_t best = 0;
  double best_sim = -2.0;
  for (size_t idx : candidates) {
    const double sim = cosine(relation_vecs_[idx], query_vec);
    if (sim > best_sim) {  // strict: earliest insertion wins ties
      best_sim = sim;
      best = idx;
    }
  }
  if (!(best_sim > theta)) return std::nullopt;
  return RetrievalHit{edits_[best], best, best_sim};
}

std::optional<RetrievalHit> EditMemory::retrieve_forward(const EntityId& subject,
                                                         const Relation& relation,
                                                         double theta) const {
  return best_of(candidates_from(by_subject_, subject), relation, theta);
}

std::optional<RetrievalHit> EditMemory::retrieve_backward(const EntityId& object,
                                                          const Relation& relation,
                                                          double theta) const {
  return best_of(candidates_from(by_new_object_, object), relation, theta);
}

std::string edit_to_json(const Edit& e) {
  nlohmann::json j;
  j["relation"] = e.relation;
  j["subject"] = e.subject;
  if (e.old_object) {
    j["old_object"] = *e.old_object;
  } else {
    j["old_object"] = nullptr;
  }
  j["new_object"] = e.new_object;
  return j.dump();
}

namespace {

Edit edit_from_json(const nlohmann::json& j, const std::string& where) {
  for (const char* field : {"relation", "subject", "new_object"}) {
    if (!j.contains(field) || !j[field].is_string()) {
      throw Error(ErrorCode::Parse, where + ": missing or non-string '" + field + "'");
    }
  }
  if (!j.contains("old_object") || !(j["old_object"].is_string() || j["old_object"].is_null())) {
    throw Error(ErrorCode::Parse, where + ": 'old_object' must be a string or null");
  }
  Edit e;
  e.relation = normalize_relation(j["relation"].get<std::string>());
  e.subject = normalize_entity(j["subject"].get<std::string>());
  if (j["old_object"].is_string()) {
    e.old_object = normalize_entity(j["old_object"].get<std::string>());
  }
  e.new_object = normalize_entity(j["new_object"].get<std::string>());
  if (e.relation.empty() || e.subject.empty() || e.new_object.empty()) {
    throw Error(ErrorCode::Parse, where + ": empty field after normalization");
  }
  return e;
}

}  // namespace

Edit edit_from_line(const std::string& line, const std::string& where) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::Parse, where + ": malformed JSON object");
  }
  return edit_from_json(j, where);
}

std::vector<Edit> load_edits(const std::string& path) {
  const auto lines = read_lines(path);
  std::vector<Edit> out;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (is_comment_or_blank(lines[i])) continue;
    out.push_back(edit_from_line(lines[i], path + ":" + std::to_string(i + 1)));
  }
  return out;
}

void save_edits(const std::vector<Edit>& edits, const std::string& path) {
  std::ostringstream out;
  for (const auto& e : edits) out << edit_to_json(e) << '\n';
  write_file(path, out.str());
}

}  // namespace ruleke
