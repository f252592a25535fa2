#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>

namespace ruleke {

// Canonical entity id: surrounding whitespace trimmed, case preserved.
using EntityId = std::string;

// Canonical relation name: lowercase, internal whitespace collapsed to '_'.
using Relation = std::string;

enum class ErrorCode {
  Io = 1,
  Parse = 2,
  Conflict = 3,
  Invalid = 4,
  NotFound = 5,
  State = 6,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}
  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

std::string trim(std::string_view s);

// Idempotent. Empty input is invalid and reported at the call site.
EntityId normalize_entity(std::string_view raw);
Relation normalize_relation(std::string_view raw);

struct Fact {
  Relation relation;
  EntityId subject;
  EntityId object;

  friend bool operator==(const Fact&, const Fact&) = default;
  friend auto operator<=>(const Fact& a, const Fact& b) {
    return std::tie(a.relation, a.subject, a.object) <=>
           std::tie(b.relation, b.subject, b.object);
  }
};

// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double v);

}  // namespace ruleke
