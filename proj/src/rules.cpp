#include "rules.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

#include "io.hpp"

namespace ruleke {

RuleSet::RuleSet(std::vector<Rule> rules) {
  for (auto& r : rules) add(std::move(r));
}

bool RuleSet::contains(const Rule& r) const {
  return identities_.count({r.head, r.body}) != 0;
}

void RuleSet::add(Rule r) {
  if (contains(r)) {
    throw Error(ErrorCode::Conflict, "duplicate rule " + render_rule(r));
  }
  identities_.insert({r.head, r.body});
  rules_.push_back(std::move(r));
}

std::vector<double> RuleSet::supports() const {
  std::vector<double> out;
  out.reserve(rules_.size());
  for (const auto& r : rules_) out.push_back(r.support);
  return out;
}

namespace {

// Recursive-descent parser over the raw bytes. Offsets in errors are
// 0-based byte positions into the input string.
class RuleParser {
public:
  explicit RuleParser(const std::string& text) : text_(text) {}

  Rule parse() {
    std::vector<Atom> atoms;
    atoms.push_back(parse_atom());
    skip_ws();
    while (peek() == '&') {
      ++pos_;
      atoms.push_back(parse_atom());
      skip_ws();
    }
    expect('-');
    expect('>');
    Atom head = parse_atom();

    Rule rule;
    rule.head = head.rel;
    const long n = static_cast<long>(atoms.size());
    for (long i = 0; i < n; ++i) {
      if (atoms[i].lo != i || atoms[i].hi != i + 1) {
        fail("body atom " + std::to_string(i + 1) + " must connect z" + std::to_string(i) +
             " to z" + std::to_string(i + 1));
      }
      rule.body.push_back(atoms[i].rel);
    }
    if (head.lo != 0 || head.hi != n) {
      fail("head must connect z0 to z" + std::to_string(n));
    }

    skip_ws();
    if (peek() == '@') {
      ++pos_;
      rule.support = parse_support();
    }
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return rule;
  }

private:
  struct Atom {
    Relation rel;
    long lo, hi;
  };

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::Parse, "offset " + std::to_string(pos_) + ": " + msg);
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  static bool rel_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  }

  Relation parse_rel() {
    skip_ws();
    const size_t start = pos_;
    while (pos_ < text_.size() && rel_char(text_[pos_])) ++pos_;
    if (pos_ == start) fail("expected relation name");
    return normalize_relation(text_.substr(start, pos_ - start));
  }

  long parse_var() {
    skip_ws();
    if (peek() != 'z') fail("expected variable z<index>");
    ++pos_;
    const size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected variable index");
    const std::string digits = text_.substr(start, pos_ - start);
    if (digits.size() > 1 && digits[0] == '0') fail("variable index has leading zero");
    if (digits.size() > 6) fail("variable index out of range");
    return std::strtol(digits.c_str(), nullptr, 10);
  }

  Atom parse_atom() {
    Atom a;
    a.rel = parse_rel();
    expect('(');
    a.lo = parse_var();
    expect(',');
    a.hi = parse_var();
    expect(')');
    return a;
  }

  double parse_support() {
    skip_ws();
    const size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
            text_[pos_] == 'e' || text_[pos_] == 'E' || text_[pos_] == '+' ||
            text_[pos_] == '-')) {
      ++pos_;
    }
    if (pos_ == start) fail("expected support value");
    const std::string token = text_.substr(start, pos_ - start);
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size()) fail("malformed support value");
    if (!(v >= 0.0 && v <= 1.0)) fail("support out of [0,1]");
    return v;
  }

  const std::string& text_;
  size_t pos_ = 0;
};

std::string render_atom(const Relation& rel, long lo, long hi) {
  std::ostringstream out;
  out << rel << "(z" << lo << ",z" << hi << ")";
  return out.str();
}

}  // namespace

Rule parse_rule(const std::string& text) {
  RuleParser parser(text);
  Rule r = parser.parse();
  if (r.head.empty() || r.body.empty()) {
    throw Error(ErrorCode::Parse, "offset 0: empty rule");
  }
  return r;
}

std::string render_rule(const Rule& r) {
  std::ostringstream out;
  const long n = static_cast<long>(r.body.size());
  for (long i = 0; i < n; ++i) {
    if (i) out << " & ";
    out << render_atom(r.body[i], i, i + 1);
  }
  out << " -> " << render_atom(r.head, 0, n);
  if (r.support != 1.0) out << " @" << format_double(r.support);
  return out.str();
}

RuleSet load_rules(const std::string& path) {
  const auto lines = read_lines(path);
  RuleSet rules;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (is_comment_or_blank(lines[i])) continue;
    try {
      rules.add(parse_rule(lines[i]));
    } catch (const Error& e) {
      throw Error(e.code(), path + ":" + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return rules;
}

void save_rules(const RuleSet& rules, const std::string& path) {
  std::ostringstream out;
  for (const auto& r : rules) out << render_rule(r) << '\n';
  write_file(path, out.str());
}

}  // namespace ruleke
