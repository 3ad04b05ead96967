#include <cctype>

#include "probtest/cspp.hpp"

namespace probtest {

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : std::invalid_argument("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

namespace {

class Parser {
 public:
  Parser(std::string_view text, bool test) : text_(text), test_(test) {}

  TermPtr parse() {
    TermPtr t = parallel();
    skip_ws();
    if (pos_ < text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { fail_at(pos_, what); }

  [[noreturn]] void fail_at(std::size_t pos, const std::string& what) const {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < pos && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(what, line, col);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool lookahead(std::string_view tok) {
    skip_ws();
    return text_.substr(pos_, tok.size()) == tok;
  }

  bool accept(std::string_view tok) {
    if (!lookahead(tok)) return false;
    pos_ += tok.size();
    return true;
  }

  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }

  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  std::string peek_ident() {
    skip_ws();
    std::size_t end = pos_;
    if (end < text_.size() && ident_start(text_[end])) {
      while (end < text_.size() && ident_char(text_[end])) ++end;
    }
    return std::string(text_.substr(pos_, end - pos_));
  }

  // "p{" and "prio(" are keywords only when the bracket follows.
  bool keyword(const std::string& word, char bracket) {
    const std::string id = peek_ident();
    if (id != word) return false;
    std::size_t after = pos_ + id.size();
    while (after < text_.size() && std::isspace(static_cast<unsigned char>(text_[after]))) ++after;
    if (after >= text_.size() || text_[after] != bracket) return false;
    pos_ = after + 1;
    return true;
  }

  template <typename F>
  TermPtr build(std::size_t at, F&& make) {
    try {
      return make();
    } catch (const TermError& e) {
      fail_at(at, e.what());
    }
  }

  TermPtr parallel() {
    const std::size_t start = pos_;
    TermPtr acc = sum();
    for (;;) {
      if (accept("||")) {
        TermPtr rhs = sum();
        acc = build(start, [&] { return Term::sync(acc, rhs); });
      } else if (lookahead("|[")) {
        if (!accept("|[]|")) fail("only '|[]|' is accepted; the synchronisation set is computed");
        TermPtr rhs = sum();
        acc = build(start, [&] { return Term::shared(acc, rhs); });
      } else {
        return acc;
      }
    }
  }

  TermPtr sum() {
    skip_ws();
    const std::size_t start = pos_;
    std::vector<TermPtr> items{item()};
    while (accept("[]")) items.push_back(item());
    if (items.size() == 1) return items.front();
    std::vector<Branch> branches;
    for (const auto& it : items) {
      if (it->kind() == Term::Kind::Empty) continue;
      if (it->kind() != Term::Kind::Choice) fail_at(start, "'[]' operands must be action-prefixed");
      branches.insert(branches.end(), it->branches().begin(), it->branches().end());
    }
    return build(start, [&] { return Term::choice(std::move(branches)); });
  }

  // A single choice operand: a prefixed branch or a self-delimiting atom.
  TermPtr item() {
    skip_ws();
    const std::size_t start = pos_;
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (text_[pos_] == '0' && (pos_ + 1 >= text_.size() || !ident_char(text_[pos_ + 1]))) {
      ++pos_;
      return Term::empty();
    }
    if (accept("(")) {
      TermPtr inner = parallel();
      expect(")");
      return inner;
    }
    if (keyword("p", '{')) return prob_choice(start);
    if (keyword("prio", '(')) {
      TermPtr body = parallel();
      expect(")");
      return Term::priority(body);
    }
    const std::string label = peek_ident();
    if (label.empty()) fail("expected a process");
    pos_ += label.size();
    if (label == kOmega) {
      if (!test_) fail_at(start, "'w' (success) is only allowed in tests");
      if (lookahead("->")) fail_at(start, "'w' must be a leaf");
      return Term::omega();
    }
    TermPtr next = Term::empty();
    if (accept("->")) next = item();
    return Term::prefix(label, next);
  }

  Rational weight() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '/')) {
      ++pos_;
    }
    try {
      return parse_rational(text_.substr(start, pos_ - start));
    } catch (const std::invalid_argument&) {
      fail_at(start, "expected a weight such as 1/2");
    }
  }

  TermPtr prob_choice(std::size_t start) {
    std::vector<WeightedTerm> parts;
    do {
      Rational w = weight();
      expect(":");
      parts.push_back({w, parallel()});
    } while (accept(","));
    expect("}");
    return build(start, [&] { return Term::prob(std::move(parts)); });
  }

  std::string_view text_;
  bool test_;
  std::size_t pos_ = 0;
};

}  // namespace

TermPtr parse_process(std::string_view text) { return Parser(text, false).parse(); }

TermPtr parse_test(std::string_view text) { return Parser(text, true).parse(); }

PriorityOrder::PriorityOrder(const std::vector<std::pair<Action, Action>>& pairs)
    : closure_(pairs.begin(), pairs.end()) {
  for (bool grew = true; grew;) {
    grew = false;
    for (const auto& [a, b] : std::set(closure_)) {
      for (auto it = closure_.lower_bound({b, ""}); it != closure_.end() && it->first == b; ++it) {
        if (closure_.insert({a, it->second}).second) grew = true;
      }
    }
  }
  for (const auto& [a, b] : closure_) {
    if (a == b) throw TermError("priority order is cyclic at '" + a + "'");
  }
}

PriorityOrder PriorityOrder::parse(std::string_view text) {
  std::vector<std::pair<Action, Action>> pairs;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string line(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto gt = line.find('>');
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    if (gt == std::string::npos) throw TermError("priority line " + std::to_string(line_no) + ": expected 'a > b'");
    const std::string hi = trim(line.substr(0, gt));
    const std::string lo = trim(line.substr(gt + 1));
    auto valid = [](const std::string& s) {
      if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
      for (char c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
      }
      return true;
    };
    if (!valid(hi) || !valid(lo)) throw TermError("priority line " + std::to_string(line_no) + ": expected 'a > b'");
    pairs.emplace_back(hi, lo);
  }
  return PriorityOrder(pairs);
}

}  // namespace probtest
