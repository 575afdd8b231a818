#include <cctype>
#include <limits>

#include "instab/errors.hpp"
#include "instab/reps.hpp"

namespace instab::reps {

RepSpecPtr RepSpec::standard() {
  return RepSpecPtr(new RepSpec(Kind::Standard, 0, nullptr, nullptr));
}

RepSpecPtr RepSpec::dual(RepSpecPtr child) {
  if (!child) throw DomainError("dual: null child");
  return RepSpecPtr(new RepSpec(Kind::Dual, 0, std::move(child), nullptr));
}

RepSpecPtr RepSpec::wedge(int k, RepSpecPtr child) {
  if (!child) throw DomainError("wedge: null child");
  if (k <= 0) throw DomainError("wedge: degree must be positive");
  return RepSpecPtr(new RepSpec(Kind::Wedge, k, std::move(child), nullptr));
}

RepSpecPtr RepSpec::sym(int k, RepSpecPtr child) {
  if (!child) throw DomainError("sym: null child");
  if (k <= 0) throw DomainError("sym: degree must be positive");
  return RepSpecPtr(new RepSpec(Kind::Sym, k, std::move(child), nullptr));
}

RepSpecPtr RepSpec::tensor(RepSpecPtr left, RepSpecPtr right) {
  if (!left || !right) throw DomainError("tensor: null factor");
  return RepSpecPtr(new RepSpec(Kind::Tensor, 0, std::move(left), std::move(right)));
}

std::string RepSpec::to_string() const {
  switch (kind_) {
    case Kind::Standard:
      return "std";
    case Kind::Dual:
      return "dual(" + left_->to_string() + ")";
    case Kind::Wedge:
      return "wedge(" + std::to_string(degree_) + "," + left_->to_string() + ")";
    case Kind::Sym:
      return "sym(" + std::to_string(degree_) + "," + left_->to_string() + ")";
    case Kind::Tensor: {
      // Tensor is parsed left-associatively, so only a right operand that is
      // itself a tensor needs parentheses.
      std::string r = right_->to_string();
      if (right_->kind() == Kind::Tensor) r = "(" + r + ")";
      return left_->to_string() + "*" + r;
    }
  }
  return {};
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  RepSpecPtr parse() {
    RepSpecPtr r = rep();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  bool keyword(std::string_view word) {
    skip();
    if (s_.substr(pos_, word.size()) != word) return false;
    const std::size_t end = pos_ + word.size();
    if (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_'))
      return false;
    pos_ = end;
    return true;
  }

  int integer() {
    skip();
    const std::size_t start = pos_;
    long long value = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      value = value * 10 + (s_[pos_] - '0');
      if (value > std::numeric_limits<int>::max()) {
        pos_ = start;
        fail("degree out of range");
      }
      ++pos_;
    }
    if (pos_ == start) fail("expected a non-negative integer degree");
    return static_cast<int>(value);
  }

  RepSpecPtr rep() {
    RepSpecPtr left = factor();
    while (accept('*')) left = RepSpec::tensor(left, factor());
    return left;
  }

  RepSpecPtr factor() {
    skip();
    const std::size_t start = pos_;
    if (keyword("std")) return RepSpec::standard();
    if (keyword("dual")) {
      expect('(');
      RepSpecPtr c = rep();
      expect(')');
      return RepSpec::dual(c);
    }
    const bool is_wedge = keyword("wedge");
    if (is_wedge || keyword("sym")) {
      expect('(');
      skip();
      const std::size_t degree_pos = pos_;
      const int k = integer();
      if (k == 0) {
        pos_ = degree_pos;
        fail("degree must be positive");
      }
      expect(',');
      RepSpecPtr c = rep();
      expect(')');
      return is_wedge ? RepSpec::wedge(k, c) : RepSpec::sym(k, c);
    }
    if (accept('(')) {
      RepSpecPtr r = rep();
      expect(')');
      return r;
    }
    pos_ = start;
    fail(pos_ < s_.size() ? "expected std, dual, wedge, sym or '('" : "unexpected end of input");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

RepSpecPtr parse_spec(std::string_view text) { return Parser(text).parse(); }

}  // namespace instab::reps
