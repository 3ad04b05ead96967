#include <algorithm>
#include <functional>
#include <map>

#include "probtest/cspp.hpp"

namespace probtest {

namespace {

std::string join(const Menu& m) {
  std::string out;
  for (const auto& a : m) {
    if (!out.empty()) out += ',';
    out += a;
  }
  return out;
}

}  // namespace

void Term::finish() {
  switch (kind_) {
    case Kind::Empty:
      key_ = "0";
      break;
    case Kind::Choice:
      key_ = "[";
      for (const auto& b : branches_) {
        if (b.label == kOmega) {
          has_omega_ = true;
        } else {
          alphabet_.insert(b.label);
        }
        alphabet_.insert(b.next->alphabet_.begin(), b.next->alphabet_.end());
        has_omega_ = has_omega_ || b.next->has_omega_;
        key_ += b.label + ":" + b.next->key_ + ";";
      }
      key_ += "]";
      break;
    case Kind::Prob:
      probabilistic_ = true;
      key_ = "p{";
      for (const auto& part : parts_) {
        alphabet_.insert(part.term->alphabet_.begin(), part.term->alphabet_.end());
        has_omega_ = has_omega_ || part.term->has_omega_;
        key_ += format_rational(part.weight) + ":" + part.term->key_ + ";";
      }
      key_ += "}";
      break;
    case Kind::Priority:
      alphabet_ = left_->alphabet_;
      has_omega_ = left_->has_omega_;
      probabilistic_ = left_->probabilistic_;
      key_ = "prio(" + left_->key_ + ")";
      break;
    case Kind::Sync:
    case Kind::Shared:
      alphabet_ = left_->alphabet_;
      alphabet_.insert(right_->alphabet_.begin(), right_->alphabet_.end());
      has_omega_ = left_->has_omega_ || right_->has_omega_;
      probabilistic_ = left_->probabilistic_ || right_->probabilistic_;
      key_ = "(" + left_->key_ + (kind_ == Kind::Sync ? "||" : "|" + join(sync_) + "|") + right_->key_ + ")";
      break;
  }
}

TermPtr Term::empty() {
  static const TermPtr instance = [] {
    auto t = std::shared_ptr<Term>(new Term(Kind::Empty));
    t->finish();
    return t;
  }();
  return instance;
}

TermPtr Term::choice(std::vector<Branch> branches) {
  if (branches.empty()) return empty();
  std::sort(branches.begin(), branches.end(), [](const Branch& x, const Branch& y) { return x.label < y.label; });
  for (std::size_t i = 0; i < branches.size(); ++i) {
    if (branches[i].label.empty()) throw TermError("empty action label");
    if (!branches[i].next) throw TermError("missing continuation for '" + branches[i].label + "'");
    if (i > 0 && branches[i].label == branches[i - 1].label) {
      throw TermError("duplicate choice label '" + branches[i].label + "'");
    }
  }
  auto t = std::shared_ptr<Term>(new Term(Kind::Choice));
  t->branches_ = std::move(branches);
  t->finish();
  return t;
}

TermPtr Term::prefix(Action a, TermPtr next) { return choice({Branch{std::move(a), std::move(next)}}); }

TermPtr Term::omega() { return prefix(kOmega, empty()); }

TermPtr Term::prob(std::vector<WeightedTerm> parts) {
  if (parts.empty()) throw TermError("probabilistic choice without branches");
  Rational total = 0;
  for (const auto& part : parts) {
    if (part.weight <= 0 || part.weight > 1) {
      throw TermError("weight " + format_rational(part.weight) + " outside (0,1]");
    }
    if (!part.term) throw TermError("missing probabilistic branch");
    total += part.weight;
  }
  if (total != 1) throw TermError("weights sum to " + format_rational(total) + ", not 1");
  auto t = std::shared_ptr<Term>(new Term(Kind::Prob));
  t->parts_ = std::move(parts);
  t->finish();
  return t;
}

TermPtr Term::priority(TermPtr body) {
  if (!body) throw TermError("missing priority body");
  auto t = std::shared_ptr<Term>(new Term(Kind::Priority));
  t->left_ = std::move(body);
  t->finish();
  return t;
}

TermPtr Term::sync(TermPtr left, TermPtr right) {
  if (!left || !right) throw TermError("missing parallel operand");
  auto t = std::shared_ptr<Term>(new Term(Kind::Sync));
  t->left_ = std::move(left);
  t->right_ = std::move(right);
  t->finish();
  return t;
}

TermPtr Term::shared(TermPtr left, TermPtr right) {
  if (!left || !right) throw TermError("missing parallel operand");
  Menu sync_set = shared_alphabet(left, right);
  return shared_with(std::move(left), std::move(right), std::move(sync_set));
}

TermPtr Term::shared_with(TermPtr left, TermPtr right, Menu sync_set) {
  if (!left || !right) throw TermError("missing parallel operand");
  auto t = std::shared_ptr<Term>(new Term(Kind::Shared));
  t->left_ = std::move(left);
  t->right_ = std::move(right);
  t->sync_ = std::move(sync_set);
  t->finish();
  return t;
}

Menu alphabet(const TermPtr& t) { return t->alphabet(); }

Menu shared_alphabet(const TermPtr& p, const TermPtr& q) {
  Menu out;
  std::set_intersection(p->alphabet().begin(), p->alphabet().end(), q->alphabet().begin(), q->alphabet().end(),
                        std::inserter(out, out.end()));
  return out;
}

namespace {

bool is_parallel(const TermPtr& t) { return t->kind() == Term::Kind::Sync || t->kind() == Term::Kind::Shared; }

std::string render(const TermPtr& t);

// Continuation after "->": prefix chains stay inline, choices and parallel
// compositions need parentheses.
std::string render_after_arrow(const TermPtr& t) {
  if (t->kind() == Term::Kind::Choice && t->branches().size() > 1) return "(" + render(t) + ")";
  if (is_parallel(t)) return "(" + render(t) + ")";
  return render(t);
}

std::string render(const TermPtr& t) {
  switch (t->kind()) {
    case Term::Kind::Empty:
      return "0";
    case Term::Kind::Choice: {
      std::string out;
      for (const auto& b : t->branches()) {
        if (!out.empty()) out += " [] ";
        out += b.label;
        if (b.next->kind() != Term::Kind::Empty) out += "->" + render_after_arrow(b.next);
      }
      return out;
    }
    case Term::Kind::Prob: {
      std::string out = "p{";
      bool first = true;
      for (const auto& part : t->parts()) {
        if (!first) out += ", ";
        first = false;
        out += format_rational(part.weight) + ": " + render(part.term);
      }
      return out + "}";
    }
    case Term::Kind::Priority:
      return "prio(" + render(t->body()) + ")";
    case Term::Kind::Sync:
    case Term::Kind::Shared: {
      std::string op = " || ";
      if (t->kind() == Term::Kind::Shared) {
        op = t->sync_set() == shared_alphabet(t->left(), t->right()) ? " |[]| " : " |[" + join(t->sync_set()) + "]| ";
      }
      const std::string right = is_parallel(t->right()) ? "(" + render(t->right()) + ")" : render(t->right());
      return render(t->left()) + op + right;
    }
  }
  return {};
}

}  // namespace

std::string to_string(const TermPtr& t) { return render(t); }

std::size_t term_depth(const TermPtr& t) {
  switch (t->kind()) {
    case Term::Kind::Empty:
      return 0;
    case Term::Kind::Choice: {
      std::size_t best = 0;
      for (const auto& b : t->branches()) best = std::max(best, 1 + term_depth(b.next));
      return best;
    }
    case Term::Kind::Prob: {
      std::size_t best = 0;
      for (const auto& part : t->parts()) best = std::max(best, term_depth(part.term));
      return best;
    }
    case Term::Kind::Priority:
      return term_depth(t->body());
    case Term::Kind::Sync:
      return std::max(term_depth(t->left()), term_depth(t->right()));
    case Term::Kind::Shared:
      return term_depth(t->left()) + term_depth(t->right());
  }
  return 0;
}

namespace {

void collect_operands(const TermPtr& t, std::vector<TermPtr>& out) {
  if (t->kind() == Term::Kind::Shared) {
    collect_operands(t->left(), out);
    collect_operands(t->right(), out);
  } else {
    out.push_back(t);
  }
}

bool share(const TermPtr& p, const TermPtr& q) { return !shared_alphabet(p, q).empty(); }

void lint_into(const TermPtr& t, bool in_chain, std::vector<std::string>& out) {
  switch (t->kind()) {
    case Term::Kind::Empty:
      return;
    case Term::Kind::Choice:
      for (const auto& b : t->branches()) lint_into(b.next, false, out);
      return;
    case Term::Kind::Prob:
      for (const auto& part : t->parts()) lint_into(part.term, false, out);
      return;
    case Term::Kind::Priority:
      lint_into(t->body(), false, out);
      return;
    case Term::Kind::Sync:
      lint_into(t->left(), false, out);
      lint_into(t->right(), false, out);
      return;
    case Term::Kind::Shared:
      break;
  }
  if (in_chain) return;
  std::vector<TermPtr> ops;
  collect_operands(t, ops);
  for (std::size_t i = 0; i < ops.size(); ++i) {
    for (std::size_t j = i + 1; j < ops.size(); ++j) {
      for (std::size_t k = j + 1; k < ops.size(); ++k) {
        if (share(ops[i], ops[j]) && share(ops[j], ops[k]) && share(ops[i], ops[k])) {
          out.push_back("warning: |[]| operands " + render(ops[i]) + ", " + render(ops[j]) + " and " +
                        render(ops[k]) + " pairwise share actions; the composition is not associative");
        }
      }
    }
  }
  for (const auto& op : ops) lint_into(op, false, out);
}

}  // namespace

std::vector<std::string> lint(const TermPtr& t) {
  std::vector<std::string> out;
  lint_into(t, false, out);
  return out;
}

}  // namespace probtest
