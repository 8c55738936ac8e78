#include <fstream>
#include <sstream>
#include <unordered_map>

#include "infgrowth/kb.hpp"

namespace infgrowth {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

namespace {

struct Sexp {
  bool is_list = false;
  std::string_view token;
  std::size_t line = 0, column = 0;
  std::vector<Sexp> items;
};

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  // Returns false at end of input.
  bool next(Sexp& out) {
    skip_space();
    if (pos_ >= text_.size()) return false;
    if (text_[pos_] != '(') fail("expected '('");
    out = read();
    return true;
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, col_, msg); }

 private:
  Sexp read() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    Sexp s;
    s.line = line_;
    s.column = col_;
    char c = text_[pos_];
    if (c == ')') fail("unexpected ')'");
    if (c == '(') {
      s.is_list = true;
      advance();
      for (;;) {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError(s.line, s.column, "unterminated list");
        if (text_[pos_] == ')') {
          advance();
          break;
        }
        s.items.push_back(read());
      }
      return s;
    }
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char d = text_[pos_];
      if (d == '(' || d == ')' || d == ';' || d == ' ' || d == '\t' || d == '\n' || d == '\r') break;
      advance();
    }
    s.token = text_.substr(start, pos_ - start);
    return s;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        advance();
      } else {
        break;
      }
    }
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1, col_ = 1;
};

class DocumentBuilder {
 public:
  void add(const Sexp& s) {
    if (!s.items.empty() && !s.items.front().is_list && s.items.front().token == "<=") {
      add_rule(s);
    } else {
      Atom a = to_atom(s);
      for (std::size_t i = 0; i < a.arity(); ++i)
        if (a.args[i].is_variable())
          throw ParseError(s.items[i + 1].line, s.items[i + 1].column,
                           "non-ground fact: " + a.to_string());
      facts_.push_back(std::move(a));
    }
  }

  KbDocument finish() {
    KbDocument doc;
    doc.kb = KnowledgeBase(std::move(facts_));
    doc.axioms = AxiomSet(std::move(rules_));
    return doc;
  }

 private:
  void add_rule(const Sexp& s) {
    if (s.items.size() < 3)
      throw ParseError(s.line, s.column, "rule needs a head and at least one body atom");
    HornClause c;
    c.id = static_cast<ClauseId>(rules_.size());
    c.head = to_atom(s.items[1]);
    for (std::size_t i = 2; i < s.items.size(); ++i) c.body.push_back(to_atom(s.items[i]));
    try {
      validate_clause(c);
    } catch (const KbError& e) {
      throw ParseError(s.line, s.column, e.what());
    }
    rules_.push_back(std::move(c));
  }

  Atom to_atom(const Sexp& s) {
    if (!s.is_list) throw ParseError(s.line, s.column, "expected an atom '(pred args...)'");
    if (s.items.empty()) throw ParseError(s.line, s.column, "empty atom");
    const Sexp& head = s.items.front();
    if (head.is_list) throw ParseError(head.line, head.column, "predicate must be an identifier");
    if (head.token.front() == '?') throw ParseError(head.line, head.column, "predicate cannot be a variable");
    if (head.token == "<=") throw ParseError(head.line, head.column, "nested rule");
    if (s.items.size() < 2) throw ParseError(s.line, s.column, "atom needs at least one argument");
    Atom a{Symbol::intern(head.token), {}};
    for (std::size_t i = 1; i < s.items.size(); ++i) {
      const Sexp& arg = s.items[i];
      if (arg.is_list)
        throw ParseError(arg.line, arg.column, "nested terms (function symbols) are not supported");
      if (arg.token.front() == '?') {
        if (arg.token.size() == 1) throw ParseError(arg.line, arg.column, "empty variable name");
        a.args.push_back(Term::variable(arg.token.substr(1)));
      } else {
        a.args.push_back(Term::constant(arg.token));
      }
    }
    auto [it, fresh] = arity_.emplace(a.predicate, a.arity());
    if (!fresh && it->second != a.arity())
      throw ParseError(s.line, s.column,
                       "arity conflict for " + std::string(head.token) + ": " +
                           std::to_string(it->second) + " vs " + std::to_string(a.arity()));
    return a;
  }

  std::unordered_map<Symbol, std::size_t> arity_;
  std::vector<Fact> facts_;
  std::vector<HornClause> rules_;
};

}  // namespace

KbDocument parse_kb(std::string_view text) {
  Reader reader(text);
  DocumentBuilder builder;
  Sexp s;
  while (reader.next(s)) builder.add(s);
  return builder.finish();
}

KbDocument load_kb_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_kb(ss.str());
}

std::string serialize_kb(const KnowledgeBase& kb, const AxiomSet& axioms) {
  std::string out = "; infgrowth kb facts=" + std::to_string(kb.size()) +
                    " rules=" + std::to_string(axioms.size()) + "\n";
  for (const auto& f : kb.facts()) {
    out.append(f.to_string());
    out.push_back('\n');
  }
  for (const auto& c : axioms.clauses()) {
    out.append(c.to_string());
    out.push_back('\n');
  }
  return out;
}

}  // namespace infgrowth
