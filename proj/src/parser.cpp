#include "aspir/parser.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace aspir {

std::string SourceSpan::str() const {
  return file + ":" + std::to_string(line) + ":" + std::to_string(column);
}

ParseError::ParseError(SourceSpan span, const std::string& msg)
    : Error(span.str() + ": " + msg), span_(std::move(span)) {}

namespace {

enum class Tok {
  Ident,     // lowercase or underscore start
  Var,       // uppercase start
  Number,
  String,
  If,        // :-
  Dot,
  Comma,
  Colon,
  Semi,
  LPar,
  RPar,
  LBrack,
  RBrack,
  Amp,
  Bar,
  Cmp,       // = != < <= > >=
  Directive, // #name
  End,
};

struct Token {
  Tok kind;
  std::string text;
  SourceSpan span;
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Var: return "variable";
    case Tok::Number: return "number";
    case Tok::String: return "string";
    case Tok::If: return "':-'";
    case Tok::Dot: return "'.'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Semi: return "';'";
    case Tok::LPar: return "'('";
    case Tok::RPar: return "')'";
    case Tok::LBrack: return "'['";
    case Tok::RBrack: return "']'";
    case Tok::Amp: return "'&'";
    case Tok::Bar: return "'|'";
    case Tok::Cmp: return "comparison";
    case Tok::Directive: return "directive";
    case Tok::End: return "end of input";
  }
  return "?";
}

std::vector<Token> lex(const std::string& text, const std::string& file) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto here = [&] { return SourceSpan{file, line, col}; };
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto is_word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '%') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    SourceSpan sp = here();
    auto push = [&](Tok k, std::size_t n) {
      out.push_back({k, text.substr(i, n), sp});
      advance(n);
    };
    if (std::islower(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && is_word(text[j])) ++j;
      push(Tok::Ident, j - i);
    } else if (std::isupper(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && is_word(text[j])) ++j;
      push(Tok::Var, j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      push(Tok::Number, j - i);
    } else if (c == '"') {
      std::size_t j = i + 1;
      while (j < text.size() && text[j] != '"' && text[j] != '\n') ++j;
      if (j >= text.size() || text[j] != '"') throw ParseError(sp, "unterminated string");
      push(Tok::String, j + 1 - i);
    } else if (c == '#') {
      std::size_t j = i + 1;
      while (j < text.size() && is_word(text[j])) ++j;
      push(Tok::Directive, j - i);
    } else if (text.compare(i, 2, ":-") == 0) {
      push(Tok::If, 2);
    } else if (text.compare(i, 2, "!=") == 0 || text.compare(i, 2, "<=") == 0 ||
               text.compare(i, 2, ">=") == 0) {
      push(Tok::Cmp, 2);
    } else if (c == '<' || c == '>' || c == '=') {
      push(Tok::Cmp, 1);
    } else {
      Tok k;
      switch (c) {
        case '.': k = Tok::Dot; break;
        case ',': k = Tok::Comma; break;
        case ':': k = Tok::Colon; break;
        case ';': k = Tok::Semi; break;
        case '(': k = Tok::LPar; break;
        case ')': k = Tok::RPar; break;
        case '[': k = Tok::LBrack; break;
        case ']': k = Tok::RBrack; break;
        case '&': k = Tok::Amp; break;
        case '|': k = Tok::Bar; break;
        default: throw ParseError(sp, std::string("unexpected character '") + c + "'");
      }
      push(k, 1);
    }
  }
  out.push_back({Tok::End, "", here()});
  return out;
}

class Parser {
public:
  Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program program() {
    Program p;
    while (peek().kind != Tok::End) {
      if (peek().kind == Tok::Directive) {
        const Token& d = next();
        if (d.text != "#split") throw ParseError(d.span, "unknown directive " + d.text);
        expect(Tok::Dot);
        p.unit_markers.push_back(p.rules.size());
        continue;
      }
      SourceSpan start = peek().span;
      Rule r = rule();
      if (auto bad = safety_violation(r)) throw ParseError(start, "unsafe rule: " + *bad);
      check_arities(r, start);
      p.rules.push_back(std::move(r));
    }
    return p;
  }

  Interpretation facts() {
    Interpretation out;
    while (peek().kind != Tok::End) {
      SourceSpan start = peek().span;
      Atom a = atom();
      if (!a.is_ground()) throw ParseError(start, "fact must be ground");
      expect(Tok::Dot);
      out.insert(std::move(a));
    }
    return out;
  }

private:
  const Token& peek(std::size_t k = 0) const {
    std::size_t j = std::min(pos_ + k, toks_.size() - 1);
    return toks_[j];
  }
  const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(t.span, "expected " + expected + ", got " + got);
  }

  const Token& expect(Tok k) {
    if (peek().kind != k) fail(tok_name(k));
    return next();
  }

  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }

  bool is_disjunction_sep() const {
    if (peek().kind == Tok::Bar) return true;
    return peek().kind == Tok::Ident && peek().text == "v" &&
           (peek(1).kind == Tok::Ident || peek(1).kind == Tok::Var);
  }

  Rule rule() {
    Rule r;
    if (peek().kind != Tok::If) {
      r.head.push_back(atom());
      while (is_disjunction_sep()) {
        next();
        r.head.push_back(atom());
      }
    }
    if (accept(Tok::If)) {
      if (peek().kind != Tok::Dot) {
        r.body.push_back(body_literal());
        while (accept(Tok::Comma)) r.body.push_back(body_literal());
      }
    } else if (r.head.empty()) {
      fail("':-'");
    }
    expect(Tok::Dot);
    return r;
  }

  BodyLiteral body_literal() {
    BodyLiteral l;
    if (peek().kind == Tok::Ident && peek().text == "not" && peek(1).kind != Tok::LPar &&
        peek(1).kind != Tok::Comma && peek(1).kind != Tok::Dot && peek(1).kind != Tok::Cmp) {
      next();
      l.naf = true;
    }
    if (peek().kind == Tok::Amp) {
      next();
      const Token& name = expect(Tok::Ident);
      if (name.text == "query_c" || name.text == "query_b") {
        l.payload = query_atom(name.text == "query_c" ? QueryAtom::Mode::Cautious : QueryAtom::Mode::Brave);
      } else {
        l.payload = external_atom(name.text);
      }
      return l;
    }
    if ((peek().kind == Tok::Ident || peek().kind == Tok::Var) && peek().text == "COND" && peek(1).kind == Tok::LPar) {
      SourceSpan sp = peek().span;
      if (l.naf) throw ParseError(sp, "conditional literals cannot be negated");
      next();
      expect(Tok::LPar);
      Conditional c;
      c.lit = atom();
      expect(Tok::Colon);
      c.cond = atom();
      expect(Tok::RPar);
      l.payload = std::move(c);
      return l;
    }
    // Builtin if a comparison follows the first term.
    std::size_t save = pos_;
    if (peek().kind == Tok::Var || peek().kind == Tok::Number || peek().kind == Tok::String ||
        peek().kind == Tok::Ident) {
      Term lhs = term();
      if (peek().kind == Tok::Cmp) {
        std::string op = next().text;
        Term rhs = term();
        l.payload = Builtin{std::move(lhs), std::move(op), std::move(rhs)};
        return l;
      }
      pos_ = save;
    }
    l.payload = atom();
    return l;
  }

  ExternalAtom external_atom(const std::string& name) {
    ExternalAtom e;
    e.name = name;
    if (accept(Tok::LBrack)) {
      if (peek().kind != Tok::RBrack) {
        e.inputs.push_back(term());
        while (accept(Tok::Comma)) e.inputs.push_back(term());
      }
      expect(Tok::RBrack);
    }
    if (accept(Tok::LPar)) {
      if (peek().kind != Tok::RPar) {
        e.outputs.push_back(term());
        while (accept(Tok::Comma)) e.outputs.push_back(term());
      }
      expect(Tok::RPar);
    }
    return e;
  }

  QueryAtom query_atom(QueryAtom::Mode mode) {
    QueryAtom q;
    q.mode = mode;
    expect(Tok::LBrack);
    const Token& src = expect(Tok::String);
    q.source = src.text.substr(1, src.text.size() - 2);
    if (accept(Tok::Semi)) {
      q.inputs.push_back(expect(Tok::Ident).text);
      while (accept(Tok::Comma)) q.inputs.push_back(expect(Tok::Ident).text);
    }
    expect(Tok::RBrack);
    expect(Tok::LPar);
    do {
      bool neg = false;
      if (peek().kind == Tok::Ident && peek().text == "not" && peek(1).kind == Tok::Ident) {
        next();
        neg = true;
      }
      SourceSpan sp = peek().span;
      Atom a = atom();
      if (!a.is_ground()) throw ParseError(sp, "query literal must be ground: " + a.str());
      q.query.emplace_back(neg, std::move(a));
    } while (accept(Tok::Comma));
    expect(Tok::RPar);
    return q;
  }

  Atom atom() {
    if (peek().kind != Tok::Ident) fail("atom");
    Atom a(next().text);
    if (accept(Tok::LPar)) {
      if (peek().kind != Tok::RPar) {
        a.args.push_back(term());
        while (accept(Tok::Comma)) a.args.push_back(term());
      }
      expect(Tok::RPar);
    }
    return a;
  }

  Term term() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Var: return Term::variable(next().text);
      case Tok::Number: return Term::constant(next().text);
      case Tok::String: return Term::constant(next().text);
      case Tok::Ident: {
        std::string name = next().text;
        std::vector<Term> args;
        if (accept(Tok::LPar)) {
          if (peek().kind != Tok::RPar) {
            args.push_back(term());
            while (accept(Tok::Comma)) args.push_back(term());
          }
          expect(Tok::RPar);
        }
        return Term::function(std::move(name), std::move(args));
      }
      default: fail("term");
    }
  }

  void note_arity(const Atom& a, const SourceSpan& sp) {
    auto [it, fresh] = arity_.emplace(a.predicate, a.args.size());
    if (!fresh && it->second != a.args.size())
      throw ParseError(sp, "arity clash for predicate " + a.predicate + ": " + std::to_string(it->second) +
                               " vs " + std::to_string(a.args.size()));
  }

  void check_arities(const Rule& r, const SourceSpan& sp) {
    for (const auto& h : r.head) note_arity(h, sp);
    for (const auto& l : r.body) {
      if (l.kind() == BodyLiteral::Kind::Ordinary) note_arity(l.atom(), sp);
      if (l.kind() == BodyLiteral::Kind::Conditional) {
        note_arity(l.conditional().lit, sp);
        note_arity(l.conditional().cond, sp);
      }
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::map<std::string, std::size_t> arity_;
};

void term_vars(const Term& t, std::set<std::string>& out) {
  if (t.is_variable()) out.insert(t.name);
  for (const auto& a : t.args) term_vars(a, out);
}

std::set<std::string> atom_vars(const Atom& a) {
  std::set<std::string> out;
  for (const auto& t : a.args) term_vars(t, out);
  return out;
}

}  // namespace

std::optional<std::string> safety_violation(const Rule& r) {
  std::set<std::string> bound;
  for (const auto& l : r.body)
    if (!l.naf && l.is_ordinary())
      for (const auto& v : atom_vars(l.atom())) bound.insert(v);
  // Positive externals bind their outputs once their inputs are bound.
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& l : r.body) {
      if (l.naf || l.kind() != BodyLiteral::Kind::External) continue;
      std::set<std::string> in;
      for (const auto& t : l.external().inputs) term_vars(t, in);
      bool ready = std::all_of(in.begin(), in.end(), [&](const std::string& v) { return bound.count(v) > 0; });
      if (!ready) continue;
      std::set<std::string> out;
      for (const auto& t : l.external().outputs) term_vars(t, out);
      for (const auto& v : out) changed |= bound.insert(v).second;
    }
  }
  auto check = [&](const std::set<std::string>& vs, const std::string& where) -> std::optional<std::string> {
    for (const auto& v : vs)
      if (!bound.count(v)) return "variable " + v + " in " + where;
    return std::nullopt;
  };
  for (const auto& h : r.head)
    if (auto e = check(atom_vars(h), h.str())) return e;
  for (const auto& l : r.body) {
    std::set<std::string> vs;
    switch (l.kind()) {
      case BodyLiteral::Kind::Ordinary: vs = atom_vars(l.atom()); break;
      case BodyLiteral::Kind::External:
        for (const auto& t : l.external().inputs) term_vars(t, vs);
        for (const auto& t : l.external().outputs) term_vars(t, vs);
        break;
      case BodyLiteral::Kind::Builtin:
        term_vars(l.builtin().lhs, vs);
        term_vars(l.builtin().rhs, vs);
        break;
      case BodyLiteral::Kind::Conditional: {
        auto local = atom_vars(l.conditional().cond);
        for (const auto& v : atom_vars(l.conditional().lit))
          if (!local.count(v)) vs.insert(v);
        break;
      }
      case BodyLiteral::Kind::Query: break;
    }
    if (auto e = check(vs, l.str())) return e;
  }
  return std::nullopt;
}

Program parse_program(const std::string& text, const std::string& file) {
  return Parser(lex(text, file)).program();
}

Program parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str(), path);
}

Interpretation parse_facts(const std::string& text, const std::string& file) {
  return Parser(lex(text, file)).facts();
}

std::string render_program(const Program& p) { return p.str(); }

}  // namespace aspir
