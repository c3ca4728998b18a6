// SPDX-License-Identifier: Apache-2.0
#include "pcfr/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pcfr {

namespace {

enum class Tok {
  End, Ident, Number, Backslash, Colon, Dot, LParen, RParen, Lt, Gt, Comma,
  Plus, Minus, Star, Arrow, Caret, Equals, Semi,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceSpan span;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Ident:
    case Tok::Number: return "'" + t.text + "'";
    default: return "'" + t.text + "'";
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.span = {line_, col_};
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      const char c = src_[pos_];
      const bool after_caret = !out.empty() && out.back().kind == Tok::Caret;
      if (std::isdigit(static_cast<unsigned char>(c))) {
        t.kind = Tok::Number;
        t.text = after_caret ? lex_digits() : lex_number();
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.kind = Tok::Ident;
        t.text = lex_ident();
      } else {
        t.text = std::string(1, c);
        advance();
        switch (c) {
          case '\\': t.kind = Tok::Backslash; break;
          case ':': t.kind = Tok::Colon; break;
          case '.': t.kind = Tok::Dot; break;
          case '(': t.kind = Tok::LParen; break;
          case ')': t.kind = Tok::RParen; break;
          case '<': t.kind = Tok::Lt; break;
          case '>': t.kind = Tok::Gt; break;
          case ',': t.kind = Tok::Comma; break;
          case '+': t.kind = Tok::Plus; break;
          case '*': t.kind = Tok::Star; break;
          case '^': t.kind = Tok::Caret; break;
          case '=': t.kind = Tok::Equals; break;
          case ';': t.kind = Tok::Semi; break;
          case '-':
            if (pos_ < src_.size() && src_[pos_] == '>') {
              advance();
              t.kind = Tok::Arrow;
              t.text = "->";
            } else {
              t.kind = Tok::Minus;
            }
            break;
          default:
            throw ParseError(std::string("unexpected character '") + c + "'", t.span);
        }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '-') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        return;
      }
    }
  }

  bool digit_at(std::size_t p) const {
    return p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]));
  }

  std::string lex_digits() {
    const std::size_t start = pos_;
    while (digit_at(pos_)) advance();
    return std::string(src_.substr(start, pos_ - start));
  }

  std::string lex_number() {
    const std::size_t start = pos_;
    while (digit_at(pos_)) advance();
    if (pos_ < src_.size() && src_[pos_] == '.' && digit_at(pos_ + 1)) {
      advance();
      while (digit_at(pos_)) advance();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (digit_at(p)) {
        while (pos_ < p) advance();
        while (digit_at(pos_)) advance();
      }
    }
    return std::string(src_.substr(start, pos_ - start));
  }

  std::string lex_ident() {
    const std::size_t start = pos_;
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'') {
        advance();
      } else {
        break;
      }
    }
    // family members carry their parameters: powc[c,k]
    if (pos_ < src_.size() && src_[pos_] == '[') {
      const SourceSpan at{line_, col_};
      while (pos_ < src_.size() && src_[pos_] != ']') {
        if (src_[pos_] == '\n') throw ParseError("unterminated '['", at);
        advance();
      }
      if (pos_ >= src_.size()) throw ParseError("unterminated '['", at);
      advance();
    }
    return std::string(src_.substr(start, pos_ - start));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t col_ = 1;
};

bool is_keyword(const std::string& s) {
  return s == "fix" || s == "if" || s == "then" || s == "else" || s == "proj" || s == "def";
}

double to_double(const Token& t) {
  double v = 0.0;
  const char* first = t.text.data();
  const char* last = first + t.text.size();
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last || !std::isfinite(v)) {
    throw ParseError("invalid number '" + t.text + "'", t.span);
  }
  return v;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, const PrimRegistry& reg) : toks_(std::move(toks)), reg_(reg) {}

  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_ident(std::string_view s) const { return at(Tok::Ident) && peek().text == s; }

  Token take() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }

  Token expect(Tok k, std::string_view what) {
    if (!at(k)) {
      throw ParseError("expected " + std::string(what) + ", found " + describe(peek()),
                       peek().span);
    }
    return take();
  }

  void expect_keyword(std::string_view kw) {
    if (!at_ident(kw)) {
      throw ParseError("expected '" + std::string(kw) + "', found " + describe(peek()),
                       peek().span);
    }
    take();
  }

  std::size_t expect_count(std::string_view what) {
    const Token t = expect(Tok::Number, what);
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || p != t.text.data() + t.text.size()) {
      throw ParseError("expected a natural number, found '" + t.text + "'", t.span);
    }
    return v;
  }

  Name binder_name() {
    const Token t = expect(Tok::Ident, "a variable name");
    if (is_keyword(t.text) || reg_.contains(t.text)) {
      throw ParseError("'" + t.text + "' is reserved", t.span);
    }
    return Name(t.text);
  }

  // ---- types

  Type type() {
    Type lhs = type_atom();
    if (at(Tok::Arrow)) {
      take();
      return arrow(lhs, type());
    }
    return lhs;
  }

  Type type_atom() {
    const Token t = peek();
    if (t.kind == Tok::Ident && t.text == "R") {
      take();
      if (at(Tok::Caret)) {
        take();
        return real_power(expect_count("an exponent"));
      }
      return real_type();
    }
    if (t.kind == Tok::Number && t.text == "1") {
      take();
      return unit_type();
    }
    if (t.kind == Tok::LParen) {
      take();
      std::vector<Type> comps{type()};
      while (at(Tok::Star)) {
        take();
        comps.push_back(type());
      }
      expect(Tok::RParen, "')'");
      return product(std::move(comps));
    }
    throw ParseError("expected a type, found " + describe(t), t.span);
  }

  // ---- terms

  Term term() {
    const Token t = peek();
    if (t.kind == Tok::Backslash) {
      take();
      const Name x = binder_name();
      expect(Tok::Colon, "':'");
      Type ty = type();
      expect(Tok::Dot, "'.'");
      return lam(x, std::move(ty), term(), t.span);
    }
    if (t.kind == Tok::Ident && t.text == "fix") {
      take();
      const Name f = binder_name();
      expect(Tok::Colon, "':'");
      Type ty = type();
      expect(Tok::Dot, "'.'");
      Term body = term();
      if (!ty->is_arrow()) {
        throw Error(ErrorCode::NonArrowFixType, "fixpoint type must be an arrow", t.span);
      }
      return fix(f, std::move(ty), std::move(body), t.span);
    }
    if (t.kind == Tok::Ident && t.text == "if") {
      take();
      Term g = term();
      expect_keyword("then");
      Term a = term();
      expect_keyword("else");
      Term b = term();
      return cond(std::move(g), std::move(a), std::move(b), t.span);
    }
    return sum_expr();
  }

  Term sum_expr() {
    Term lhs = product_expr();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      const Token op = take();
      Term rhs = product_expr();
      lhs = binary(op.kind == Tok::Plus ? "add" : "sub", std::move(lhs), std::move(rhs), op.span);
    }
    return lhs;
  }

  Term product_expr() {
    Term lhs = unary_expr();
    while (at(Tok::Star)) {
      const Token op = take();
      lhs = binary("mul", std::move(lhs), unary_expr(), op.span);
    }
    return lhs;
  }

  Term unary_expr() {
    if (!at(Tok::Minus)) return app_expr();
    const Token op = take();
    if (at(Tok::Number) && peek(1).kind != Tok::Caret) {
      const Token num = take();
      return mk_numeral(-to_double(num), op.span);
    }
    return prim_app(lookup("neg", op.span), {unary_expr()}, op.span);
  }

  Term binary(const std::string& sym, Term a, Term b, SourceSpan span) {
    return prim_app(lookup(sym, span), {std::move(a), std::move(b)}, span);
  }

  Prim lookup(const std::string& sym, SourceSpan span) const {
    auto p = reg_.find(sym);
    if (!p) throw Error(ErrorCode::UnknownPrimitive, "unknown primitive " + sym, span);
    return p;
  }

  bool starts_atom() const {
    switch (peek().kind) {
      case Tok::Number:
      case Tok::LParen:
      case Tok::Lt:
        return true;
      case Tok::Ident:
        return !is_keyword(peek().text) || peek().text == "proj";
      default:
        return false;
    }
  }

  Term app_expr() {
    Term head;
    if (at_ident("proj")) {
      const Token t = take();
      const std::size_t i = expect_count("a projection index");
      const std::size_t k = expect_count("a tuple width");
      if (!starts_atom()) throw ParseError("expected a term after proj", peek().span);
      head = proj(i, k, atom(), t.span);
    } else {
      head = atom();
    }
    while (starts_atom()) {
      const SourceSpan s = peek().span;
      head = app(std::move(head), atom_or_proj(), s);
    }
    return head;
  }

  Term atom_or_proj() {
    if (!at_ident("proj")) return atom();
    const Token t = take();
    const std::size_t i = expect_count("a projection index");
    const std::size_t k = expect_count("a tuple width");
    return proj(i, k, atom(), t.span);
  }

  std::size_t lanes_suffix() {
    if (!at(Tok::Caret)) return 1;
    take();
    const std::size_t k = expect_count("a lane count");
    if (k == 0) throw ParseError("lane count must be positive", peek().span);
    return k;
  }

  Term atom() {
    const Token t = peek();
    switch (t.kind) {
      case Tok::Number: {
        take();
        const double v = to_double(t);
        return lifted_numeral(v, lanes_suffix(), t.span);
      }
      case Tok::LParen: {
        take();
        Term inner = term();
        expect(Tok::RParen, "')'");
        if (at(Tok::Caret) && inner->is_numeral() && inner->lanes() == 1) {
          return lifted_numeral(inner->value(), lanes_suffix(), t.span);
        }
        return inner;
      }
      case Tok::Lt: {
        take();
        std::vector<Term> comps;
        if (!at(Tok::Gt)) {
          comps.push_back(term());
          while (at(Tok::Comma)) {
            take();
            comps.push_back(term());
          }
        }
        if (!at(Tok::Gt)) {
          throw ParseError("unclosed tuple: expected ',' or '>', found " + describe(peek()),
                           peek().span);
        }
        take();
        return tuple(std::move(comps), t.span);
      }
      case Tok::Ident: {
        if (is_keyword(t.text)) break;
        take();
        if (auto p = reg_.find(t.text)) {
          const std::size_t lanes = lanes_suffix();
          expect(Tok::LParen, "'(' after primitive " + t.text);
          std::vector<Term> args;
          if (!at(Tok::RParen)) {
            args.push_back(term());
            while (at(Tok::Comma)) {
              take();
              args.push_back(term());
            }
          }
          expect(Tok::RParen, "')'");
          return lifted_prim_app(std::move(p), lanes, std::move(args), t.span);
        }
        if (t.text.find('[') != std::string::npos) {
          throw Error(ErrorCode::UnknownPrimitive, "unknown primitive " + t.text, t.span);
        }
        return var(Name(t.text), t.span);
      }
      default:
        break;
    }
    throw ParseError("expected a term, found " + describe(t), t.span);
  }

  bool done() const { return at(Tok::End); }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const PrimRegistry& reg_;
};

// ---- printer

enum Level { kTerm = 0, kSum = 1, kProduct = 2, kUnary = 3, kApp = 4, kAtom = 5 };

class Printer {
 public:
  std::ostringstream os;

  void run(const Term& t, int ctx) {
    const int own = level(t);
    const bool paren = own < ctx;
    if (paren) os << '(';
    emit(t);
    if (paren) os << ')';
  }

 private:
  static const char* infix(const Term& t) {
    if (t->kind() != TermKind::Prim || t->is_numeral() || t->lanes() != 1) return nullptr;
    const auto& n = t->prim()->name;
    if (n == "add") return " + ";
    if (n == "sub") return " - ";
    if (n == "mul") return " * ";
    return nullptr;
  }

  static int level(const Term& t) {
    switch (t->kind()) {
      case TermKind::Lam:
      case TermKind::Fix:
      case TermKind::Cond:
        return kTerm;
      case TermKind::App:
      case TermKind::Proj:
        return kApp;
      case TermKind::Prim:
        if (const char* op = infix(t)) return op[1] == '*' ? kProduct : kSum;
        if (t->is_numeral() && t->lanes() == 1 && std::signbit(t->value())) return kUnary;
        return kAtom;
      default:
        return kAtom;
    }
  }

  void emit(const Term& t) {
    switch (t->kind()) {
      case TermKind::Var: os << t->name().str(); return;
      case TermKind::Lam:
        os << '\\' << t->name().str() << ':' << to_string(t->binder_type()) << ". ";
        run(t->body(), kTerm);
        return;
      case TermKind::Fix:
        os << "fix " << t->name().str() << ':' << to_string(t->binder_type()) << ". ";
        run(t->body(), kTerm);
        return;
      case TermKind::Cond:
        os << "if ";
        run(t->guard(), kTerm);
        os << " then ";
        run(t->then_branch(), kTerm);
        os << " else ";
        run(t->else_branch(), kTerm);
        return;
      case TermKind::App:
        run(t->fun(), kApp);
        os << ' ';
        run(t->arg(), kAtom);
        return;
      case TermKind::Proj:
        os << "proj " << t->index() << ' ' << t->width() << ' ';
        run(t->body(), kAtom);
        return;
      case TermKind::Tuple:
        os << '<';
        for (std::size_t i = 0; i < t->arity(); ++i) {
          if (i) os << ", ";
          run(t->kid(i), kTerm);
        }
        os << '>';
        return;
      case TermKind::Prim: emit_prim(t); return;
    }
  }

  void emit_prim(const Term& t) {
    if (t->is_numeral()) {
      if (t->lanes() == 1) {
        os << format_real(t->value());
      } else if (std::signbit(t->value())) {
        os << '(' << format_real(t->value()) << ")^" << t->lanes();
      } else {
        os << format_real(t->value()) << '^' << t->lanes();
      }
      return;
    }
    if (const char* op = infix(t)) {
      const int own = op[1] == '*' ? kProduct : kSum;
      run(t->kid(0), own);
      os << op;
      run(t->kid(1), own + 1);
      return;
    }
    os << t->prim()->name;
    if (t->lanes() != 1) os << '^' << t->lanes();
    os << '(';
    for (std::size_t i = 0; i < t->arity(); ++i) {
      if (i) os << ", ";
      run(t->kid(i), kTerm);
    }
    os << ')';
  }
};

std::vector<double> parse_reals(std::string_view text, SourceSpan span) {
  std::vector<double> out;
  std::istringstream is{std::string(text)};
  std::string word;
  while (is >> word) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(word.data(), word.data() + word.size(), v);
    if (ec != std::errc() || p != word.data() + word.size() || !std::isfinite(v)) {
      throw ParseError("invalid number '" + word + "' in pragma", span);
    }
    out.push_back(v);
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

namespace {

// Constructors reject malformed nodes (bad projection indices, non-finite
// literals, non-arrow fixpoints); from text these are syntax errors.
template <class F>
auto as_parse_errors(F&& f) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const TypeError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.detail(), e.span());
  }
}

}  // namespace

Term parse_term(std::string_view text, const PrimRegistry& reg) {
  return as_parse_errors([&] {
    Parser p(Lexer(text).run(), reg);
    Term t = p.term();
    if (!p.done()) throw ParseError("unexpected " + describe(p.peek()), p.peek().span);
    return t;
  });
}

Type parse_type(std::string_view text) {
  return as_parse_errors([&] {
    Parser p(Lexer(text).run(), default_registry());
    Type t = p.type();
    if (!p.done()) throw ParseError("unexpected " + describe(p.peek()), p.peek().span);
    return t;
  });
}

std::string print_term(const Term& t) {
  Printer p;
  p.run(t, kTerm);
  return p.os.str();
}

SourceProgram parse_source(std::string_view text, std::string path, const PrimRegistry& reg) {
  SourceProgram out;
  out.path = std::move(path);

  std::optional<std::vector<Name>> declared;
  std::uint32_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    ++line_no;
    const std::size_t end = std::min(text.find('\n', start), text.size());
    const std::string_view line = trim(text.substr(start, end - start));
    start = end + 1;
    if (!line.starts_with("--")) continue;
    const std::string_view body = trim(line.substr(2));
    const SourceSpan span{line_no, 1};
    if (body.starts_with("args:")) {
      std::vector<Name> names;
      std::istringstream is{std::string(body.substr(5))};
      std::string word;
      while (is >> word) names.emplace_back(word);
      declared = std::move(names);
    } else if (body.starts_with("at:")) {
      out.sample_points.push_back(parse_reals(body.substr(3), span));
    }
  }

  as_parse_errors([&] {
    Parser p(Lexer(text).run(), reg);
    std::vector<std::pair<Name, Term>> defs;
    auto expand = [&defs](Term t) {
      for (auto it = defs.rbegin(); it != defs.rend(); ++it) t = subst(t, it->first, it->second);
      return t;
    };
    while (p.at_ident("def")) {
      p.take();
      const Token name_tok = p.peek();
      const Name name = p.binder_name();
      p.expect(Tok::Equals, "'='");
      Term body = expand(p.term());
      p.expect(Tok::Semi, "';' after definition");
      if (!body->closed() && !free_vars(body).empty()) {
        throw ParseError("definition " + name.str() + " has free variable " +
                             free_vars(body).front().str(),
                         name_tok.span);
      }
      defs.emplace_back(name, std::move(body));
    }
    if (p.done()) throw ParseError("expected a term, found end of input", p.peek().span);
    out.term = expand(p.term());
    if (!p.done()) throw ParseError("unexpected " + describe(p.peek()), p.peek().span);
    return 0;
  });

  if (declared) {
    for (Name x : free_vars(out.term)) {
      if (std::find(declared->begin(), declared->end(), x) == declared->end()) {
        throw Error(ErrorCode::UnboundVariable,
                    "free variable " + x.str() + " is not listed in the args pragma");
      }
    }
    out.params = std::move(*declared);
  } else {
    out.params = free_vars(out.term);
  }
  for (const auto& pt : out.sample_points) {
    if (pt.size() != out.params.size()) {
      throw ParseError("sample point has " + std::to_string(pt.size()) + " coordinates, expected " +
                           std::to_string(out.params.size()),
                       {});
    }
  }
  return out;
}

SourceProgram load_source(const std::filesystem::path& path, const PrimRegistry& reg) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_source(ss.str(), path.string(), reg);
}

}  // namespace pcfr
