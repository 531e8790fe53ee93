#include "momentcert/pop_io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace momentcert {

namespace {

constexpr int kMaxExponent = 4096;

enum class TokKind { Ident, Number, Plus, Minus, Star, Slash, Caret, LParen, RParen, Colon, EqEq, GtEq, Newline, End };

struct Token {
  TokKind kind;
  std::string text;
  Rational value;  // for numbers
  int line = 0, col = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  Token next() {
    skip_space_and_comments();
    const int line = line_, col = col_;
    if (pos_ >= text_.size()) return {TokKind::End, "", Rational(0), line, col};
    const char c = text_[pos_];
    if (c == '\n') {
      advance();
      return {TokKind::Newline, "\n", Rational(0), line, col};
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string id;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        id += text_[pos_];
        advance();
      }
      return {TokKind::Ident, id, Rational(0), line, col};
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
      return lex_number(line, col);
    }
    advance();
    switch (c) {
      case '+': return {TokKind::Plus, "+", Rational(0), line, col};
      case '-': return {TokKind::Minus, "-", Rational(0), line, col};
      case '*': return {TokKind::Star, "*", Rational(0), line, col};
      case '/': return {TokKind::Slash, "/", Rational(0), line, col};
      case '^': return {TokKind::Caret, "^", Rational(0), line, col};
      case '(': return {TokKind::LParen, "(", Rational(0), line, col};
      case ')': return {TokKind::RParen, ")", Rational(0), line, col};
      case ':': return {TokKind::Colon, ":", Rational(0), line, col};
      case '=':
        if (pos_ < text_.size() && text_[pos_] == '=') {
          advance();
          return {TokKind::EqEq, "==", Rational(0), line, col};
        }
        throw ParseError(line, col, "expected '=='");
      case '>':
        if (pos_ < text_.size() && text_[pos_] == '=') {
          advance();
          return {TokKind::GtEq, ">=", Rational(0), line, col};
        }
        throw ParseError(line, col, "expected '>='");
      default:
        throw ParseError(line, col, std::string("unexpected character '") + c + "'");
    }
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space_and_comments() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r') {
        advance();
      } else {
        break;
      }
    }
  }

  Token lex_number(int line, int col) {
    std::string digits;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      digits += text_[pos_];
      advance();
    }
    std::string frac;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      advance();
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        frac += text_[pos_];
        advance();
      }
      if (frac.empty() && digits.empty()) throw ParseError(line, col, "malformed number");
    }
    if (digits.empty() && frac.empty()) throw ParseError(line, col, "malformed number");
    using boost::multiprecision::cpp_int;
    cpp_int num = digits.empty() ? cpp_int(0) : cpp_int(digits);
    cpp_int den = 1;
    for (char d : frac) {
      num = num * 10 + (d - '0');
      den *= 10;
    }
    return {TokKind::Number, digits + (frac.empty() ? "" : "." + frac), Rational(num, den), line, col};
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lexer_(text) { shift(); }

  POPInstance parse(const std::string& name) {
    POPInstance pop;
    pop.name = name;
    bool saw_vars = false, saw_min = false;
    while (cur_.kind != TokKind::End) {
      if (cur_.kind == TokKind::Newline) {
        shift();
        continue;
      }
      if (cur_.kind != TokKind::Ident) throw err("expected a directive (vars, min, h, g)");
      const std::string head = cur_.text;
      if (head == "vars") {
        if (saw_vars) throw err("duplicate vars line");
        shift();
        parse_vars(pop);
        saw_vars = true;
      } else if (head == "min") {
        if (!saw_vars) throw err("min before vars");
        if (saw_min) throw err("duplicate min line");
        shift();
        pop.objective = parse_expr();
        expect_line_end();
        saw_min = true;
      } else if (head == "h" || head == "g") {
        if (!saw_vars) throw err("constraint before vars");
        shift();
        expect(TokKind::Colon, "':'");
        Polynomial<Rational> p = parse_expr();
        if (head == "h") {
          expect(TokKind::EqEq, "'=='");
          expect_zero();
          pop.equalities.push_back(std::move(p));
        } else {
          expect(TokKind::GtEq, "'>='");
          expect_zero();
          pop.inequalities.push_back(std::move(p));
        }
        expect_line_end();
      } else {
        throw err("unknown directive '" + head + "'");
      }
    }
    if (!saw_vars) throw err("missing vars line");
    if (!saw_min) throw err("missing min line");
    if (pop.equalities.size() > static_cast<std::size_t>(nvars_))
      throw err("more equality constraints than variables (m1 > n)");
    return pop;
  }

 private:
  void shift() { cur_ = lexer_.next(); }

  ParseError err(const std::string& msg) const { return ParseError(cur_.line, cur_.col, msg); }

  void expect(TokKind k, const std::string& what) {
    if (cur_.kind != k) throw err("expected " + what);
    shift();
  }

  void expect_zero() {
    if (cur_.kind != TokKind::Number || cur_.value != Rational(0)) throw err("expected literal 0");
    shift();
  }

  void expect_line_end() {
    if (cur_.kind == TokKind::Newline) {
      shift();
    } else if (cur_.kind != TokKind::End) {
      throw err("unexpected trailing tokens");
    }
  }

  void parse_vars(POPInstance& pop) {
    std::unordered_map<std::string, int> seen;
    while (cur_.kind == TokKind::Ident) {
      if (seen.count(cur_.text)) throw err("duplicate variable '" + cur_.text + "'");
      seen.emplace(cur_.text, static_cast<int>(pop.var_names.size()));
      pop.var_names.push_back(cur_.text);
      shift();
    }
    if (pop.var_names.empty()) throw err("vars line declares no variables");
    var_index_ = std::move(seen);
    nvars_ = static_cast<int>(pop.var_names.size());
    pop.objective = Polynomial<Rational>(nvars_);
    pop.equalities = PolyTuple<Rational>(nvars_);
    pop.inequalities = PolyTuple<Rational>(nvars_);
    expect_line_end();
  }

  Polynomial<Rational> parse_expr() {
    Polynomial<Rational> acc = parse_term();
    while (cur_.kind == TokKind::Plus || cur_.kind == TokKind::Minus) {
      const bool minus = cur_.kind == TokKind::Minus;
      shift();
      Polynomial<Rational> t = parse_term();
      if (minus)
        acc -= t;
      else
        acc += t;
    }
    return acc;
  }

  Polynomial<Rational> parse_term() {
    Polynomial<Rational> acc = parse_factor();
    while (cur_.kind == TokKind::Star || cur_.kind == TokKind::Slash) {
      const bool divide = cur_.kind == TokKind::Slash;
      const Token op = cur_;
      shift();
      Polynomial<Rational> f = parse_factor();
      if (divide) {
        if (f.degree() > 0) throw ParseError(op.line, op.col, "division by a non-constant expression");
        const Rational d = f.coeff(Monomial::unit(nvars_));
        if (d == Rational(0)) throw ParseError(op.line, op.col, "division by zero");
        acc *= Rational(1) / d;
      } else {
        acc = acc * f;
      }
    }
    return acc;
  }

  Polynomial<Rational> parse_factor() {
    if (cur_.kind == TokKind::Minus) {
      shift();
      return -parse_factor();
    }
    if (cur_.kind == TokKind::Plus) {
      shift();
      return parse_factor();
    }
    Polynomial<Rational> base = parse_base();
    while (cur_.kind == TokKind::Caret) {
      const Token op = cur_;
      shift();
      if (cur_.kind != TokKind::Number) throw err("expected an integer exponent");
      const Rational v = cur_.value;
      if (denominator(v) != 1 || v < 0) throw err("exponent must be a nonnegative integer");
      if (v > kMaxExponent) throw ParseError(op.line, op.col, "exponent overflow (max " + std::to_string(kMaxExponent) + ")");
      shift();
      base = momentcert::pow(base, static_cast<int>(numerator(v)));
    }
    return base;
  }

  Polynomial<Rational> parse_base() {
    if (cur_.kind == TokKind::Number) {
      Polynomial<Rational> c = Polynomial<Rational>::constant(nvars_, cur_.value);
      shift();
      return c;
    }
    if (cur_.kind == TokKind::Ident) {
      auto it = var_index_.find(cur_.text);
      if (it == var_index_.end()) throw err("unknown variable '" + cur_.text + "'");
      shift();
      return Polynomial<Rational>::variable(nvars_, it->second);
    }
    if (cur_.kind == TokKind::LParen) {
      shift();
      Polynomial<Rational> e = parse_expr();
      expect(TokKind::RParen, "')'");
      return e;
    }
    throw err("expected a number, variable, or '('");
  }

  Lexer lexer_;
  Token cur_;
  std::unordered_map<std::string, int> var_index_;
  int nvars_ = 0;
};

}  // namespace

POPInstance parse_pop(const std::string& text, const std::string& name) {
  Parser parser(text);
  POPInstance pop = parser.parse(name);
  pop.validate();
  return pop;
}

std::string print_pop(const POPInstance& pop) {
  std::ostringstream os;
  os << "vars";
  for (const auto& v : pop.var_names) os << " " << v;
  os << "\n";
  os << "min " << to_string(pop.objective, pop.var_names) << "\n";
  for (const auto& h : pop.equalities.entries) os << "h: " << to_string(h, pop.var_names) << " == 0\n";
  for (const auto& g : pop.inequalities.entries) os << "g: " << to_string(g, pop.var_names) << " >= 0\n";
  return os.str();
}

POPInstance load_pop_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string name = path;
  if (auto slash = name.find_last_of('/'); slash != std::string::npos) name = name.substr(slash + 1);
  if (auto dot = name.rfind(".pop"); dot != std::string::npos && dot == name.size() - 4) name = name.substr(0, dot);
  return parse_pop(buf.str(), name);
}

}  // namespace momentcert
