// MiniLang front end: lexer and recursive-descent parser.

#include "../minilang_parse.hpp"

#include <cctype>
#include <charconv>
#include <optional>
#include <string>
#include <vector>

namespace wbfuzz::minilang {

namespace {

enum class Tok {
  End,
  Int,
  Float,
  Str,
  Ident,
  Let,
  Print,
  Assign,
  Semi,
  LParen,
  RParen,
  Comma,
  Plus,
  Minus,
  Star,
  Slash,
  Lt,
  Le,
  Gt,
  Ge,
  EqEq,
  Ne,
};

struct Token {
  Tok kind{Tok::End};
  std::string text;
  long long int_val{};
  double float_val{};
  int line{1};
};

class Lexer {
 public:
  Lexer(std::string_view src, Diag& diag) : src_(src), diag_(diag) {}

  bool tokenize(std::vector<Token>& out) {
    while (true) {
      skip_blank();
      if (pos_ >= src_.size()) break;
      char c = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        if (!lex_number(out)) return false;
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        lex_word(out);
      } else if (c == '"') {
        if (!lex_string(out)) return false;
      } else {
        if (!lex_punct(out)) return false;
      }
    }
    out.push_back({Tok::End, "", 0, 0.0, line_});
    return true;
  }

 private:
  void skip_blank() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  bool lex_number(std::vector<Token>& out) {
    std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    bool is_float = false;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      is_float = true;
      ++pos_;
      if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        return fail("digit expected after decimal point");
      }
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      is_float = true;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        return fail("digit expected in exponent");
      }
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    std::string_view text = src_.substr(start, pos_ - start);
    Token t;
    t.line = line_;
    t.text = std::string(text);
    if (is_float) {
      t.kind = Tok::Float;
      t.float_val = std::strtod(t.text.c_str(), nullptr);
    } else {
      t.kind = Tok::Int;
      auto res = std::from_chars(text.data(), text.data() + text.size(), t.int_val);
      if (res.ec != std::errc()) {
        return fail("integer literal out of range");
      }
    }
    out.push_back(std::move(t));
    return true;
  }

  void lex_word(std::vector<Token>& out) {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    std::string word(src_.substr(start, pos_ - start));
    Token t;
    t.line = line_;
    t.text = word;
    if (word == "let") {
      t.kind = Tok::Let;
    } else if (word == "print") {
      t.kind = Tok::Print;
    } else {
      t.kind = Tok::Ident;
    }
    out.push_back(std::move(t));
  }

  bool lex_string(std::vector<Token>& out) {
    ++pos_;  // opening quote
    std::string value;
    while (true) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') {
        return fail("unterminated string literal");
      }
      char c = src_[pos_++];
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= src_.size()) return fail("unterminated escape");
        char e = src_[pos_++];
        switch (e) {
          case 'n': value.push_back('\n'); break;
          case 't': value.push_back('\t'); break;
          case '\\': value.push_back('\\'); break;
          case '"': value.push_back('"'); break;
          default: return fail("unknown escape sequence");
        }
      } else {
        value.push_back(c);
      }
    }
    Token t;
    t.kind = Tok::Str;
    t.line = line_;
    t.text = std::move(value);
    out.push_back(std::move(t));
    return true;
  }

  bool lex_punct(std::vector<Token>& out) {
    auto push = [&](Tok k, std::size_t width) {
      out.push_back({k, std::string(src_.substr(pos_, width)), 0, 0.0, line_});
      pos_ += width;
    };
    char c = src_[pos_];
    char next = pos_ + 1 < src_.size() ? src_[pos_ + 1] : '\0';
    switch (c) {
      case '=':
        if (next == '=') { push(Tok::EqEq, 2); return true; }
        push(Tok::Assign, 1);
        return true;
      case '!':
        if (next == '=') { push(Tok::Ne, 2); return true; }
        return fail("unexpected '!'");
      case '<':
        if (next == '=') { push(Tok::Le, 2); return true; }
        push(Tok::Lt, 1);
        return true;
      case '>':
        if (next == '=') { push(Tok::Ge, 2); return true; }
        push(Tok::Gt, 1);
        return true;
      case ';': push(Tok::Semi, 1); return true;
      case '(': push(Tok::LParen, 1); return true;
      case ')': push(Tok::RParen, 1); return true;
      case ',': push(Tok::Comma, 1); return true;
      case '+': push(Tok::Plus, 1); return true;
      case '-': push(Tok::Minus, 1); return true;
      case '*': push(Tok::Star, 1); return true;
      case '/': push(Tok::Slash, 1); return true;
      default: break;
    }
    return fail(std::string("unexpected character '") + c + "'");
  }

  bool fail(const std::string& msg) {
    diag_.line = line_;
    diag_.message = msg;
    return false;
  }

  std::string_view src_;
  Diag& diag_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, std::span<const BuiltinInfo> builtins, Diag& diag)
      : toks_(std::move(toks)), builtins_(builtins), diag_(diag) {}

  bool parse(Program& out) {
    while (cur().kind != Tok::End) {
      Stmt s;
      if (!parse_stmt(s)) return false;
      out.stmts.push_back(std::move(s));
    }
    if (out.stmts.empty()) {
      return fail(1, "program has no statements");
    }
    return true;
  }

 private:
  const Token& cur() const { return toks_[idx_]; }

  const Token& advance() { return toks_[idx_++]; }

  bool expect(Tok kind, const char* what) {
    if (cur().kind != kind) {
      return fail(cur().line, std::string("expected ") + what);
    }
    ++idx_;
    return true;
  }

  const BuiltinInfo* find_builtin(const std::string& name) const {
    for (const auto& b : builtins_) {
      if (b.name == name) return &b;
    }
    return nullptr;
  }

  bool parse_stmt(Stmt& out) {
    out.line = cur().line;
    if (cur().kind == Tok::Let) {
      advance();
      if (cur().kind != Tok::Ident) return fail(cur().line, "expected name after 'let'");
      out.kind = Stmt::Kind::Let;
      out.name = advance().text;
      if (!expect(Tok::Assign, "'='")) return false;
      if (!parse_expr(out.expr)) return false;
      return expect(Tok::Semi, "';'");
    }
    if (cur().kind == Tok::Print) {
      advance();
      out.kind = Stmt::Kind::Print;
      if (!expect(Tok::LParen, "'('")) return false;
      if (!parse_expr(out.expr)) return false;
      if (!expect(Tok::RParen, "')'")) return false;
      return expect(Tok::Semi, "';'");
    }
    if (cur().kind == Tok::Ident) {
      const BuiltinInfo* b = find_builtin(cur().text);
      if (b != nullptr && b->stmt_only) {
        out.kind = Stmt::Kind::Call;
        out.builtin = b->id;
        advance();
        if (!expect(Tok::LParen, "'('")) return false;
        if (!parse_args(out.args)) return false;
        if (!expect(Tok::RParen, "')'")) return false;
        if (static_cast<int>(out.args.size()) != b->arity) {
          return fail(out.line, "wrong argument count for " + b->name);
        }
        return expect(Tok::Semi, "';'");
      }
      return fail(cur().line, "unknown statement '" + cur().text + "'");
    }
    return fail(cur().line, "expected a statement");
  }

  bool parse_args(std::vector<ExprPtr>& out) {
    if (cur().kind == Tok::RParen) return true;
    while (true) {
      ExprPtr e;
      if (!parse_expr(e)) return false;
      out.push_back(std::move(e));
      if (cur().kind != Tok::Comma) return true;
      advance();
    }
  }

  bool parse_expr(ExprPtr& out) { return parse_cmp(out); }

  bool parse_cmp(ExprPtr& out) {
    if (!parse_add(out)) return false;
    auto op = cmp_op(cur().kind);
    if (!op.has_value()) return true;
    int line = cur().line;
    advance();
    ExprPtr rhs;
    if (!parse_add(rhs)) return false;
    if (cmp_op(cur().kind).has_value()) {
      return fail(cur().line, "comparisons cannot be chained; use parentheses");
    }
    auto node = make_expr(ExprKind::Bin);
    node->op = *op;
    node->args = {std::move(out), std::move(rhs)};
    node->line = line;
    out = std::move(node);
    return true;
  }

  bool parse_add(ExprPtr& out) {
    if (!parse_mul(out)) return false;
    while (cur().kind == Tok::Plus || cur().kind == Tok::Minus) {
      BinOp op = cur().kind == Tok::Plus ? BinOp::Add : BinOp::Sub;
      int line = cur().line;
      advance();
      ExprPtr rhs;
      if (!parse_mul(rhs)) return false;
      auto node = make_expr(ExprKind::Bin);
      node->op = op;
      node->args = {std::move(out), std::move(rhs)};
      node->line = line;
      out = std::move(node);
    }
    return true;
  }

  bool parse_mul(ExprPtr& out) {
    if (!parse_unary(out)) return false;
    while (cur().kind == Tok::Star || cur().kind == Tok::Slash) {
      BinOp op = cur().kind == Tok::Star ? BinOp::Mul : BinOp::Div;
      int line = cur().line;
      advance();
      ExprPtr rhs;
      if (!parse_unary(rhs)) return false;
      auto node = make_expr(ExprKind::Bin);
      node->op = op;
      node->args = {std::move(out), std::move(rhs)};
      node->line = line;
      out = std::move(node);
    }
    return true;
  }

  bool parse_unary(ExprPtr& out) {
    if (cur().kind == Tok::Minus) {
      int line = cur().line;
      advance();
      ExprPtr inner;
      if (!parse_unary(inner)) return false;
      auto node = make_expr(ExprKind::Neg);
      node->args = {std::move(inner)};
      node->line = line;
      out = std::move(node);
      return true;
    }
    return parse_primary(out);
  }

  bool parse_primary(ExprPtr& out) {
    const Token& t = cur();
    switch (t.kind) {
      case Tok::Int: {
        auto node = make_expr(ExprKind::IntLit);
        node->int_val = t.int_val;
        node->line = t.line;
        advance();
        out = std::move(node);
        return true;
      }
      case Tok::Float: {
        auto node = make_expr(ExprKind::FloatLit);
        node->float_val = t.float_val;
        node->line = t.line;
        advance();
        out = std::move(node);
        return true;
      }
      case Tok::Str: {
        auto node = make_expr(ExprKind::StrLit);
        node->str_val = t.text;
        node->line = t.line;
        advance();
        out = std::move(node);
        return true;
      }
      case Tok::Ident: {
        std::string name = t.text;
        int line = t.line;
        advance();
        if (cur().kind == Tok::LParen) {
          const BuiltinInfo* b = find_builtin(name);
          if (b == nullptr || b->stmt_only) {
            return fail(line, "unknown function '" + name + "'");
          }
          advance();
          auto node = make_expr(ExprKind::Call);
          node->builtin = b->id;
          node->line = line;
          if (!parse_args(node->args)) return false;
          if (!expect(Tok::RParen, "')'")) return false;
          if (static_cast<int>(node->args.size()) != b->arity) {
            return fail(line, "wrong argument count for " + name);
          }
          out = std::move(node);
          return true;
        }
        auto node = make_expr(ExprKind::Var);
        node->str_val = std::move(name);
        node->line = line;
        out = std::move(node);
        return true;
      }
      case Tok::LParen: {
        advance();
        if (!parse_expr(out)) return false;
        return expect(Tok::RParen, "')'");
      }
      default:
        return fail(t.line, "expected an expression");
    }
  }

  static std::optional<BinOp> cmp_op(Tok k) {
    switch (k) {
      case Tok::Lt: return BinOp::Lt;
      case Tok::Le: return BinOp::Le;
      case Tok::Gt: return BinOp::Gt;
      case Tok::Ge: return BinOp::Ge;
      case Tok::EqEq: return BinOp::Eq;
      case Tok::Ne: return BinOp::Ne;
      default: return std::nullopt;
    }
  }

  bool fail(int line, const std::string& msg) {
    diag_.line = line;
    diag_.message = msg;
    return false;
  }

  std::vector<Token> toks_;
  std::span<const BuiltinInfo> builtins_;
  Diag& diag_;
  std::size_t idx_ = 0;
};

}  // namespace

ExprPtr make_expr(ExprKind kind) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  return e;
}

bool parse_program(std::string_view src, std::span<const BuiltinInfo> builtins, Program& out,
                   Diag& diag) {
  Lexer lexer(src, diag);
  std::vector<Token> toks;
  if (!lexer.tokenize(toks)) return false;
  Parser parser(std::move(toks), builtins, diag);
  return parser.parse(out);
}

}  // namespace wbfuzz::minilang
