#include "pragtune/guard.hpp"

#include <cctype>
#include <memory>
#include <vector>

#include "pragtune/design_space.hpp"
#include "pragtune/errors.hpp"

namespace pragtune {

namespace {

enum class TokKind { Ident, Int, Op, LParen, RParen, End };

struct Tok {
  TokKind kind;
  std::string text;
  std::int64_t num = 0;
};

std::vector<Tok> lex(const std::string& s) {
  std::vector<Tok> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '(') {
      out.push_back({TokKind::LParen, "("});
      ++i;
    } else if (c == ')') {
      out.push_back({TokKind::RParen, ")"});
      ++i;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      Tok t{TokKind::Int, s.substr(i, j - i)};
      t.num = std::stoll(t.text);
      out.push_back(t);
      i = j;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({TokKind::Ident, s.substr(i, j - i)});
      i = j;
    } else if (c == '=' || c == '!' || c == '<' || c == '>') {
      std::string op(1, c);
      if (i + 1 < s.size() && s[i + 1] == '=') op += '=';
      if (op == "=" || op == "!")
        throw GuardParseError("guard: bad operator '" + op + "' in \"" + s + "\"");
      out.push_back({TokKind::Op, op});
      i += op.size();
    } else {
      throw GuardParseError(std::string("guard: unexpected character '") + c + "' in \"" + s +
                            "\"");
    }
  }
  out.push_back({TokKind::End, ""});
  return out;
}

}  // namespace

struct Guard::Node {
  enum class Kind { Or, And, Not, Cmp } kind;
  // Or/And/Not children.
  std::shared_ptr<const Node> lhs, rhs;
  // Cmp payload.
  std::string op;
  struct Atom {
    enum class Kind { Int, Ident, ParamRef, TokenLit } kind;
    std::int64_t num = 0;
    std::string name;  // identifier / param name / token text
  };
  Atom a, b;
};

namespace {

using Node = Guard::Node;
using Atom = Node::Atom;
using NodePtr = std::shared_ptr<const Node>;

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text), toks_(lex(text)) {}

  NodePtr parse() {
    NodePtr e = or_expr();
    expect(TokKind::End, "end of guard");
    return e;
  }

 private:
  const Tok& cur() const { return toks_[pos_]; }
  void advance() { ++pos_; }
  bool accept_ident(const std::string& word) {
    if (cur().kind == TokKind::Ident && cur().text == word) {
      advance();
      return true;
    }
    return false;
  }
  void expect(TokKind k, const std::string& what) {
    if (cur().kind != k)
      throw GuardParseError("guard: expected " + what + " near '" + cur().text + "' in \"" +
                            text_ + "\"");
    advance();
  }

  NodePtr or_expr() {
    NodePtr lhs = and_expr();
    while (accept_ident("or")) {
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Or;
      n->lhs = lhs;
      n->rhs = and_expr();
      lhs = n;
    }
    return lhs;
  }

  NodePtr and_expr() {
    NodePtr lhs = unary();
    while (accept_ident("and")) {
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::And;
      n->lhs = lhs;
      n->rhs = unary();
      lhs = n;
    }
    return lhs;
  }

  NodePtr unary() {
    if (accept_ident("not")) {
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Not;
      n->lhs = unary();
      return n;
    }
    if (cur().kind == TokKind::LParen) {
      advance();
      NodePtr e = or_expr();
      expect(TokKind::RParen, "')'");
      return e;
    }
    return comparison();
  }

  NodePtr comparison() {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Cmp;
    n->a = atom();
    if (cur().kind != TokKind::Op)
      throw GuardParseError("guard: expected comparison operator near '" + cur().text +
                            "' in \"" + text_ + "\"");
    n->op = cur().text;
    advance();
    n->b = atom();
    return n;
  }

  Atom atom() {
    Atom a;
    if (cur().kind == TokKind::Int) {
      a.kind = Atom::Kind::Int;
      a.num = cur().num;
    } else if (cur().kind == TokKind::Ident) {
      a.kind = Atom::Kind::Ident;
      a.name = cur().text;
    } else {
      throw GuardParseError("guard: expected value or parameter near '" + cur().text +
                            "' in \"" + text_ + "\"");
    }
    advance();
    return a;
  }

  const std::string& text_;
  std::vector<Tok> toks_;
  std::size_t pos_ = 0;
};

bool domain_has_token(const ParamDef& p, const std::string& tok) {
  for (const Value& v : p.domain)
    if (!v.is_int() && v.as_token() == tok) return true;
  return false;
}

// Resolves one comparison's identifiers: a param name becomes a reference;
// anything else must be a token from the opposite side's domain.
void bind_cmp(Node& n, const DesignSpace& space, const std::string& text) {
  auto resolve_refs = [&](Atom& a) {
    if (a.kind == Atom::Kind::Ident && space.has_param(a.name)) a.kind = Atom::Kind::ParamRef;
  };
  resolve_refs(n.a);
  resolve_refs(n.b);

  auto resolve_lit = [&](Atom& a, const Atom& other) {
    if (a.kind != Atom::Kind::Ident) return;
    if (other.kind == Atom::Kind::ParamRef &&
        domain_has_token(space.param(other.name), a.name)) {
      a.kind = Atom::Kind::TokenLit;
      return;
    }
    throw UnknownGuardSymbol("guard \"" + text + "\": unknown symbol '" + a.name + "'");
  };
  resolve_lit(n.a, n.b);
  resolve_lit(n.b, n.a);

  bool relational = n.op != "==" && n.op != "!=";
  if (relational) {
    auto int_typed = [&](const Atom& a) {
      if (a.kind == Atom::Kind::Int) return true;
      if (a.kind == Atom::Kind::ParamRef) return space.param(a.name).is_factor();
      return false;
    };
    if (!int_typed(n.a) || !int_typed(n.b))
      throw GuardParseError("guard \"" + text + "\": relational operator '" + n.op +
                            "' needs integer operands");
  }
}

void bind_node(const Node* n, const DesignSpace& space, const std::string& text) {
  if (!n) return;
  if (n->kind == Node::Kind::Cmp) {
    bind_cmp(const_cast<Node&>(*n), space, text);
    return;
  }
  bind_node(n->lhs.get(), space, text);
  bind_node(n->rhs.get(), space, text);
}

Value atom_value(const Atom& a, const std::function<Value(const std::string&)>& lookup) {
  switch (a.kind) {
    case Atom::Kind::Int: return Value(a.num);
    case Atom::Kind::ParamRef: return lookup(a.name);
    case Atom::Kind::TokenLit: return Value(a.name);
    case Atom::Kind::Ident: break;
  }
  throw Error("guard evaluated before bind()");
}

bool eval_node(const Node* n, const std::function<Value(const std::string&)>& lookup) {
  switch (n->kind) {
    case Node::Kind::Or: return eval_node(n->lhs.get(), lookup) || eval_node(n->rhs.get(), lookup);
    case Node::Kind::And:
      return eval_node(n->lhs.get(), lookup) && eval_node(n->rhs.get(), lookup);
    case Node::Kind::Not: return !eval_node(n->lhs.get(), lookup);
    case Node::Kind::Cmp: break;
  }
  Value a = atom_value(n->a, lookup);
  Value b = atom_value(n->b, lookup);
  if (n->op == "==") return a == b;
  if (n->op == "!=") return a != b;
  std::int64_t x = a.as_int();
  std::int64_t y = b.as_int();
  if (n->op == "<") return x < y;
  if (n->op == "<=") return x <= y;
  if (n->op == ">") return x > y;
  return x >= y;
}

}  // namespace

Guard Guard::parse(const std::string& text) {
  Guard g;
  g.text_ = text;
  g.root_ = Parser(text).parse();
  return g;
}

void Guard::bind(const DesignSpace& space) {
  bind_node(root_.get(), space, text_);
}

bool Guard::eval(const std::function<Value(const std::string&)>& lookup) const {
  if (!root_) return true;
  return eval_node(root_.get(), lookup);
}

}  // namespace pragtune
