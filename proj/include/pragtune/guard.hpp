#pragma once

#include <functional>
#include <memory>
#include <string>

#include "pragtune/value.hpp"

namespace pragtune {

class DesignSpace;

// Boolean guard over parameter values. Grammar:
//
//   expr  := and ("or" and)*
//   and   := unary ("and" unary)*
//   unary := "not" unary | "(" expr ")" | atom OP atom
//   OP    := == | != | < | <= | > | >=
//   atom  := integer | identifier
//
// An identifier names a parameter of the space when one matches; otherwise it
// must be a mode token drawn from the domain of the parameter on the other
// side of the comparison, or the guard is rejected with UnknownGuardSymbol.
// Relational operators require integer-valued operands.
class Guard {
 public:
  Guard() = default;

  // Parses the expression text. Identifier resolution happens in bind().
  static Guard parse(const std::string& text);

  // Resolves identifiers against the space's parameters and type-checks
  // comparisons. Throws UnknownGuardSymbol / GuardParseError.
  void bind(const DesignSpace& space);

  // Evaluates with short-circuit semantics. `lookup` must be total over the
  // space's parameter names (callers substitute defaults for unset params).
  bool eval(const std::function<Value(const std::string&)>& lookup) const;

  bool empty() const { return root_ == nullptr; }
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace pragtune
