#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace dp {

/// Lookup callbacks an expression is evaluated against.
struct ExpressionContext {
  /// Numeric value of a named variable (enumerated labels evaluate to their code).
  std::function<std::optional<double>(std::string_view name)> value;
  /// Code of `label` inside the domain of variable `name`.
  std::function<std::optional<double>(std::string_view name, std::string_view label)> label_code;
  /// Code of `label` in the codomain of the attribute being evaluated.
  std::function<std::optional<double>(std::string_view label)> result_code;
};

/// Small arithmetic/logical expression language used for attribute evaluators,
/// decomposition sub-evaluators and assignment rules.
///
///   expr    := or
///   or      := and ("or" and)*
///   and     := not ("and" not)*
///   not     := "not" not | compare
///   compare := sum (("<" | "<=" | ">" | ">=" | "==" | "!=") sum)?
///   sum     := product (("+" | "-") product)*
///   product := unary (("*" | "/") unary)*
///   unary   := "-" unary | primary
///   primary := number | string | ident | ident "(" args ")" | "(" expr ")"
///
/// Functions: min, max, sum, abs, if(c, a, b), lookup(var, "label", value, ...
/// [, default]). Strings may appear only as lookup labels/values or as the
/// operand of == / != facing an identifier; they resolve to domain codes.
/// Booleans are 1 and 0.
class Expression {
 public:
  struct Node;

  Expression() = default;
  /// Throws ParseError.
  explicit Expression(std::string source);

  const std::string& source() const noexcept { return source_; }
  bool empty() const noexcept { return root_ == nullptr; }
  /// Identifiers referenced as variables (function names excluded).
  std::set<std::string> identifiers() const;
  /// Throws EvaluationFailure on unknown names or arithmetic faults.
  double evaluate(const ExpressionContext& ctx) const;

  bool operator==(const Expression& other) const { return source_ == other.source_; }

 private:
  std::string source_;
  std::shared_ptr<const Node> root_;
};

}  // namespace dp
