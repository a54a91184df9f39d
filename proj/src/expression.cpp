#include "dp/expression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "dp/error.hpp"

namespace dp {

struct Expression::Node {
  enum class Kind { number, string, ident, unary, binary, call } kind;
  double number = 0;
  std::string text;  // string literal, identifier, operator or function name
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

struct Token {
  enum class Type { number, string, ident, op, end } type;
  std::string text;
  double number = 0;
  std::size_t pos = 0;
};

std::vector<Token> tokenize(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::ParseError, "expression '" + s + "' at " + std::to_string(i) + ": " + why);
  };
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (std::isspace(c)) {
      ++i;
    } else if (std::isdigit(c) || (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      char* end = nullptr;
      double v = std::strtod(s.c_str() + i, &end);
      std::size_t start = i;
      i = static_cast<std::size_t>(end - s.c_str());
      out.push_back({Token::Type::number, s.substr(start, i - start), v, start});
    } else if (std::isalpha(c) || c == '_') {
      std::size_t start = i;
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_' || s[i] == '.')) ++i;
      out.push_back({Token::Type::ident, s.substr(start, i - start), 0, start});
    } else if (c == '"') {
      std::size_t start = ++i;
      while (i < s.size() && s[i] != '"') ++i;
      if (i == s.size()) fail("unterminated string");
      out.push_back({Token::Type::string, s.substr(start, i - start), 0, start});
      ++i;
    } else {
      static const char* two[] = {"<=", ">=", "==", "!="};
      bool matched = false;
      for (const char* op : two) {
        if (s.compare(i, 2, op) == 0) {
          out.push_back({Token::Type::op, op, 0, i});
          i += 2;
          matched = true;
          break;
        }
      }
      if (matched) continue;
      if (std::string("+-*/()<>,").find(static_cast<char>(c)) == std::string::npos) fail("unexpected character");
      out.push_back({Token::Type::op, std::string(1, static_cast<char>(c)), 0, i});
      ++i;
    }
  }
  out.push_back({Token::Type::end, "", 0, s.size()});
  return out;
}

class Parser {
 public:
  Parser(const std::string& source) : source_(source), tokens_(tokenize(source)) {}

  NodePtr parse() {
    NodePtr n = parse_or();
    if (peek().type != Token::Type::end) fail("trailing input");
    return n;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  bool is_op(const char* op) const { return peek().type == Token::Type::op && peek().text == op; }
  bool is_word(const char* w) const { return peek().type == Token::Type::ident && peek().text == w; }
  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::ParseError,
                "expression '" + source_ + "' at " + std::to_string(peek().pos) + ": " + why);
  }
  void expect(const char* op) {
    if (!is_op(op)) fail(std::string("expected '") + op + "'");
    ++pos_;
  }

  static NodePtr make(Node::Kind kind, std::string text, std::vector<NodePtr> args = {}, double number = 0) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->text = std::move(text);
    n->args = std::move(args);
    n->number = number;
    return n;
  }

  NodePtr parse_or() {
    NodePtr lhs = parse_and();
    while (is_word("or")) {
      ++pos_;
      lhs = make(Node::Kind::binary, "or", {lhs, parse_and()});
    }
    return lhs;
  }
  NodePtr parse_and() {
    NodePtr lhs = parse_not();
    while (is_word("and")) {
      ++pos_;
      lhs = make(Node::Kind::binary, "and", {lhs, parse_not()});
    }
    return lhs;
  }
  NodePtr parse_not() {
    if (is_word("not")) {
      ++pos_;
      return make(Node::Kind::unary, "not", {parse_not()});
    }
    return parse_compare();
  }
  NodePtr parse_compare() {
    NodePtr lhs = parse_sum();
    for (const char* op : {"<=", ">=", "==", "!=", "<", ">"}) {
      if (is_op(op)) {
        ++pos_;
        NodePtr rhs = parse_sum();
        bool lhs_str = lhs->kind == Node::Kind::string, rhs_str = rhs->kind == Node::Kind::string;
        if (lhs_str || rhs_str) {
          std::string o(op);
          if (o != "==" && o != "!=") fail("strings only compare with == or !=");
          if ((lhs_str ? rhs : lhs)->kind != Node::Kind::ident) fail("a string must face an identifier");
        }
        return make(Node::Kind::binary, op, {lhs, rhs});
      }
    }
    return lhs;
  }
  NodePtr parse_sum() {
    NodePtr lhs = parse_product();
    while (is_op("+") || is_op("-")) {
      std::string op = peek().text;
      ++pos_;
      lhs = make(Node::Kind::binary, op, {lhs, parse_product()});
    }
    return lhs;
  }
  NodePtr parse_product() {
    NodePtr lhs = parse_unary();
    while (is_op("*") || is_op("/")) {
      std::string op = peek().text;
      ++pos_;
      lhs = make(Node::Kind::binary, op, {lhs, parse_unary()});
    }
    return lhs;
  }
  NodePtr parse_unary() {
    if (is_op("-")) {
      ++pos_;
      return make(Node::Kind::unary, "-", {parse_unary()});
    }
    return parse_primary();
  }
  NodePtr parse_primary() {
    const Token t = peek();
    switch (t.type) {
      case Token::Type::number:
        ++pos_;
        return make(Node::Kind::number, t.text, {}, t.number);
      case Token::Type::string:
        ++pos_;
        return make(Node::Kind::string, t.text);
      case Token::Type::ident: {
        ++pos_;
        if (!is_op("(")) return make(Node::Kind::ident, t.text);
        ++pos_;
        std::vector<NodePtr> args;
        if (!is_op(")")) {
          args.push_back(parse_or());
          while (is_op(",")) {
            ++pos_;
            args.push_back(parse_or());
          }
        }
        expect(")");
        check_call(t.text, args);
        return make(Node::Kind::call, t.text, std::move(args));
      }
      case Token::Type::op:
        if (t.text == "(") {
          ++pos_;
          NodePtr inner = parse_or();
          expect(")");
          return inner;
        }
        break;
      case Token::Type::end:
        break;
    }
    fail("unexpected token '" + t.text + "'");
  }

  void check_call(const std::string& name, const std::vector<NodePtr>& args) const {
    if (name == "lookup") {
      if (args.size() < 3 || args[0]->kind != Node::Kind::ident) fail("lookup(var, \"label\", value, ...)");
      for (std::size_t i = 1; i + 1 < args.size(); i += 2)
        if (args[i]->kind != Node::Kind::string) fail("lookup labels must be strings");
      return;
    }
    for (const auto& a : args)
      if (a->kind == Node::Kind::string) fail("string argument outside lookup");
    if (name == "if") {
      if (args.size() != 3) fail("if(cond, then, else)");
    } else if (name == "abs") {
      if (args.size() != 1) fail("abs(x)");
    } else if (name == "min" || name == "max" || name == "sum") {
      if (args.empty()) fail(name + " needs arguments");
    } else {
      fail("unknown function '" + name + "'");
    }
  }

  const std::string& source_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

void collect(const Node& n, std::set<std::string>& out) {
  if (n.kind == Node::Kind::ident) out.insert(n.text);
  for (const auto& a : n.args) collect(*a, out);
}

[[noreturn]] void eval_fail(const std::string& why) { throw Error(ErrorCode::EvaluationFailure, why); }

double ident_value(const Node& n, const ExpressionContext& ctx) {
  std::optional<double> v = ctx.value ? ctx.value(n.text) : std::nullopt;
  if (!v) eval_fail("unknown identifier '" + n.text + "'");
  return *v;
}

double eval(const Node& n, const ExpressionContext& ctx) {
  switch (n.kind) {
    case Node::Kind::number:
      return n.number;
    case Node::Kind::string:
      eval_fail("string literal '" + n.text + "' used as a number");
    case Node::Kind::ident:
      return ident_value(n, ctx);
    case Node::Kind::unary: {
      double v = eval(*n.args[0], ctx);
      return n.text == "-" ? -v : (v == 0.0 ? 1.0 : 0.0);
    }
    case Node::Kind::binary: {
      const Node& l = *n.args[0];
      const Node& r = *n.args[1];
      if (l.kind == Node::Kind::string || r.kind == Node::Kind::string) {
        const Node& id = l.kind == Node::Kind::ident ? l : r;
        const Node& str = l.kind == Node::Kind::string ? l : r;
        std::optional<double> code = ctx.label_code ? ctx.label_code(id.text, str.text) : std::nullopt;
        if (!code) eval_fail("'" + str.text + "' is not a label of '" + id.text + "'");
        bool eq = ident_value(id, ctx) == *code;
        return (n.text == "==") == eq ? 1.0 : 0.0;
      }
      if (n.text == "and") return (eval(l, ctx) != 0.0 && eval(r, ctx) != 0.0) ? 1.0 : 0.0;
      if (n.text == "or") return (eval(l, ctx) != 0.0 || eval(r, ctx) != 0.0) ? 1.0 : 0.0;
      double a = eval(l, ctx), b = eval(r, ctx);
      if (n.text == "+") return a + b;
      if (n.text == "-") return a - b;
      if (n.text == "*") return a * b;
      if (n.text == "/") {
        if (b == 0.0) eval_fail("division by zero");
        return a / b;
      }
      if (n.text == "<") return a < b;
      if (n.text == "<=") return a <= b;
      if (n.text == ">") return a > b;
      if (n.text == ">=") return a >= b;
      if (n.text == "==") return a == b;
      if (n.text == "!=") return a != b;
      eval_fail("bad operator " + n.text);
    }
    case Node::Kind::call: {
      if (n.text == "lookup") {
        double key = ident_value(*n.args[0], ctx);
        std::size_t i = 1;
        for (; i + 1 < n.args.size(); i += 2) {
          const std::string& label = n.args[i]->text;
          std::optional<double> code = ctx.label_code ? ctx.label_code(n.args[0]->text, label) : std::nullopt;
          if (!code) eval_fail("'" + label + "' is not a label of '" + n.args[0]->text + "'");
          if (*code != key) continue;
          const Node& v = *n.args[i + 1];
          if (v.kind != Node::Kind::string) return eval(v, ctx);
          std::optional<double> out = ctx.result_code ? ctx.result_code(v.text) : std::nullopt;
          if (!out) eval_fail("'" + v.text + "' is not in the codomain");
          return *out;
        }
        if (i < n.args.size()) return eval(*n.args[i], ctx);
        eval_fail("lookup on '" + n.args[0]->text + "' has no entry for the current value");
      }
      if (n.text == "if") return eval(*n.args[0], ctx) != 0.0 ? eval(*n.args[1], ctx) : eval(*n.args[2], ctx);
      if (n.text == "abs") return std::fabs(eval(*n.args[0], ctx));
      double acc = eval(*n.args[0], ctx);
      for (std::size_t i = 1; i < n.args.size(); ++i) {
        double v = eval(*n.args[i], ctx);
        if (n.text == "min") acc = std::min(acc, v);
        else if (n.text == "max") acc = std::max(acc, v);
        else acc += v;
      }
      return acc;
    }
  }
  eval_fail("malformed expression");
}

}  // namespace

Expression::Expression(std::string source) : source_(std::move(source)) {
  root_ = Parser(source_).parse();
}

std::set<std::string> Expression::identifiers() const {
  std::set<std::string> out;
  if (root_) collect(*root_, out);
  return out;
}

double Expression::evaluate(const ExpressionContext& ctx) const {
  if (!root_) eval_fail("empty expression");
  return eval(*root_, ctx);
}

}  // namespace dp
