#include "emt/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>

namespace emt {

namespace detail {

void rethrow_with_source(const DomainError& e, const std::string& source) {
  throw DomainError(std::string(e.what()) + " in '" + source + "'");
}

}  // namespace detail

namespace {

using detail::Instr;
using detail::OpCode;

struct Node {
  OpCode op = OpCode::push_const;
  double value = 0.0;
  int var = 0;
  std::vector<std::unique_ptr<Node>> args;
};

using NodePtr = std::unique_ptr<Node>;

NodePtr make_const(double v) {
  auto n = std::make_unique<Node>();
  n->op = OpCode::push_const;
  n->value = v;
  return n;
}

NodePtr make_op(OpCode op, NodePtr a, NodePtr b = nullptr) {
  auto n = std::make_unique<Node>();
  n->op = op;
  n->args.push_back(std::move(a));
  if (b) n->args.push_back(std::move(b));
  return n;
}

bool is_const(const Node& n) { return n.op == OpCode::push_const; }

class Parser {
 public:
  Parser(std::string_view src, std::span<const std::string> coords, const ConstantTable& constants)
      : src_(src), coords_(coords), constants_(constants) {}

  NodePtr parse() {
    auto root = expr();
    skip_ws();
    if (pos_ < src_.size()) fail(std::string("unexpected character '") + src_[pos_] + "'");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " in expression '" + std::string(src_) + "'", pos_);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    auto lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make_op(OpCode::add, std::move(lhs), term());
      } else if (accept('-')) {
        lhs = make_op(OpCode::sub, std::move(lhs), term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    auto lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_op(OpCode::mul, std::move(lhs), unary());
      } else if (accept('/')) {
        lhs = make_op(OpCode::div, std::move(lhs), unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make_op(OpCode::neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    auto base = primary();
    if (accept('^')) return make_op(OpCode::pow, std::move(base), unary());
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of expression");
    const char c = src_[pos_];
    if (accept('(')) {
      auto inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    const char* first = src_.data() + pos_;
    const char* last = src_.data() + src_.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc()) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return make_const(v);
  }

  NodePtr name() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string id(src_.substr(start, pos_ - start));
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == '(') {
      ++pos_;
      return call(id, start);
    }
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (coords_[i] == id) {
        auto n = std::make_unique<Node>();
        n->op = OpCode::push_var;
        n->var = static_cast<int>(i);
        return n;
      }
    }
    if (auto it = constants_.find(id); it != constants_.end()) return make_const(it->second);
    if (id == "pi") return make_const(std::numbers::pi);
    pos_ = start;
    fail("unknown identifier '" + id + "'");
  }

  NodePtr call(const std::string& fn, std::size_t start) {
    std::vector<NodePtr> args;
    if (!accept(')')) {
      args.push_back(expr());
      while (accept(',')) args.push_back(expr());
      expect(')');
    }
    static const std::pair<const char*, OpCode> unary_fns[] = {
        {"sin", OpCode::sin}, {"cos", OpCode::cos}, {"tan", OpCode::tan},
        {"exp", OpCode::exp}, {"log", OpCode::log}, {"sqrt", OpCode::sqrt},
    };
    for (const auto& [fname, op] : unary_fns) {
      if (fn == fname) {
        if (args.size() != 1) arity(fn, 1, start);
        return make_op(op, std::move(args[0]));
      }
    }
    if (fn == "pow") {
      if (args.size() != 2) arity(fn, 2, start);
      return make_op(OpCode::pow, std::move(args[0]), std::move(args[1]));
    }
    pos_ = start;
    fail("unknown function '" + fn + "'");
  }

  [[noreturn]] void arity(const std::string& fn, int expected, std::size_t start) {
    pos_ = start;
    fail("function '" + fn + "' takes " + std::to_string(expected) + " argument(s)");
  }

  std::string_view src_;
  std::span<const std::string> coords_;
  const ConstantTable& constants_;
  std::size_t pos_ = 0;
};

std::optional<double> fold_value(OpCode op, const std::vector<double>& a) {
  switch (op) {
    case OpCode::add: return a[0] + a[1];
    case OpCode::sub: return a[0] - a[1];
    case OpCode::mul: return a[0] * a[1];
    case OpCode::div:
      if (a[1] == 0.0) return std::nullopt;
      return a[0] / a[1];
    case OpCode::neg: return -a[0];
    case OpCode::pow: return std::pow(a[0], a[1]);
    case OpCode::sin: return std::sin(a[0]);
    case OpCode::cos: return std::cos(a[0]);
    case OpCode::tan: return std::tan(a[0]);
    case OpCode::exp: return std::exp(a[0]);
    case OpCode::log:
      if (!(a[0] > 0.0)) return std::nullopt;
      return std::log(a[0]);
    case OpCode::sqrt:
      if (a[0] < 0.0) return std::nullopt;
      return std::sqrt(a[0]);
    default: return std::nullopt;
  }
}

// Folds constant subtrees; invalid constant operations are left in place so
// they surface as domain errors at evaluation time.
void fold(Node& n) {
  for (auto& a : n.args) fold(*a);
  if (n.args.empty()) return;
  if (std::all_of(n.args.begin(), n.args.end(), [](const NodePtr& a) { return is_const(*a); })) {
    std::vector<double> vals;
    for (const auto& a : n.args) vals.push_back(a->value);
    if (auto v = fold_value(n.op, vals)) {
      n.op = OpCode::push_const;
      n.value = *v;
      n.args.clear();
      return;
    }
  }
  if (n.op == OpCode::pow && is_const(*n.args[1])) {
    n.op = OpCode::pow_const;
    n.value = n.args[1]->value;
    n.args.pop_back();
  }
}

void emit(const Node& n, detail::Program& prog, std::size_t depth) {
  prog.max_depth = std::max(prog.max_depth, depth + 1);
  for (std::size_t i = 0; i < n.args.size(); ++i) emit(*n.args[i], prog, depth + i);
  Instr in{n.op};
  in.value = n.value;
  in.var = n.var;
  if (n.op == OpCode::push_var) prog.uses_coordinates = true;
  prog.code.push_back(in);
}

}  // namespace

SmoothMap::SmoothMap() : SmoothMap(constant(0.0)) {}

SmoothMap SmoothMap::constant(double value) {
  auto prog = std::make_shared<detail::Program>();
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  prog->source.assign(buf, ec == std::errc() ? ptr : buf);
  prog->code.push_back(Instr{OpCode::push_const, 0, value});
  return SmoothMap(std::move(prog));
}

SmoothMap SmoothMap::parse(std::string_view source, std::span<const std::string> coordinates,
                           const ConstantTable& constants) {
  Parser parser(source, coordinates, constants);
  auto root = parser.parse();
  fold(*root);
  auto prog = std::make_shared<detail::Program>();
  prog->source = std::string(source);
  emit(*root, *prog, 0);
  return SmoothMap(std::move(prog));
}

std::vector<SmoothMap> parse_all(const std::vector<std::string>& sources,
                                 std::span<const std::string> coordinates,
                                 const ConstantTable& constants) {
  std::vector<SmoothMap> out;
  out.reserve(sources.size());
  for (const auto& s : sources) out.push_back(SmoothMap::parse(s, coordinates, constants));
  return out;
}

}  // namespace emt
