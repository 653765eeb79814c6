#pragma once

// Closed-form field components: a small expression language compiled to a
// postfix program that evaluates over any differentiable scalar type.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?
//   primary := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//
// Functions: sin cos tan exp log sqrt (one argument), pow (two arguments).
// Names resolve to coordinates first, then to the constant table, then to
// the built-in constant `pi`.

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emt/dual.hpp"
#include "emt/errors.hpp"

namespace emt {

using ConstantTable = std::map<std::string, double, std::less<>>;

namespace detail {

enum class OpCode : unsigned char {
  push_const,
  push_var,
  add,
  sub,
  mul,
  div,
  neg,
  pow,
  pow_const,
  sin,
  cos,
  tan,
  exp,
  log,
  sqrt,
};

struct Instr {
  OpCode op;
  int var = 0;
  double value = 0.0;
};

struct Program {
  std::string source;
  std::vector<Instr> code;
  std::size_t max_depth = 1;
  bool uses_coordinates = false;
};

[[noreturn]] void rethrow_with_source(const DomainError& e, const std::string& source);

}  // namespace detail

/// A closed-form scalar map on a chart, evaluable over double or any nesting
/// of Dual, so its partials up to second order are exact.
class SmoothMap {
 public:
  /// The zero map.
  SmoothMap();

  static SmoothMap constant(double value);

  /// Parse `source`; names not in `coordinates` or `constants` are errors.
  static SmoothMap parse(std::string_view source, std::span<const std::string> coordinates,
                         const ConstantTable& constants = {});

  template <class S>
  S operator()(std::span<const S> x) const {
    const auto& code = program_->code;
    std::vector<S> st;
    st.reserve(program_->max_depth);
    try {
      for (const auto& in : code) {
        switch (in.op) {
          case detail::OpCode::push_const:
            st.emplace_back(in.value);
            break;
          case detail::OpCode::push_var:
            st.push_back(x[static_cast<std::size_t>(in.var)]);
            break;
          case detail::OpCode::neg:
            st.back() = -st.back();
            break;
          case detail::OpCode::sin:
            st.back() = sin(st.back());
            break;
          case detail::OpCode::cos:
            st.back() = cos(st.back());
            break;
          case detail::OpCode::tan:
            st.back() = tan(st.back());
            break;
          case detail::OpCode::exp:
            st.back() = exp(st.back());
            break;
          case detail::OpCode::log:
            st.back() = log(st.back());
            break;
          case detail::OpCode::sqrt:
            st.back() = sqrt(st.back());
            break;
          case detail::OpCode::pow_const:
            st.back() = pow(st.back(), in.value);
            break;
          default: {
            S b = st.back();
            st.pop_back();
            S& a = st.back();
            switch (in.op) {
              case detail::OpCode::add:
                a = a + b;
                break;
              case detail::OpCode::sub:
                a = a - b;
                break;
              case detail::OpCode::mul:
                a = a * b;
                break;
              case detail::OpCode::div:
                if (value_of(b) == 0.0) throw DomainError("division by zero");
                a = a / b;
                break;
              case detail::OpCode::pow:
                a = pow(a, b);
                break;
              default:
                break;
            }
          }
        }
      }
    } catch (const DomainError& e) {
      detail::rethrow_with_source(e, program_->source);
    }
    return st.back();
  }

  const std::string& source() const { return program_->source; }

  /// True when the map references no coordinate (all partials vanish).
  bool is_constant() const { return !program_->uses_coordinates; }

  /// The value when the program folded to a single literal.
  std::optional<double> constant_value() const {
    if (program_->code.size() == 1 && program_->code[0].op == detail::OpCode::push_const)
      return program_->code[0].value;
    return std::nullopt;
  }

 private:
  explicit SmoothMap(std::shared_ptr<const detail::Program> program)
      : program_(std::move(program)) {}

  std::shared_ptr<const detail::Program> program_;
};

/// Parse each source with the same coordinate and constant tables.
std::vector<SmoothMap> parse_all(const std::vector<std::string>& sources,
                                 std::span<const std::string> coordinates,
                                 const ConstantTable& constants = {});

}  // namespace emt
