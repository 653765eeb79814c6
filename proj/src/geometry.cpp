#include "emt/geometry.hpp"

#include <cmath>
#include <sstream>
#include <type_traits>

namespace emt {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double unit_double(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

constexpr std::uint64_t kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

std::string format_bound(const std::optional<double>& b, double inf) {
  if (!b) return std::to_string(inf);
  std::ostringstream os;
  os << *b;
  return os.str();
}

}  // namespace

Chart::Chart(std::vector<std::string> coordinates, std::vector<Interval> domain,
             std::vector<Interval> sample_ranges)
    : coordinates_(std::move(coordinates)),
      domain_(std::move(domain)),
      sample_ranges_(std::move(sample_ranges)) {
  const std::size_t n = coordinates_.size();
  if (n < 2) throw ConfigError("chart dimension must be at least 2");
  if (n > std::size(kPrimes)) throw ConfigError("chart dimension too large");
  if (domain_.empty()) domain_.resize(n);
  if (sample_ranges_.empty()) sample_ranges_.assign(n, Interval{-1.0, 1.0});
  if (domain_.size() != n || sample_ranges_.size() != n) {
    throw ConfigError("chart domain/sample ranges do not match the coordinate count");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = sample_ranges_[i];
    if (!s.lower || !s.upper || !(*s.lower <= *s.upper)) {
      throw ConfigError("sample range for '" + coordinates_[i] + "' must be a finite interval");
    }
    if (!domain_[i].contains(*s.lower) || !domain_[i].contains(*s.upper)) {
      throw ConfigError("sample range for '" + coordinates_[i] + "' leaves the chart domain");
    }
  }
}

bool Chart::contains(std::span<const double> x) const {
  if (x.size() != coordinates_.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!domain_[i].contains(x[i])) return false;
  return true;
}

void Chart::require_inside(std::span<const double> x) const {
  if (x.size() != coordinates_.size()) {
    throw DomainError("point has " + std::to_string(x.size()) + " coordinates, chart has " +
                      std::to_string(coordinates_.size()));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!domain_[i].contains(x[i])) {
      std::ostringstream os;
      os << "coordinate '" << coordinates_[i] << "' = " << x[i] << " outside chart domain ("
         << format_bound(domain_[i].lower, -INFINITY) << ", "
         << format_bound(domain_[i].upper, INFINITY) << ")";
      throw DomainError(os.str());
    }
  }
}

std::vector<Point> Chart::sample_points(int count, std::uint64_t seed) const {
  if (count < 1) throw ConfigError("sample count must be at least 1");
  const std::size_t n = coordinates_.size();
  std::uint64_t state = seed;
  std::vector<double> shift(n);
  for (auto& s : shift) s = unit_double(splitmix64(state));
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int i = 1; i <= count; ++i) {
    Point p(n);
    for (std::size_t k = 0; k < n; ++k) {
      double u = radical_inverse(static_cast<std::uint64_t>(i), kPrimes[k]) + shift[k];
      u -= std::floor(u);
      const double lo = *sample_ranges_[k].lower;
      const double hi = *sample_ranges_[k].upper;
      p[k] = lo + (hi - lo) * u;
    }
    require_inside(p);
    pts.push_back(std::move(p));
  }
  return pts;
}

MetricField::MetricField(int dim, std::vector<SmoothMap> upper_triangle, std::vector<int> signature)
    : dim_(dim), upper_(std::move(upper_triangle)), signature_(std::move(signature)) {
  if (dim_ < 2) throw ConfigError("metric dimension must be at least 2");
  if (upper_.size() != static_cast<std::size_t>(dim_ * (dim_ + 1) / 2)) {
    throw ConfigError("metric needs n(n+1)/2 independent components");
  }
  if (signature_.size() != static_cast<std::size_t>(dim_)) {
    throw ConfigError("signature length does not match the metric dimension");
  }
  for (int s : signature_)
    if (s != 1 && s != -1) throw ConfigError("signature entries must be +1 or -1");
}

MetricField MetricField::diagonal(std::vector<SmoothMap> diag, std::vector<int> signature) {
  const int n = static_cast<int>(diag.size());
  std::vector<SmoothMap> upper;
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) upper.push_back(a == b ? diag[static_cast<std::size_t>(a)] : SmoothMap());
  return MetricField(n, std::move(upper), std::move(signature));
}

std::string MetricField::signature_string() const {
  std::string s;
  for (int v : signature_) s += v < 0 ? '-' : '+';
  return s;
}

std::string_view to_string(VectorKind kind) {
  switch (kind) {
    case VectorKind::arbitrary: return "arbitrary";
    case VectorKind::killing_candidate: return "killing-candidate";
    case VectorKind::constant: return "constant";
  }
  return "arbitrary";
}

VectorKind vector_kind_from_string(std::string_view s) {
  if (s == "arbitrary") return VectorKind::arbitrary;
  if (s == "killing-candidate" || s == "killing") return VectorKind::killing_candidate;
  if (s == "constant") return VectorKind::constant;
  throw ConfigError("unknown vector kind '" + std::string(s) + "'");
}

Tensor<double> christoffel(const MetricField& metric, std::span<const double> x) {
  return metric_local<double>(metric, x).gamma;
}

RiemannValue riemann(const MetricField& metric, std::span<const double> x) {
  const int n = metric.dim();
  auto jet = exact_jet<double>([&](auto xs) {
    using S = std::remove_cvref_t<decltype(xs[0])>;
    return metric_local<S>(metric, xs).gamma;
  }, x);
  const auto& G = jet.value;
  const auto& dG = jet.partial;  // dG(a,b,c,d) = d_d Gamma^a_bc
  RiemannValue r{Tensor<double>(n, Valence{1, 3})};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double s = dG(a, d, b, c) - dG(a, c, b, d);
          for (int e = 0; e < n; ++e) s += G(a, c, e) * G(e, d, b) - G(a, d, e) * G(e, c, b);
          r.components(a, b, c, d) = s;
        }
  return r;
}

Tensor<double> ricci(const RiemannValue& r) {
  const int n = r.components.dim();
  Tensor<double> ric(n, Valence{0, 2});
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d) {
      double s = 0.0;
      for (int a = 0; a < n; ++a) s += r(a, b, a, d);
      ric(b, d) = s;
    }
  return ric;
}

double ricci_scalar(const RiemannValue& r, const Tensor<double>& ginv) {
  auto ric = ricci(r);
  double s = 0.0;
  for (int b = 0; b < ric.dim(); ++b)
    for (int d = 0; d < ric.dim(); ++d) s += ginv(b, d) * ric(b, d);
  return s;
}

TensorValue covariant_derivative(const TensorFieldSpec& field, const MetricField& metric,
                                 std::span<const double> x, const DerivativeMode& mode) {
  auto jet = outer_jet([&](auto xs) { return field.at(xs); }, x, mode);
  auto ml = metric_local<double>(metric, x);
  return covariant_from(jet.value, jet.partial, ml.gamma);
}

Residual commutator_check(const MetricField& metric, const std::vector<SmoothMap>& one_form,
                          std::span<const double> x, const DerivativeMode& mode) {
  const int n = metric.dim();
  if (static_cast<int>(one_form.size()) != n) throw ConfigError("one-form dimension mismatch");
  auto raised = [&](auto ys) {
    using T = std::remove_cvref_t<decltype(ys[0])>;
    auto ginv = inverse(metric.at(ys));
    Tensor<T> v(n, Valence{1, 0});
    for (int b = 0; b < n; ++b) {
      T s(0.0);
      for (int d = 0; d < n; ++d) s += ginv(b, d) * one_form[static_cast<std::size_t>(d)](ys);
      v(b) = s;
    }
    return v;
  };
  // W^b_c = nabla_c A^b as a field.
  auto grad = [&](auto xs) {
    using S = std::remove_cvref_t<decltype(xs[0])>;
    auto ml = metric_local<S>(metric, xs);
    auto jet = exact_jet<S>(raised, xs);
    return covariant_from(jet.value, jet.partial, ml.gamma);
  };
  auto wj = outer_jet(grad, x, mode);
  auto ml = metric_local<double>(metric, x);
  auto dw = covariant_from(wj.value, wj.partial, ml.gamma);  // (b, c, a) = nabla_a nabla_c A^b
  auto R = riemann(metric, x);
  auto A = raised(x);
  Residual out;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        double rhs = 0.0;
        for (int d = 0; d < n; ++d) rhs += R(b, d, a, c) * A(d);
        out.value = std::max(out.value, std::abs(dw(b, c, a) - dw(b, a, c) - rhs));
        out.scale = std::max({out.scale, std::abs(dw(b, c, a)), std::abs(dw(b, a, c)), std::abs(rhs)});
      }
  return out;
}

TensorValue lie_derivative_02(const TensorFieldSpec& field, const VectorFieldSpec& xi,
                              const MetricField& metric, std::span<const double> x, LieForm form,
                              const DerivativeMode& mode) {
  if (field.valence != Valence{0, 2}) throw ConfigError("lie_derivative_02 needs a (0,2) field");
  auto fj = outer_jet([&](auto xs) { return field.at(xs); }, x, mode);
  auto vj = outer_jet([&](auto xs) { return xi.at(xs); }, x, mode);
  if (form == LieForm::partial) return lie_02_partial(fj, vj);
  auto ml = metric_local<double>(metric, x);
  return lie_02_covariant(fj, vj, ml.gamma);
}

TensorValue killing_residual(const MetricField& metric, const VectorFieldSpec& xi,
                             std::span<const double> x, const DerivativeMode& mode) {
  const int n = metric.dim();
  auto lowered = [&](auto xs) {
    using S = std::remove_cvref_t<decltype(xs[0])>;
    auto g = metric.at(xs);
    auto v = xi.at(xs);
    Tensor<S> low(n, Valence{0, 1});
    for (int b = 0; b < n; ++b) {
      S s(0.0);
      for (int c = 0; c < n; ++c) s += g(b, c) * v(c);
      low(b) = s;
    }
    return low;
  };
  auto jet = outer_jet(lowered, x, mode);
  auto ml = metric_local<double>(metric, x);
  auto d = covariant_from(jet.value, jet.partial, ml.gamma);  // d(b, a) = nabla_a xi_b
  TensorValue out(n, Valence{0, 2});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) out(a, b) = d(b, a) + d(a, b);
  return out;
}

TensorValue vector_gradient(const MetricField& metric, const VectorFieldSpec& xi,
                            std::span<const double> x) {
  auto jet = exact_jet<double>([&](auto xs) { return xi.at(xs); }, x);
  auto ml = metric_local<double>(metric, x);
  return covariant_from(jet.value, jet.partial, ml.gamma);
}

}  // namespace emt
