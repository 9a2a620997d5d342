#include "ellinc/scalar_graph.hpp"

#include <cmath>
#include <sstream>

#include "ellinc/errors.hpp"

namespace ellinc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kScalarTol = 1e-14;

// Root of t + mu t^{p-1} = r on [0, r], r >= 0. Newton with a bisection
// fallback whenever the step leaves the bracket.
double power_root(double p, double mu, double r) {
  if (r == 0.0) return 0.0;
  auto g = [&](double t) { return t + mu * std::pow(t, p - 1.0) - r; };
  double lo = 0.0, hi = r;
  double t = r / (1.0 + mu);
  for (int it = 0; it < 400; ++it) {
    const double gt = g(t);
    if (gt == 0.0) return t;
    if (gt < 0.0) lo = t; else hi = t;
    if (hi - lo <= kScalarTol * std::max(1.0, hi)) break;
    const double dg = 1.0 + mu * (p - 1.0) * std::pow(t, p - 2.0);
    double next = t - gt / dg;
    if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= kScalarTol * std::max(1.0, t)) {
      t = next;
      break;
    }
    t = next;
  }
  return t;
}

}  // namespace

void validate(const ScalarGraph& g) {
  std::visit(overloaded{
                 [](const LinearGraph& l) {
                   if (!(l.slope >= 0.0) || !std::isfinite(l.slope))
                     throw ConstructionError("linear graph slope must be finite and >= 0");
                 },
                 [](const SignGraph&) {},
                 [](const PowerGraph& pg) {
                   if (!(pg.p > 1.0) || !std::isfinite(pg.p))
                     throw ConstructionError("power graph exponent must satisfy p > 1");
                 },
                 [](const ClampGraph& c) {
                   if (!std::isfinite(c.lo) || !std::isfinite(c.hi) || c.lo > c.hi)
                     throw ConstructionError("clamp graph needs finite lo <= hi");
                 },
                 [](const RelayGraph& r) {
                   if (!(r.height >= 0.0) || !std::isfinite(r.height))
                     throw ConstructionError("relay height must be finite and >= 0");
                 },
             },
             g);
}

double scalar_resolvent(const ScalarGraph& g, double mu, double z) {
  return std::visit(
      overloaded{
          [&](const LinearGraph& l) { return z / (1.0 + mu * l.slope); },
          [&](const SignGraph&) {
            if (z > mu) return z - mu;
            if (z < -mu) return z + mu;
            return 0.0;
          },
          [&](const PowerGraph& pg) { return std::copysign(power_root(pg.p, mu, std::abs(z)), z); },
          [&](const ClampGraph& c) {
            if (z <= c.lo * (1.0 + mu)) return z - mu * c.lo;
            if (z >= c.hi * (1.0 + mu)) return z - mu * c.hi;
            return z / (1.0 + mu);
          },
          [&](const RelayGraph& r) {
            if (z < 0.0) return z;
            if (z > mu * r.height) return z - mu * r.height;
            return 0.0;
          },
      },
      g);
}

std::string describe(const ScalarGraph& g) {
  std::ostringstream out;
  std::visit(overloaded{
                 [&](const LinearGraph& l) { out << "linear(" << l.slope << ")"; },
                 [&](const SignGraph&) { out << "sign"; },
                 [&](const PowerGraph& pg) { out << "power(" << pg.p << ")"; },
                 [&](const ClampGraph& c) { out << "clamp(" << c.lo << ", " << c.hi << ")"; },
                 [&](const RelayGraph& r) { out << "relay(" << r.height << ")"; },
             },
             g);
  return out.str();
}

}  // namespace ellinc
