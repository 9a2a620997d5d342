#pragma once

#include <string>
#include <variant>

namespace ellinc {

/// s -> m s, m >= 0.
struct LinearGraph {
  double slope = 0.0;
};
/// The sign graph; the whole interval [-1, 1] at s = 0.
struct SignGraph {};
/// s -> |s|^{p-2} s with p > 1.
struct PowerGraph {
  double p = 2.0;
};
/// Saturation s -> min(max(s, lo), hi), lo <= hi.
struct ClampGraph {
  double lo = -1.0;
  double hi = 1.0;
};
/// 0 for s < 0, h for s > 0, [0, h] at s = 0.
struct RelayGraph {
  double height = 1.0;
};

/// A maximal monotone graph on R.
using ScalarGraph = std::variant<LinearGraph, SignGraph, PowerGraph, ClampGraph, RelayGraph>;

/// Throws ConstructionError if the parameters do not give a maximal
/// monotone graph.
void validate(const ScalarGraph& g);

/// The unique s with s + mu * beta(s) containing z, for mu > 0.
double scalar_resolvent(const ScalarGraph& g, double mu, double z);

std::string describe(const ScalarGraph& g);

}  // namespace ellinc
