#include "harqfbl/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "harqfbl/errors.hpp"
#include "harqfbl/special_functions.hpp"

namespace harqfbl {

namespace {

// QUADPACK qk21 abscissae and weights.
constexpr std::array<double, 11> kNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208018136548, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// Gauss weights for the odd-indexed Kronrod nodes.
constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double lo;
  double hi;
  double value;
  double error;

  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gauss_kronrod_21(const std::function<double(double)>& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double f_center = f(center);

  double kronrod = kKronrodWeights[10] * f_center;
  double gauss = 0.0;
  double abs_sum = std::abs(kronrod);
  std::array<double, 10> f_lo{};
  std::array<double, 10> f_hi{};
  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * kNodes[j];
    f_lo[j] = f(center - dx);
    f_hi[j] = f(center + dx);
    const double pair = f_lo[j] + f_hi[j];
    kronrod += kKronrodWeights[j] * pair;
    abs_sum += kKronrodWeights[j] * (std::abs(f_lo[j]) + std::abs(f_hi[j]));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }

  const double mean = 0.5 * kronrod;
  double asc = kKronrodWeights[10] * std::abs(f_center - mean);
  for (std::size_t j = 0; j < 10; ++j) {
    asc += kKronrodWeights[j] * (std::abs(f_lo[j] - mean) + std::abs(f_hi[j] - mean));
  }

  const double width = std::abs(half);
  double error = std::abs((kronrod - gauss) * half);
  asc *= width;
  abs_sum *= width;
  if (asc != 0.0 && error != 0.0) error = asc * std::min(1.0, std::pow(200.0 * error / asc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (abs_sum > std::numeric_limits<double>::min() / (50.0 * eps)) {
    error = std::max(50.0 * eps * abs_sum, error);
  }
  return {lo, hi, kronrod * half, error};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    std::span<const double> edges,
                                    const QuadratureOptions& options) {
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end())) {
    throw InvalidArgument("integrate_adaptive: edges must hold >= 2 sorted points");
  }

  std::priority_queue<Segment> heap;
  std::vector<Segment> frozen;
  QuadratureResult result;

  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (edges[i + 1] > edges[i]) {
      heap.push(gauss_kronrod_21(f, edges[i], edges[i + 1]));
      result.evaluations += 21;
    }
  }

  auto totals = [&] {
    CompensatedSum value;
    CompensatedSum error;
    auto copy = heap;
    while (!copy.empty()) {
      value.add(copy.top().value);
      error.add(copy.top().error);
      copy.pop();
    }
    for (const auto& s : frozen) {
      value.add(s.value);
      error.add(s.error);
    }
    return std::pair{value.value(), error.value()};
  };

  auto [value, error] = totals();

  int subdivisions = 0;
  while (!heap.empty()) {
    const double target = std::max(options.absolute_tolerance, options.relative_tolerance * std::abs(value));
    if (error <= target) {
      // Running totals drift; confirm with a fresh compensated sum before stopping.
      auto [v, e] = totals();
      value = v;
      error = e;
      if (error <= std::max(options.absolute_tolerance, options.relative_tolerance * std::abs(value))) {
        result.converged = true;
        break;
      }
    }
    if (subdivisions >= options.max_subdivisions) break;

    const Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    const double scale = std::max(1.0, std::abs(mid));
    if (worst.hi - worst.lo < 1e3 * std::numeric_limits<double>::epsilon() * scale) {
      frozen.push_back(worst);
      continue;
    }
    const Segment left = gauss_kronrod_21(f, worst.lo, mid);
    const Segment right = gauss_kronrod_21(f, mid, worst.hi);
    result.evaluations += 42;
    ++subdivisions;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  auto [v, e] = totals();
  result.value = v;
  result.error = e;
  result.intervals = static_cast<int>(heap.size() + frozen.size());
  if (!result.converged) {
    result.converged = e <= std::max(options.absolute_tolerance, options.relative_tolerance * std::abs(v));
  }
  return result;
}

}  // namespace harqfbl
