#include "harqfbl/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "harqfbl/errors.hpp"
#include "harqfbl/parallel.hpp"

namespace harqfbl {

namespace {

using Point = std::vector<std::int64_t>;

constexpr double kTieTolerance = 1e-12;
constexpr int kDescentBudget = 200000;
constexpr double kRayFactors[] = {2.0, 0.5, 1.25, 0.8, 1.05, 0.95, 1.01, 0.99};

struct Range {
  std::int64_t lo;
  std::int64_t hi;
};

class SearchSpace {
 public:
  explicit SearchSpace(const OptimizationProblem& p) : problem_(p) {
    const auto& b = p.bounds;
    const int M = p.mode == SearchMode::OpenLoop ? 1 : p.max_rounds;
    if (p.max_rounds < 1) throw InvalidArgument("optimize_throughput: max_rounds must be >= 1");
    if (!(b.k_min > 0.0) || b.k_max < b.k_min) throw InvalidArgument("optimize_throughput: bad K range");
    if (b.length_step < 1) throw InvalidArgument("optimize_throughput: length_step must be >= 1");
    if (!(p.relative_delay >= 0.0)) throw InvalidArgument("optimize_throughput: relative delay must be >= 0");

    k_fixed_ = b.k_min == b.k_max;
    if (k_fixed_) {
      ranges_.push_back({0, 0});
    } else {
      ranges_.push_back({static_cast<std::int64_t>(std::ceil(b.k_min)),
                         static_cast<std::int64_t>(std::floor(b.k_max))});
    }
    length_min_ = b.length_min.value_or(kDefaultMinSubcodewordLength * p.max_rounds);
    if (p.mode == SearchMode::VariableLength) {
      const std::int64_t lo = b.min_subcodeword_length;
      const std::int64_t hi = b.length_max - (M - 1) * b.min_subcodeword_length;
      for (int m = 0; m < M; ++m) ranges_.push_back({lo, hi});
    } else {
      const std::int64_t step = b.length_step;
      ranges_.push_back({(std::max<std::int64_t>(length_min_, 1) + step - 1) / step, b.length_max / step});
    }
    for (const auto& r : ranges_) {
      if (r.lo > r.hi) throw EmptyFeasibleSet("optimize_throughput: search bounds exclude every scheme");
    }
  }

  std::size_t dims() const { return ranges_.size(); }
  const Range& range(std::size_t c) const { return ranges_[c]; }

  bool contains(const Point& x) const {
    for (std::size_t c = 0; c < dims(); ++c) {
      if (x[c] < ranges_[c].lo || x[c] > ranges_[c].hi) return false;
    }
    return true;
  }

  double nats(const Point& x) const { return k_fixed_ ? problem_.bounds.k_min : static_cast<double>(x[0]); }

  std::optional<std::vector<std::int64_t>> lengths(const Point& x) const {
    const auto& b = problem_.bounds;
    std::vector<std::int64_t> out;
    switch (problem_.mode) {
      case SearchMode::VariableLength:
        out.assign(x.begin() + 1, x.end());
        break;
      case SearchMode::OpenLoop:
        out = {x[1] * b.length_step};
        break;
      case SearchMode::FixedLength: {
        const int M = problem_.max_rounds;
        const std::int64_t parent = x[1] * b.length_step;
        const std::int64_t base = std::llround(static_cast<double>(parent) / M);
        out.assign(static_cast<std::size_t>(M - 1), base);
        out.push_back(parent - (M - 1) * base);
        break;
      }
    }
    std::int64_t total = 0;
    for (auto l : out) {
      if (l < b.min_subcodeword_length) return std::nullopt;
      total += l;
    }
    if (total < length_min_ || total > b.length_max) return std::nullopt;
    return out;
  }

  std::optional<HarqScheme> scheme(const Point& x) const {
    auto ls = lengths(x);
    if (!ls) return std::nullopt;
    const double df = problem_.mode == SearchMode::OpenLoop ? 0.0 : problem_.relative_delay;
    return HarqScheme::with_relative_delay(nats(x), std::move(*ls), df, problem_.bounds.min_subcodeword_length);
  }

  std::int64_t parent_length(const Point& x) const {
    auto ls = lengths(x);
    std::int64_t total = 0;
    if (ls) {
      for (auto l : *ls) total += l;
    }
    return total;
  }

  Point from_scheme(const HarqScheme& s) const {
    Point x{k_fixed_ ? 0 : static_cast<std::int64_t>(std::llround(s.nats()))};
    if (problem_.mode == SearchMode::VariableLength) {
      for (auto l : s.lengths()) x.push_back(l);
    } else {
      x.push_back(s.parent_length() / problem_.bounds.length_step);
    }
    return x;
  }

 private:
  const OptimizationProblem& problem_;
  std::vector<Range> ranges_;
  std::int64_t length_min_ = 0;
  bool k_fixed_ = false;
};

class Objective {
 public:
  Objective(const SearchSpace& space, const ChannelSpec& spec, OutageMethod method, OracleOptions oracle)
      : space_(space), spec_(spec), method_(method), oracle_(oracle) {}

  double operator()(const Point& x) {
    if (auto it = cache_.find(x); it != cache_.end()) return it->second;
    const double eta = compute(x);
    cache_.emplace(x, eta);
    return eta;
  }

  // Uncached; safe to call concurrently.
  double compute(const Point& x) const {
    if (!space_.contains(x)) return -std::numeric_limits<double>::infinity();
    const auto scheme = space_.scheme(x);
    if (!scheme) return -std::numeric_limits<double>::infinity();
    try {
      return throughput(*scheme, compute_outages(*scheme, spec_, method_, oracle_)).eta;
    } catch (const NumericalError&) {
      return -std::numeric_limits<double>::infinity();
    } catch (const InvalidArgument&) {
      return -std::numeric_limits<double>::infinity();
    }
  }

  void seed(const Point& x, double eta) { cache_.emplace(x, eta); }
  int evaluations() const { return static_cast<int>(cache_.size()); }

 private:
  const SearchSpace& space_;
  const ChannelSpec& spec_;
  OutageMethod method_;
  OracleOptions oracle_;
  std::map<Point, double> cache_;
};

// Strict "a beats b" with the deterministic tie-break: smaller l_(M), smaller K, then
// lexicographically smaller point.
bool better(const SearchSpace& space, double eta_a, const Point& a, double eta_b, const Point& b) {
  if (std::isinf(eta_b) && eta_b < 0) return !(std::isinf(eta_a) && eta_a < 0) || a < b;
  if (std::isinf(eta_a) && eta_a < 0) return false;
  const double scale = std::max(std::abs(eta_a), std::abs(eta_b));
  if (eta_a - eta_b > kTieTolerance * scale) return true;
  if (eta_b - eta_a > kTieTolerance * scale) return false;
  const auto la = space.parent_length(a);
  const auto lb = space.parent_length(b);
  if (la != lb) return la < lb;
  if (space.nats(a) != space.nats(b)) return space.nats(a) < space.nats(b);
  return a < b;
}

std::vector<std::int64_t> log_axis(Range r, int points) {
  std::vector<std::int64_t> axis;
  if (r.lo == r.hi || points <= 1) return {r.lo};
  const double lo = std::max<double>(1.0, static_cast<double>(r.lo));
  const double hi = static_cast<double>(r.hi);
  for (int i = 0; i < points; ++i) {
    const double v = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
    axis.push_back(std::clamp<std::int64_t>(std::llround(v), r.lo, r.hi));
  }
  axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
  return axis;
}

std::int64_t initial_step(Range r, int points) {
  const std::int64_t span = (r.hi - r.lo) / std::max(1, points);
  std::int64_t step = 1;
  while (step < span) step *= 2;
  return step;
}

struct Incumbent {
  Point x;
  double eta;
};

Incumbent pattern_search(const SearchSpace& space, Objective& f, Point x, std::vector<std::int64_t> steps) {
  double fx = f(x);
  int evaluations = 0;
  while (evaluations < kDescentBudget) {
    bool moved = false;
    for (std::size_t c = 0; c < space.dims() && !moved; ++c) {
      if (space.range(c).lo == space.range(c).hi) continue;
      for (int dir : {+1, -1}) {
        Point cand = x;
        cand[c] += dir * steps[c];
        if (!space.contains(cand)) continue;
        const double fc = f(cand);
        ++evaluations;
        if (better(space, fc, cand, fx, x)) {
          x = std::move(cand);
          fx = fc;
          moved = true;
          break;
        }
      }
    }
    // Ray moves: K and every length scaled together keep all rates fixed. Along that ridge
    // throughput changes slowly, so unit steps drown in rounding and larger factors are used.
    if (!moved && space.range(0).lo != space.range(0).hi) {
      for (double factor : kRayFactors) {
        Point cand = x;
        for (std::size_t c = 0; c < space.dims(); ++c) {
          cand[c] = std::llround(static_cast<double>(x[c]) * factor);
        }
        if (cand == x || !space.contains(cand)) continue;
        const double fc = f(cand);
        ++evaluations;
        if (better(space, fc, cand, fx, x)) {
          x = std::move(cand);
          fx = fc;
          moved = true;
          break;
        }
      }
    }
    if (moved) continue;
    bool at_unit = true;
    for (auto& s : steps) {
      if (s > 1) {
        s /= 2;
        at_unit = false;
      }
    }
    if (at_unit) break;
  }
  return {x, fx};
}

Incumbent coarse_grid(const SearchSpace& space, const Objective& f, int points_per_axis, unsigned workers) {
  std::vector<std::vector<std::int64_t>> axes;
  for (std::size_t c = 0; c < space.dims(); ++c) axes.push_back(log_axis(space.range(c), points_per_axis));

  std::vector<Point> grid;
  Point idx(space.dims(), 0);
  while (true) {
    Point x(space.dims());
    for (std::size_t c = 0; c < space.dims(); ++c) x[c] = axes[c][static_cast<std::size_t>(idx[c])];
    if (space.scheme(x)) grid.push_back(std::move(x));
    std::size_t c = 0;
    for (; c < space.dims(); ++c) {
      if (++idx[c] < static_cast<std::int64_t>(axes[c].size())) break;
      idx[c] = 0;
    }
    if (c == space.dims()) break;
  }
  if (grid.empty()) throw EmptyFeasibleSet("optimize_throughput: coarse grid has no feasible scheme");

  const auto values = parallel_map(grid.size(), workers, [&](std::size_t i) { return f.compute(grid[i]); });
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (better(space, values[i], grid[i], values[best], grid[best])) best = i;
  }
  return {grid[best], values[best]};
}

int points_per_axis(const SearchSpace& space, int budget) {
  int free_dims = 0;
  for (std::size_t c = 0; c < space.dims(); ++c) {
    if (space.range(c).lo != space.range(c).hi) ++free_dims;
  }
  if (free_dims == 0) return 1;
  const int n = static_cast<int>(std::floor(std::pow(static_cast<double>(budget), 1.0 / free_dims)));
  return std::clamp(n, 4, 64);
}

}  // namespace

std::string_view to_string(SearchMode mode) {
  switch (mode) {
    case SearchMode::VariableLength:
      return "variable";
    case SearchMode::FixedLength:
      return "fixed";
    case SearchMode::OpenLoop:
      return "openloop";
  }
  return "unknown";
}

SearchMode parse_search_mode(std::string_view name) {
  for (auto m : {SearchMode::VariableLength, SearchMode::FixedLength, SearchMode::OpenLoop}) {
    if (name == to_string(m)) return m;
  }
  throw InvalidArgument("unknown search mode '" + std::string(name) + "'");
}

OptimizationResult optimize_throughput(const OptimizationProblem& problem) {
  const SearchSpace space(problem);
  const int points = points_per_axis(space, problem.bounds.grid_budget);

  Objective search(space, problem.spec, problem.search_estimator, problem.oracle);
  const Incumbent grid_best = coarse_grid(space, search, points, problem.workers);
  search.seed(grid_best.x, grid_best.eta);

  std::vector<std::int64_t> steps;
  for (std::size_t c = 0; c < space.dims(); ++c) steps.push_back(initial_step(space.range(c), points));
  const Incumbent coarse = pattern_search(space, search, grid_best.x, steps);

  std::vector<Point> seeds{coarse.x};
  if (problem.mode == SearchMode::VariableLength) {
    OptimizationProblem fixed = problem;
    fixed.mode = SearchMode::FixedLength;
    fixed.bounds.length_step = 1;
    seeds.push_back(space.from_scheme(optimize_throughput(fixed).scheme));
  }

  Objective oracle(space, problem.spec, OutageMethod::Oracle, problem.oracle);
  std::optional<Incumbent> best;
  for (const auto& seed : seeds) {
    const Incumbent refined =
        pattern_search(space, oracle, seed, std::vector<std::int64_t>(space.dims(), 8));
    if (!best || better(space, refined.eta, refined.x, best->eta, best->x)) best = refined;
  }
  if (!best || !std::isfinite(best->eta)) {
    throw NonConvergence("optimize_throughput: no scheme could be evaluated with the oracle");
  }

  HarqScheme scheme = *space.scheme(best->x);
  ThroughputReport report =
      throughput(scheme, compute_outages(scheme, problem.spec, OutageMethod::Oracle, problem.oracle));
  return {std::move(scheme), std::move(report), search.evaluations() + oracle.evaluations()};
}

GainReport throughput_gain(const ChannelSpec& spec, int max_rounds, double relative_delay, double nats,
                           const GainOptions& options) {
  OptimizationProblem harq(spec);
  harq.max_rounds = max_rounds;
  harq.mode = SearchMode::VariableLength;
  harq.relative_delay = relative_delay;
  harq.bounds = options.bounds;
  harq.bounds.k_min = harq.bounds.k_max = nats;
  harq.oracle = options.oracle;
  harq.workers = options.workers;

  OptimizationProblem open_loop = harq;
  open_loop.mode = SearchMode::OpenLoop;
  open_loop.relative_delay = 0.0;

  OptimizationResult h = optimize_throughput(harq);
  OptimizationResult o = optimize_throughput(open_loop);
  const double delta = 100.0 * (h.report.eta - o.report.eta) / o.report.eta;
  return {delta, std::move(h), std::move(o)};
}

double relative_delay_threshold_from(const std::vector<double>& leading_omegas) {
  const int M = static_cast<int>(leading_omegas.size()) + 1;
  if (M < 2) throw InvalidArgument("relative_delay_threshold: requires M >= 2");
  double numerator = M - 1;
  double denominator = 1.0;
  for (int m = 1; m <= M - 1; ++m) {
    numerator -= leading_omegas[static_cast<std::size_t>(m - 1)];
    if (m <= M - 2) denominator += leading_omegas[static_cast<std::size_t>(m - 1)];
  }
  return numerator / (M * denominator);
}

double relative_delay_threshold(const OutageVector& omegas) {
  const int M = omegas.max_rounds();
  if (M < 2) throw InvalidArgument("relative_delay_threshold: requires M >= 2");
  std::vector<double> leading;
  for (int m = 1; m <= M - 1; ++m) leading.push_back(omegas[m]);
  return relative_delay_threshold_from(leading);
}

DelayThresholdReport delay_threshold(const ChannelSpec& spec, int max_rounds, double nats,
                                     const DelayThresholdOptions& options) {
  if (max_rounds < 2) throw InvalidArgument("delay_threshold: requires M >= 2");

  OptimizationProblem open_loop(spec);
  open_loop.max_rounds = max_rounds;
  open_loop.mode = SearchMode::OpenLoop;
  open_loop.bounds = options.bounds;
  open_loop.bounds.k_min = open_loop.bounds.k_max = nats;
  open_loop.bounds.length_step = max_rounds;
  open_loop.oracle = options.oracle;
  open_loop.workers = options.workers;
  OptimizationResult ol = optimize_throughput(open_loop);

  const std::int64_t sub = ol.scheme.parent_length() / max_rounds;
  HarqScheme scheme(nats, std::vector<std::int64_t>(static_cast<std::size_t>(max_rounds), sub), 0.0,
                    options.bounds.min_subcodeword_length);
  OutageVector omegas = compute_outages(scheme, spec, options.estimator, options.oracle);

  std::vector<double> upper;
  std::vector<double> lower;
  for (int m = 1; m <= max_rounds - 1; ++m) {
    const auto [v, u] = omega_bounds(scheme.geometry(m, spec), spec);
    lower.push_back(v.value);
    upper.push_back(u.value);
  }

  const double r = relative_delay_threshold(omegas);
  const double r_lower = relative_delay_threshold_from(upper);
  const double r_upper = relative_delay_threshold_from(lower);
  return {r, r_lower, r_upper, std::move(omegas), std::move(upper), std::move(lower), std::move(scheme),
          std::move(ol)};
}

}  // namespace harqfbl
