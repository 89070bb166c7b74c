#include "harqfbl/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "harqfbl/channel_fbl.hpp"
#include "harqfbl/csv.hpp"
#include "harqfbl/errors.hpp"
#include "harqfbl/harq_core.hpp"
#include "harqfbl/mc_sim.hpp"
#include "harqfbl/optimizer.hpp"
#include "harqfbl/outage.hpp"
#include "harqfbl/parallel.hpp"
#include "harqfbl/sweep.hpp"

namespace harqfbl::cli {

namespace {

constexpr std::string_view kSchemaVersion = "1";

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

LogLevel log_level_from_env() {
  const char* env = std::getenv("HARQFBL_LOG");
  if (!env) return LogLevel::Warn;
  const std::string v(env);
  if (v == "error" || v == "quiet") return LogLevel::Error;
  if (v == "info") return LogLevel::Info;
  if (v == "debug") return LogLevel::Debug;
  return LogLevel::Warn;
}

class Log {
 public:
  explicit Log(std::ostream& err) : err_(err), level_(log_level_from_env()) {}
  void error(std::string_view msg) const { err_ << "error: " << msg << '\n'; }
  void warn(std::string_view msg) const {
    if (level_ >= LogLevel::Warn) err_ << "warning: " << msg << '\n';
  }
  void info(std::string_view msg) const {
    if (level_ >= LogLevel::Info) err_ << "info: " << msg << '\n';
  }

 private:
  std::ostream& err_;
  LogLevel level_;
};

struct Options {
  std::string snr_db = "10";
  std::vector<double> k{600.0};
  std::string lengths = "300,300";
  int rounds = 0;
  std::optional<double> df;
  std::optional<double> d;
  std::string method = "oracle";
  std::string mode = "variable";
  std::uint64_t packets = 100000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string out;
  double tol = 1e-10;
  std::int64_t length_max = 10000;

  bool snr_given = false;
  bool k_given = false;
};

/// Rows for one sweep point plus any warnings raised while computing them.
struct PointOutput {
  std::vector<csv::Row> rows;
  std::vector<std::string> warnings;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<PointOutput> points;
};

std::string describe_point(double snr_db, double k) {
  std::ostringstream s;
  s << "snr_db=" << csv::format_number(snr_db) << ", K=" << csv::format_number(k);
  return s.str();
}

template <typename Fn>
auto at_point(const std::string& where, Fn&& fn) {
  try {
    return fn();
  } catch (const NumericalError& e) {
    throw NumericalError("numerical failure at " + where + ": " + e.what());
  }
}

double single_k(const Options& o) {
  if (o.k.size() != 1) throw InvalidArgument("this command takes exactly one --k");
  return o.k.front();
}

int rounds_or(const Options& o, int fallback) { return o.rounds > 0 ? o.rounds : fallback; }

std::vector<std::int64_t> scheme_lengths(const Options& o) {
  auto lengths = parse_lengths(o.lengths);
  if (o.rounds > 0 && static_cast<int>(lengths.size()) != o.rounds) {
    throw InvalidArgument("-M does not match the number of --lengths entries");
  }
  return lengths;
}

HarqScheme scheme_from(const Options& o) {
  auto lengths = scheme_lengths(o);
  std::int64_t total = 0;
  for (auto l : lengths) total += l;
  if (o.d && o.df) throw InvalidArgument("--d and --df are mutually exclusive");
  const double delay = o.d ? *o.d : o.df.value_or(0.0) * static_cast<double>(total);
  return HarqScheme(single_k(o), std::move(lengths), delay);
}

OracleOptions oracle_options(const Options& o) { return OracleOptions{o.tol}; }

csv::Field optional_field(const std::optional<double>& v) {
  if (v && std::isfinite(*v)) return *v;
  return std::monostate{};
}

// ---------------------------------------------------------------------------- outage

Table cmd_outage(const Options& o, const std::vector<double>& axis) {
  const double K = single_k(o);
  const auto lengths = scheme_lengths(o);
  const HarqScheme scheme(K, lengths);
  Table t{{"snr_db", "m", "omega_oracle", "omega_high_snr", "omega_linearized", "v_m", "u_m", "eps_star"}, {}};
  t.points = parallel_map(axis.size(), o.workers, [&](std::size_t i) {
    const double db = axis[i];
    return at_point(describe_point(db, K), [&] {
      const ChannelSpec spec = ChannelSpec::from_db(db);
      PointOutput p;
      for (int m = 1; m <= scheme.max_rounds(); ++m) {
        const RoundGeometry geom = scheme.geometry(m, spec);
        const double oracle = omega_oracle(geom, spec, oracle_options(o)).value;
        std::optional<double> high;
        try {
          high = omega_high_snr(geom, spec).value;
        } catch (const SeriesUnstable& e) {
          p.warnings.push_back(describe_point(db, K) + ", m=" + std::to_string(m) + ": " + e.what());
        }
        const double lin = omega_linearized(geom, spec).value;
        const auto [v, u] = omega_bounds(geom, spec);
        p.rows.push_back({db, std::int64_t{m}, oracle, optional_field(high), lin, v.value, u.value,
                          optional_field(u.diagnostics.chosen_eps)});
      }
      return p;
    });
  });
  return t;
}

// ------------------------------------------------------------------------ throughput

Table cmd_throughput(const Options& o, const std::vector<double>& axis) {
  const HarqScheme scheme = scheme_from(o);
  const OutageMethod method = parse_outage_method(o.method);
  Table t{{"snr_db", "k", "lengths", "d", "df", "method", "omega_outage", "expected_uses", "expected_nats", "eta"},
          {}};
  const std::vector<std::int64_t> lengths(scheme.lengths().begin(), scheme.lengths().end());
  t.points = parallel_map(axis.size(), o.workers, [&](std::size_t i) {
    const double db = axis[i];
    return at_point(describe_point(db, scheme.nats()), [&] {
      const ChannelSpec spec = ChannelSpec::from_db(db);
      const auto report = throughput(scheme, compute_outages(scheme, spec, method, oracle_options(o)));
      PointOutput p;
      p.rows.push_back({db, scheme.nats(), join_lengths(lengths), scheme.feedback_delay(), scheme.relative_delay(),
                        std::string(to_string(method)), report.outage, report.expected_uses, report.expected_nats,
                        report.eta});
      return p;
    });
  });
  return t;
}

// -------------------------------------------------------------------------- openloop

Table cmd_openloop(const Options& o, const std::vector<double>& axis) {
  const double K = single_k(o);
  const bool optimize = o.lengths == "optimize";
  const OutageMethod method = optimize ? OutageMethod::Oracle : parse_outage_method(o.method);
  std::int64_t fixed_length = 0;
  if (!optimize) {
    for (auto l : parse_lengths(o.lengths)) fixed_length += l;
  }
  Table t{{"snr_db", "k", "length", "method", "omega_outage", "eta"}, {}};
  t.points = parallel_map(axis.size(), o.workers, [&](std::size_t i) {
    const double db = axis[i];
    return at_point(describe_point(db, K), [&] {
      const ChannelSpec spec = ChannelSpec::from_db(db);
      std::int64_t length = fixed_length;
      double omega;
      if (optimize) {
        OptimizationProblem problem(spec);
        problem.mode = SearchMode::OpenLoop;
        problem.max_rounds = rounds_or(o, 1);
        problem.bounds.k_min = problem.bounds.k_max = K;
        problem.bounds.length_max = o.length_max;
        problem.oracle = oracle_options(o);
        const auto result = optimize_throughput(problem);
        length = result.scheme.parent_length();
        omega = result.report.outage;
      } else {
        omega = estimate_omega(RoundGeometry(length, K, spec), spec, method, oracle_options(o)).value;
      }
      PointOutput p;
      p.rows.push_back({db, K, std::int64_t{length}, std::string(to_string(method)), omega,
                        open_loop_throughput(length, K, omega)});
      return p;
    });
  });
  return t;
}

// -------------------------------------------------------------------------- optimize

OptimizationProblem base_problem(const Options& o, const ChannelSpec& spec, SearchMode mode) {
  OptimizationProblem problem(spec);
  problem.max_rounds = rounds_or(o, 2);
  problem.mode = mode;
  problem.relative_delay = o.df.value_or(0.0);
  problem.bounds.length_max = o.length_max;
  if (o.k_given) problem.bounds.k_min = problem.bounds.k_max = single_k(o);
  problem.oracle = OracleOptions{std::max(o.tol, 1e-9)};
  return problem;
}

std::vector<std::int64_t> lengths_of(const HarqScheme& s) { return {s.lengths().begin(), s.lengths().end()}; }

Table cmd_optimize_single(const Options& o, const std::vector<double>& axis, SearchMode mode) {
  if (o.d) throw InvalidArgument("optimize takes --df, not --d");
  Table t{{"snr_db", "mode", "k", "lengths", "df", "eta", "omega_outage", "expected_uses"}, {}};
  t.points = parallel_map(axis.size(), o.workers, [&](std::size_t i) {
    const double db = axis[i];
    return at_point(describe_point(db, o.k_given ? single_k(o) : 0.0), [&] {
      const auto result = optimize_throughput(base_problem(o, ChannelSpec::from_db(db), mode));
      PointOutput p;
      p.rows.push_back({db, std::string(to_string(mode)), result.scheme.nats(),
                        join_lengths(lengths_of(result.scheme)), result.scheme.relative_delay(),
                        result.report.eta, result.report.outage, result.report.expected_uses});
      return p;
    });
  });
  return t;
}

std::optional<double> eta_with(const HarqScheme& scheme, const ChannelSpec& spec, OutageMethod method,
                               std::vector<std::string>& warnings) {
  try {
    return throughput(scheme, compute_outages(scheme, spec, method)).eta;
  } catch (const Error& e) {
    warnings.push_back(std::string(to_string(method)) + ": " + e.what());
    return std::nullopt;
  }
}

Table cmd_fig1a(const Options& o, const std::vector<double>& axis) {
  Table t{{"snr_db", "eta_variable", "eta_fixed", "eta_open_loop", "k_variable", "lengths_variable", "k_fixed",
           "lengths_fixed", "eta_variable_linearized", "eta_variable_high_snr", "eta_variable_sim"},
          {}};
  t.points = parallel_map(axis.size(), o.workers, [&](std::size_t i) {
    const double db = axis[i];
    return at_point("snr_db=" + csv::format_number(db), [&] {
      const ChannelSpec spec = ChannelSpec::from_db(db);
      const auto var = optimize_throughput(base_problem(o, spec, SearchMode::VariableLength));
      const auto fix = optimize_throughput(base_problem(o, spec, SearchMode::FixedLength));
      const auto ol = optimize_throughput(base_problem(o, spec, SearchMode::OpenLoop));
      PointOutput p;
      const auto lin = eta_with(var.scheme, spec, OutageMethod::Linearized, p.warnings);
      const auto high = eta_with(var.scheme, spec, OutageMethod::HighSnrSeries, p.warnings);
      std::optional<double> sim;
      if (o.packets > 0) sim = simulate(SimConfig{var.scheme, spec, o.packets, o.seed, 1}).throughput;
      p.rows.push_back({db, var.report.eta, fix.report.eta, ol.report.eta, var.scheme.nats(),
                        join_lengths(lengths_of(var.scheme)), fix.scheme.nats(), join_lengths(lengths_of(fix.scheme)),
                        optional_field(lin), optional_field(high), optional_field(sim)});
      return p;
    });
  });
  return t;
}

Table cmd_fig1b(const Options& o, const std::vector<double>& axis) {
  const double K = single_k(o);
  Table t{{"snr_db", "k", "delta_percent", "eta_variable", "eta_open_loop", "lengths_variable", "length_open_loop"},
          {}};
  GainOptions gain;
  gain.bounds.length_max = o.length_max;
  gain.oracle = OracleOptions{std::max(o.tol, 1e-9)};
  t.points = parallel_map(axis.size(), o.workers, [&](std::size_t i) {
    const double db = axis[i];
    return at_point(describe_point(db, K), [&] {
      const auto g = throughput_gain(ChannelSpec::from_db(db), rounds_or(o, 2), o.df.value_or(0.0), K, gain);
      PointOutput p;
      p.rows.push_back({db, K, g.delta_percent, g.harq.report.eta, g.open_loop.report.eta,
                        join_lengths(lengths_of(g.harq.scheme)), std::int64_t{g.open_loop.scheme.parent_length()}});
      return p;
    });
  });
  return t;
}

Table cmd_delay_threshold(const Options& o, const std::vector<double>& axis) {
  const int M = rounds_or(o, 2);
  DelayThresholdOptions opts;
  opts.estimator = parse_outage_method(o.method);
  opts.bounds.length_max = o.length_max;
  opts.oracle = oracle_options(o);
  Table t{{"snr_db", "k", "length_open_loop", "r", "r_lower", "r_upper"}, {}};
  const std::size_t nk = o.k.size();
  t.points = parallel_map(axis.size() * nk, o.workers, [&](std::size_t i) {
    const double db = axis[i / nk];
    const double K = o.k[i % nk];
    return at_point(describe_point(db, K), [&] {
      const auto rep = delay_threshold(ChannelSpec::from_db(db), M, K, opts);
      PointOutput p;
      p.rows.push_back({db, K, std::int64_t{rep.open_loop.scheme.parent_length()}, rep.r, rep.r_lower, rep.r_upper});
      return p;
    });
  });
  return t;
}

// -------------------------------------------------------------------------- simulate

Table cmd_simulate(const Options& o, const std::vector<double>& axis) {
  const HarqScheme scheme = scheme_from(o);
  const auto lengths = lengths_of(scheme);
  Table t{{"snr_db", "k", "lengths", "d", "packets", "seed", "m", "decoded_at", "omega_sim", "omega_se",
           "omega_oracle", "eta_sim", "eta_se", "eta_oracle"},
          {}};
  for (double db : axis) {
    t.points.push_back(at_point(describe_point(db, scheme.nats()), [&] {
      const ChannelSpec spec = ChannelSpec::from_db(db);
      const SimStats s = simulate(SimConfig{scheme, spec, o.packets, o.seed, o.workers});
      const auto analytic = throughput(scheme, compute_outages(scheme, spec, OutageMethod::Oracle, oracle_options(o)));
      PointOutput p;
      for (int m = 1; m <= scheme.max_rounds(); ++m) {
        const auto idx = static_cast<std::size_t>(m - 1);
        p.rows.push_back({db, scheme.nats(), join_lengths(lengths), scheme.feedback_delay(),
                          static_cast<std::int64_t>(s.packets), static_cast<std::int64_t>(s.seed), std::int64_t{m},
                          static_cast<std::int64_t>(s.decoded_at[idx]), s.omegas[idx], s.omega_std_errors[idx],
                          analytic.omegas[m], s.throughput, s.throughput_std_error, analytic.eta});
      }
      return p;
    }));
  }
  return t;
}

// --------------------------------------------------------------------- plot scripts

std::string plot_script(const std::string& mode, const std::string& csv_name, const std::string& png_name) {
  std::ostringstream g;
  g << "# gnuplot script for " << csv_name << "\n"
    << "set datafile separator ','\n"
    << "set terminal pngcairo size 800,560\n"
    << "set output '" << png_name << "'\n"
    << "set grid\n"
    << "set key left top\n"
    << "set xlabel 'SNR (dB)'\n";
  if (mode == "fig1a") {
    g << "set ylabel 'Throughput (npcu)'\n"
      << "plot '" << csv_name << "' using 1:2 with linespoints title columnheader(2), \\\n"
      << "     '' using 1:3 with linespoints title columnheader(3), \\\n"
      << "     '' using 1:4 with linespoints title columnheader(4), \\\n"
      << "     '' using 1:9 with points title columnheader(9), \\\n"
      << "     '' using 1:11 with points title columnheader(11)\n";
  } else if (mode == "fig1b") {
    g << "set ylabel 'Throughput gain (%)'\n"
      << "plot '" << csv_name << "' using 1:3 with linespoints title columnheader(3)\n";
  } else {
    g << "set ylabel 'Acceptable relative feedback delay'\n"
      << "set logscale y\n"
      << "plot for [kv in \"300 600\"] '" << csv_name << "' using 1:($2==kv ? $4 : 1/0) with linespoints "
      << "title sprintf('r, K=%s', kv), \\\n"
      << "     for [kv in \"300 600\"] '' using 1:($2==kv ? $5 : 1/0) with lines dt 2 title sprintf('r lower, K=%s', kv), \\\n"
      << "     for [kv in \"300 600\"] '' using 1:($2==kv ? $6 : 1/0) with lines dt 3 title sprintf('r upper, K=%s', kv)\n";
  }
  return g.str();
}

void echo_config(csv::Writer& w, const std::string& command, const Options& o) {
  w.comment("harqfbl " + command + " schema=" + std::string(kSchemaVersion));
  w.comment("snr-db=" + o.snr_db);
  std::string ks;
  for (double k : o.k) ks += (ks.empty() ? "" : " ") + csv::format_number(k);
  w.comment("k=" + ks);
  w.comment("lengths=" + o.lengths);
  if (o.rounds > 0) w.comment("M=" + std::to_string(o.rounds));
  if (o.df) w.comment("df=" + csv::format_number(*o.df));
  if (o.d) w.comment("d=" + csv::format_number(*o.d));
  w.comment("method=" + o.method);
  if (command == "optimize") w.comment("mode=" + o.mode);
  if (command == "simulate" || command == "optimize") {
    w.comment("packets=" + std::to_string(o.packets));
    w.comment("seed=" + std::to_string(o.seed));
  }
  w.comment("tol=" + csv::format_number(o.tol));
  w.comment("length-max=" + std::to_string(o.length_max));
}

void write_table(std::ostream& os, const std::string& command, const Options& o, const Table& t, const Log& log) {
  csv::Writer w(os);
  echo_config(w, command, o);
  w.header(t.columns);
  for (const auto& p : t.points) {
    for (const auto& msg : p.warnings) log.warn(msg);
    for (const auto& row : p.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (const double* v = std::get_if<double>(&row[c]); v && !std::isfinite(*v)) {
          log.warn("non-finite " + t.columns[c] + " reported as empty field");
        }
      }
      w.row(row);
    }
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const Log log(err);
  Options o;

  CLI::App app{"Finite-blocklength incremental-redundancy HARQ throughput toolkit", "harqfbl"};
  app.set_config("--config", "", "key=value file; command-line flags take precedence");
  app.require_subcommand(1);

  // Config files split comma lists into arrays; join them back.
  auto* snr_opt = app.add_option("--snr-db", o.snr_db, "SNR axis in dB: value, list a,b,c or start:stop:step")
                      ->delimiter(',')
                      ->multi_option_policy(CLI::MultiOptionPolicy::Join);
  auto* k_opt = app.add_option("--k", o.k, "Information nats K (repeatable for delay-threshold)");
  app.add_option("--lengths", o.lengths, "Sub-codeword lengths, e.g. 300,300 (openloop also accepts 'optimize')")
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::Join);
  app.add_option("-M", o.rounds, "Maximum number of rounds")->check(CLI::PositiveNumber);
  auto* df_opt = app.add_option("--df", o.df, "Relative feedback delay D/l_(M)")->check(CLI::NonNegativeNumber);
  auto* d_opt = app.add_option("--d", o.d, "Absolute feedback delay D (channel uses)")->check(CLI::NonNegativeNumber);
  df_opt->excludes(d_opt);
  app.add_option("--method", o.method, "Outage estimator: oracle, high-snr, linearized, lower, upper");
  app.add_option("--mode", o.mode, "optimize mode: variable, fixed, openloop, fig1a, fig1b, fig1c");
  app.add_option("--packets", o.packets, "Monte Carlo packets");
  app.add_option("--seed", o.seed, "Monte Carlo seed");
  app.add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", o.out, "Output CSV path (default: stdout)");
  app.add_option("--tol", o.tol, "Relative tolerance of the outage quadrature")->check(CLI::Range(1e-14, 1e-3));
  app.add_option("--length-max", o.length_max, "Largest parent codeword length searched");

  std::string command;
  for (const char* name : {"outage", "throughput", "openloop", "optimize", "delay-threshold", "simulate"}) {
    app.add_subcommand(name)->fallthrough()->callback([&command, name] { command = name; });
  }
  app.get_subcommand("outage")->description("Outage probabilities from every estimator");
  app.get_subcommand("throughput")->description("HARQ throughput of a given scheme");
  app.get_subcommand("openloop")->description("Open-loop (single-shot) throughput");
  app.get_subcommand("optimize")->description("Throughput optimization and figure sweeps (fig1a, fig1b, fig1c)");
  app.get_subcommand("delay-threshold")->description("Acceptable relative feedback delay and its bounds");
  app.get_subcommand("simulate")->description("Monte Carlo simulation of the protocol");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  o.snr_given = snr_opt->count() > 0;
  o.k_given = k_opt->count() > 0;

  try {
    const bool fig = command == "optimize" && o.mode.rfind("fig", 0) == 0;
    if (fig && !o.snr_given) o.snr_db = "0:20:2";
    if (command == "optimize" && o.mode == "fig1c" && !o.k_given) o.k = {300.0, 600.0};
    const auto axis = parse_snr_axis(o.snr_db);

    Table table;
    std::string echo_command = command;
    if (command == "outage") {
      table = cmd_outage(o, axis);
    } else if (command == "throughput") {
      table = cmd_throughput(o, axis);
    } else if (command == "openloop") {
      table = cmd_openloop(o, axis);
    } else if (command == "delay-threshold") {
      table = cmd_delay_threshold(o, axis);
    } else if (command == "simulate") {
      table = cmd_simulate(o, axis);
    } else if (o.mode == "fig1a") {
      table = cmd_fig1a(o, axis);
    } else if (o.mode == "fig1b") {
      table = cmd_fig1b(o, axis);
    } else if (o.mode == "fig1c") {
      table = cmd_delay_threshold(o, axis);
    } else {
      table = cmd_optimize_single(o, axis, parse_search_mode(o.mode));
    }

    std::string out_path = o.out;
    if (fig && out_path.empty()) out_path = o.mode + ".csv";
    if (out_path.empty()) {
      write_table(out, echo_command, o, table, log);
    } else {
      std::ofstream file(out_path);
      if (!file) throw InvalidArgument("cannot open output file " + out_path);
      write_table(file, echo_command, o, table, log);
      log.info("wrote " + out_path);
      if (fig) {
        const std::filesystem::path csv_path(out_path);
        std::filesystem::path gp = csv_path;
        gp.replace_extension(".gp");
        std::filesystem::path png = csv_path;
        png.replace_extension(".png");
        std::ofstream script(gp);
        script << plot_script(o.mode, csv_path.filename().string(), png.filename().string());
        log.info("wrote " + gp.string());
      }
    }
    return 0;
  } catch (const NumericalError& e) {
    log.error(e.what());
    return 2;
  } catch (const Error& e) {
    log.error(e.what());
    return 1;
  }
}

}  // namespace harqfbl::cli
