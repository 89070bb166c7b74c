#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "harqfbl/cli.hpp"
#include "harqfbl/csv.hpp"
#include "harqfbl/errors.hpp"
#include "harqfbl/sweep.hpp"

using namespace harqfbl;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> out;
  for (auto& l : lines_of(text)) {
    if (!l.empty() && l[0] != '#') out.push_back(l);
  }
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      cells.push_back(cell);
      cell.clear();
    } else {
      cell += c;
    }
  }
  cells.push_back(cell);
  return cells;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("harqfbl_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("csv formatting") {
  CHECK(csv::format_number(0.1) == "0.1");
  CHECK(csv::format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(csv::format_number(1e-30) == "1e-30");
  CHECK(csv::format_number(std::nan("")) == "");
  CHECK(csv::quote("plain") == "plain");
  CHECK(csv::quote("300,300") == "\"300,300\"");
  CHECK(csv::quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
  std::ostringstream os;
  csv::Writer w(os);
  w.comment("note");
  w.header({"a", "b"});
  w.row({std::int64_t{3}, std::monostate{}});
  CHECK(os.str() == "# note\na,b\n3,\n");
}

TEST_CASE("sweep parsing") {
  CHECK(parse_snr_axis("10") == std::vector<double>{10.0});
  CHECK(parse_snr_axis("0,5,10") == std::vector<double>{0.0, 5.0, 10.0});
  const auto axis = parse_snr_axis("0:20:2");
  CHECK(axis.size() == 11);
  CHECK(axis.back() == doctest::Approx(20.0));
  CHECK(parse_snr_axis("0:1:0.1").size() == 11);
  CHECK_THROWS_AS(parse_snr_axis("5,1"), InvalidArgument);
  CHECK_THROWS_AS(parse_snr_axis(""), InvalidArgument);
  CHECK_THROWS_AS(parse_snr_axis("0:10:0"), InvalidArgument);
  CHECK_THROWS_AS(parse_snr_axis("ten"), InvalidArgument);
  CHECK(parse_lengths("300,300") == std::vector<std::int64_t>{300, 300});
  CHECK_THROWS_AS(parse_lengths("300,-1"), InvalidArgument);
  CHECK_THROWS_AS(parse_lengths("300,x"), InvalidArgument);
  CHECK(join_lengths({207, 102}) == "207,102");
}

TEST_CASE("outage sweep matches the golden file") {
  const auto r = run_cli({"outage", "--snr-db", "10", "--k", "600", "--lengths", "300,300"});
  REQUIRE(r.code == 0);
  const auto got = data_lines(r.out);
  const auto want = data_lines(read_file(std::filesystem::path(HARQFBL_GOLDEN_DIR) / "outage_10db_k600_300_300.csv"));
  REQUIRE(got.size() == want.size());
  CHECK(got.front() == want.front());
  for (std::size_t i = 1; i < got.size(); ++i) {
    const auto g = split(got[i]);
    const auto w = split(want[i]);
    REQUIRE(g.size() == w.size());
    for (std::size_t c = 0; c < g.size(); ++c) {
      const double gv = std::stod(g[c]);
      const double wv = std::stod(w[c]);
      INFO("row " << i << " column " << c);
      CHECK(std::abs(gv - wv) <= 1e-9 * std::max(1.0, std::abs(wv)));
    }
  }
}

TEST_CASE("usage errors exit with 1, help with 0") {
  CHECK(run_cli({}).code == 1);
  CHECK(run_cli({"bogus"}).code == 1);
  CHECK(run_cli({"outage", "--snr-db", "abc"}).code == 1);
  CHECK(run_cli({"throughput", "--df", "0.1", "--d", "3"}).code == 1);
  CHECK(run_cli({"throughput", "--lengths", "300,50"}).code == 1);
  CHECK(run_cli({"throughput", "--method", "nope"}).code == 1);
  const auto help = run_cli({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("delay-threshold") != std::string::npos);
}

TEST_CASE("numerical failures exit with 2 and name the point") {
  const auto r = run_cli({"throughput", "--snr-db", "0", "--k", "600", "--lengths", "150", "--method", "high-snr"});
  CHECK(r.code == 2);
  CHECK(r.err.find("snr_db=0") != std::string::npos);
}

TEST_CASE("unstable series leaves an empty cell in the outage table") {
  const auto r = run_cli({"outage", "--snr-db", "0", "--k", "600", "--lengths", "150"});
  REQUIRE(r.code == 0);
  const auto rows = data_lines(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(split(rows[1])[3].empty());
  CHECK(r.err.find("warning") != std::string::npos);
}

TEST_CASE("throughput, openloop and M=1 agree") {
  const auto t = run_cli({"throughput", "--snr-db", "5,10", "--k", "500", "--lengths", "400", "--d", "30"});
  const auto o = run_cli({"openloop", "--snr-db", "5,10", "--k", "500", "--lengths", "400"});
  REQUIRE(t.code == 0);
  REQUIRE(o.code == 0);
  const auto tr = data_lines(t.out);
  const auto orow = data_lines(o.out);
  REQUIRE(tr.size() == 3);
  for (std::size_t i = 1; i < 3; ++i) CHECK(split(tr[i]).back() == split(orow[i]).back());
}

TEST_CASE("config file supplies options and the command line overrides it") {
  const auto dir = scratch_dir("config");
  const auto cfg = dir / "run.ini";
  std::ofstream(cfg) << "snr-db=0:10:5\nk=300\nlengths=200,100\n";
  const auto a = run_cli({"throughput", "--config", cfg.string()});
  REQUIRE(a.code == 0);
  const auto rows = data_lines(a.out);
  REQUIRE(rows.size() == 4);
  CHECK(split(rows[1])[1] == "300");
  CHECK(split(rows[1])[2] == "200,100");
  const auto b = run_cli({"throughput", "--config", cfg.string(), "--k", "400"});
  CHECK(split(data_lines(b.out)[1])[1] == "400");
}

TEST_CASE("simulate output is identical across worker counts") {
  const std::vector<std::string> base{"simulate", "--snr-db", "3,10", "--packets", "20000", "--seed", "9"};
  auto with = [&](const char* w) {
    auto args = base;
    args.insert(args.end(), {"--workers", w});
    return run_cli(args);
  };
  const auto one = with("1");
  REQUIRE(one.code == 0);
  CHECK(with("4").out == one.out);
  CHECK(with("8").out == one.out);
  CHECK(data_lines(one.out).size() == 5);
}

TEST_CASE("figure modes write a csv and a gnuplot script") {
  const auto dir = scratch_dir("fig");
  const auto out = dir / "gain.csv";
  const auto r = run_cli({"optimize", "--mode", "fig1b", "--snr-db", "10,20", "--out", out.string()});
  REQUIRE(r.code == 0);
  CHECK(std::filesystem::exists(out));
  const auto script = read_file(dir / "gain.gp");
  CHECK(script.find("set datafile separator ','") != std::string::npos);
  CHECK(script.find("gain.csv") != std::string::npos);
  const auto rows = data_lines(read_file(out));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "snr_db,k,delta_percent,eta_variable,eta_open_loop,lengths_variable,length_open_loop");
}

TEST_CASE("optimize and delay-threshold tables") {
  const auto opt = run_cli({"optimize", "--mode", "fixed", "--snr-db", "10", "--k", "600"});
  REQUIRE(opt.code == 0);
  const auto o = data_lines(opt.out);
  CHECK(o[0] == "snr_db,mode,k,lengths,df,eta,omega_outage,expected_uses");
  CHECK(split(o[1])[1] == "fixed");
  const auto dt = run_cli({"delay-threshold", "--snr-db", "10", "--k", "300", "--k", "600"});
  REQUIRE(dt.code == 0);
  const auto d = data_lines(dt.out);
  REQUIRE(d.size() == 3);
  for (std::size_t i = 1; i < 3; ++i) {
    const auto c = split(d[i]);
    CHECK(std::stod(c[4]) <= std::stod(c[3]));
    CHECK(std::stod(c[3]) <= std::stod(c[5]));
  }
}
