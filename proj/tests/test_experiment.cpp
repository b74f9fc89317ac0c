#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lipnet/experiment.hpp"
#include "lipnet/extension.hpp"
#include "lipnet/lattice.hpp"
#include "lipnet/serialization.hpp"

using namespace lipnet;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("lipnet_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("config text round trip") {
  ExperimentConfig c;
  c.command = Command::Sweep;
  c.out_dir = "some/where";
  c.seed = 42;
  c.target = "min2d";
  c.L = 1.0 / 3.0;
  c.epsilon = 0.125;
  c.eps_list = {0.4, 0.2, 0.1};
  c.norm = NormKind::Linf;
  c.dim = 2;
  c.activation = Activation::Tanh;
  c.m_max = 77;
  c.box = {-1, 0, 2, 0.5};
  c.hat_box = {-2, -1, 3, 1};
  c.net_path = "n.json";
  c.trials = 9;
  c.validation = 4;
  c.validation_seed = 8;
  c.plots = false;
  CHECK(parse_config(to_text(c)) == c);
  ExperimentConfig d;
  d.command = Command::Certify;
  CHECK(parse_config(to_text(d)) == d);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config(""), ArgumentError);
  CHECK_THROWS_AS(parse_config("# only a comment\n"), ArgumentError);
  CHECK_THROWS_AS(parse_config("command = approximate\ncolour = red\n"), ArgumentError);
  CHECK_THROWS_AS(parse_config("command = dance\n"), ArgumentError);
  CHECK_THROWS_AS(parse_config("command = approximate\nseed = -1\n"), ArgumentError);
  CHECK_THROWS_AS(parse_config("command = approximate\nplots = maybe\n"), ArgumentError);
  CHECK_THROWS_AS(parse_config("command approximate\n"), ArgumentError);
  const auto c = parse_config("  command = approximate  \n\n# note\neps=0.3\nbox = 0 1\n");
  CHECK(c.command == Command::Approximate);
  CHECK(c.epsilon == 0.3);
  CHECK(c.box == std::vector<double>{0, 1});
}

TEST_CASE("usage errors exit with 2") {
  const fs::path dir = scratch_dir("usage");
  std::ostringstream log;
  ExperimentConfig none;
  CHECK(run(none, log) == kExitUsage);
  ExperimentConfig sweep;
  sweep.command = Command::Sweep;
  sweep.out_dir = dir.string();
  sweep.eps_list = {0.1, 0.2};
  CHECK(run(sweep, log) == kExitUsage);
  ExperimentConfig cert;
  cert.command = Command::Certify;
  cert.out_dir = dir.string();
  CHECK(run(cert, log) == kExitUsage);
  ExperimentConfig bad;
  bad.command = Command::Approximate;
  bad.out_dir = dir.string();
  bad.target = "no-such-target";
  CHECK(run(bad, log) == kExitUsage);
  CHECK(log.str().find("usage error") != std::string::npos);
}

TEST_CASE("certify the hat net") {
  const fs::path dir = scratch_dir("certify");
  write_text_file(dir / "hat.json", dump(to_json(hat_net())));
  ExperimentConfig c;
  c.command = Command::Certify;
  c.net_path = (dir / "hat.json").string();
  c.box = {-3, 1};
  c.out_dir = dir.string();
  std::ostringstream log;
  CHECK(run(c, log) == kExitOk);
  const Json cert = read_json_file(dir / "certificate.json");
  CHECK(cert["verdict"] == "certified");
  CHECK(cert["region_exact"] == 1.0);

  c.L = 0.5;
  CHECK(run(c, log) == kExitFailure);
  CHECK(log.str().find("failed at stage") != std::string::npos);
}

TEST_CASE("approximate writes a report and a net") {
  const fs::path dir = scratch_dir("approximate");
  ExperimentConfig c;
  c.command = Command::Approximate;
  c.out_dir = dir.string();
  std::ostringstream log;
  CHECK(run(c, log) == kExitOk);
  const Json rep = read_json_file(dir / "report.json");
  CHECK(rep["success"] == true);
  CHECK(rep["sup_error"].get<double>() <= 0.1);
  CHECK(rep["certificate"]["verdict"] == "certified");
  const ShallowNet net = net_from_json(read_json_file(dir / "net.json"));
  CHECK(net.width() == rep["width"].get<int>());
  const std::string first = slurp(dir / "report.json");
  CHECK(run(c, log) == kExitOk);
  CHECK(slurp(dir / "report.json") == first);
}

TEST_CASE("sweep rows") {
  const fs::path dir = scratch_dir("sweep");
  ExperimentConfig c;
  c.command = Command::Sweep;
  c.eps_list = {0.4, 0.2, 0.1};
  c.out_dir = (dir / "abs").string();
  std::ostringstream log;
  CHECK(run(c, log) == kExitOk);
  const auto rows = csv_rows(dir / "abs" / "sweep.csv");
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(std::stod(rows[i][0]) == c.eps_list[i]);
    CHECK(std::stod(rows[i][2]) <= c.eps_list[i]);
    CHECK(std::stod(rows[i][3]) <= 1.0 * (1 + 1e-9));
    CHECK(rows[i][4] == "1");
  }
  for (const char* f : {"eps_sup_error.dat", "eps_width.dat", "kappa_lambda.dat"}) CHECK(fs::exists(dir / "abs" / f));
  std::ifstream lam(dir / "abs" / "kappa_lambda.dat");
  std::string header;
  std::getline(lam, header);
  double kappa = 0.0, lambda = 0.0, previous = 1e300;
  int count = 0;
  while (lam >> kappa >> lambda) {
    CHECK(lambda <= previous + 1e-6);
    previous = lambda;
    ++count;
  }
  CHECK(count == 4);

  c.target = "zero";
  c.out_dir = (dir / "zero").string();
  CHECK(run(c, log) == kExitOk);
  for (const auto& row : csv_rows(dir / "zero" / "sweep.csv")) {
    CHECK(row[1] == "0");
    CHECK(std::stod(row[2]) == 0.0);
  }

  // a single-entry sweep reproduces one approximate call
  ExperimentConfig one;
  one.command = Command::Sweep;
  one.eps_list = {0.2};
  one.out_dir = (dir / "one").string();
  CHECK(run(one, log) == kExitOk);
  ExperimentConfig direct;
  direct.command = Command::Approximate;
  direct.epsilon = 0.2;
  direct.out_dir = (dir / "direct").string();
  CHECK(run(direct, log) == kExitOk);
  const Json rep = read_json_file(dir / "direct" / "report.json");
  const auto row = csv_rows(dir / "one" / "sweep.csv").at(0);
  CHECK(std::stoi(row[1]) == rep["width"].get<int>());
  CHECK(std::stod(row[2]) == rep["sup_error"].get<double>());
}

TEST_CASE("widths along a halving epsilon sweep do not decrease" * doctest::may_fail()) {
  const fs::path dir = scratch_dir("monotone");
  ExperimentConfig c;
  c.command = Command::Sweep;
  c.eps_list = {0.4, 0.2, 0.1};
  c.out_dir = dir.string();
  c.plots = false;
  std::ostringstream log;
  REQUIRE(run(c, log) == kExitOk);
  const auto rows = csv_rows(dir / "sweep.csv");
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stoi(rows[i][1]) >= std::stoi(rows[i - 1][1]));
}

TEST_CASE("file targets") {
  const fs::path dir = scratch_dir("files");
  const auto lattice = sample_function([](const Vector& x) { return 0.8 * std::abs(x(0) - 1.3); },
                                       BoxDomain(Vector{{1.0}}, Vector{{2.0}}), 41);
  {
    std::ofstream out(dir / "lattice.csv");
    write_lattice_csv(out, lattice);
  }
  ExperimentConfig c;
  c.command = Command::Approximate;
  c.target = (dir / "lattice.csv").string();
  c.epsilon = 0.2;
  c.out_dir = (dir / "lat").string();
  std::ostringstream log;
  CHECK(run(c, log) == kExitOk);
  const ShallowNet net = net_from_json(read_json_file(dir / "lat" / "net.json"));
  for (Eigen::Index k = 0; k < lattice.lattice().size(); ++k) {
    CHECK(std::abs(net(lattice.lattice().point(k)) - lattice.values()(k)) <= 0.2);
  }

  ScatteredSamples s;
  s.points = Matrix{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {0.5, 0.5}};
  s.values = Vector{{0.0, 0.5, 0.5, 1.0, 0.5}};
  {
    std::ofstream out(dir / "scattered.csv");
    write_scattered_csv(out, s);
  }
  c.target = (dir / "scattered.csv").string();
  c.norm = NormKind::L1;
  c.epsilon = 0.3;
  c.out_dir = (dir / "sc").string();
  CHECK(run(c, log) == kExitOk);
  const ShallowNet net2 = net_from_json(read_json_file(dir / "sc" / "net.json"));
  CHECK(net2.dim() == 2);
  for (Eigen::Index i = 0; i < s.points.rows(); ++i) {
    CHECK(std::abs(net2(s.points.row(i).transpose()) - s.values(i)) <= 0.3);
  }

  c.L = 0.1;
  CHECK(run(c, log) == kExitFailure);
}
