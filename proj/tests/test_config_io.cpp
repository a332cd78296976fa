#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "myosim/config.hpp"
#include "myosim/csvio.hpp"
#include "myosim/diffusion.hpp"
#include "myosim/experiments.hpp"
#include "myosim/report.hpp"
#include "myosim/walks.hpp"

using namespace myosim;
namespace fs = std::filesystem;

namespace {

const char* kSample = R"INI(
# full experiment description
[experiment]
name = rates        # trailing comment
seed = 42
out_dir = scratch
format = csv.gz
threads = 2

[potential]
form = default_trig
b = 0.25
kappa = 3 ; semicolon comments too
kappas = 2, 2.5, 3

[walk]
n = 2
p = 0.7
y0 = 0, 2
L = 1.5
L_grid = 0.5, 1, 2

[myopic]
T = 0.75
eps = 0.004

[numerics]
dt = 0.0005
horizon = 4
trials = 250
x0 = 0.1, 1.1
)INI";

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("myosim_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("config parsing round trip with comments and lists") {
  const ExperimentConfig cfg = parse_config_text(kSample);
  CHECK(cfg.name == "rates");
  CHECK(cfg.seed == 42);
  CHECK(cfg.seed_set);
  CHECK(cfg.out_dir == "scratch");
  CHECK(cfg.format == "csv.gz");
  CHECK(cfg.threads == 2);
  CHECK(cfg.form == "default_trig");
  CHECK(cfg.b == 0.25);
  CHECK(cfg.kappa == 3.0);
  CHECK(cfg.kappas == std::vector<double>{2.0, 2.5, 3.0});
  CHECK(cfg.n == 2);
  CHECK(cfg.p == 0.7);
  CHECK(cfg.y0 == std::vector<long long>{0, 2});
  CHECK(cfg.L == 1.5);
  CHECK(cfg.L_grid == std::vector<double>{0.5, 1.0, 2.0});
  CHECK(cfg.T == 0.75);
  CHECK(cfg.eps == 0.004);
  CHECK(cfg.dt == 0.0005);
  CHECK(cfg.horizon == 4.0);
  CHECK(cfg.trials == 250);
  CHECK(cfg.x0 == std::vector<double>{0.1, 1.1});
  // untouched keys keep their defaults
  CHECK(cfg.window == 0);
  CHECK(cfg.max_rejects == 1000000);
  CHECK(cfg.g_hat == 0.0);
}

TEST_CASE("config parsing is strict") {
  CHECK_THROWS_AS(parse_config_text("[experiment]\nseed = 1\ntypo = 3\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text("[experimnt]\nseed = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[experiment]\nname = x\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("seed = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[experiment\nseed = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[experiment]\nseed\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[experiment]\nseed = twelve\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[experiment]\nseed = 1\nformat = tsv\n"),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_config_text("[experiment]\nseed = 1\n[potential]\nform = cubic\n"),
      ConfigError);
  CHECK_THROWS_AS(parse_config_text("[experiment]\nseed = 1\n[walk]\np = fast\n"),
                  ConfigError);
}

TEST_CASE("config hash tracks meaning, not placement") {
  ExperimentConfig a = parse_config_text(kSample);
  const ExperimentConfig b = parse_config_text(kSample);
  CHECK(config_hash_hex(a) == config_hash_hex(b));
  CHECK(config_hash_hex(a).size() == 16);

  ExperimentConfig moved = a;
  moved.out_dir = "elsewhere";
  moved.threads = 16;
  CHECK(canonical_config_text(moved) == canonical_config_text(a));
  CHECK(config_hash_hex(moved) == config_hash_hex(a));

  ExperimentConfig tilted = a;
  tilted.b = 0.26;
  CHECK(config_hash_hex(tilted) != config_hash_hex(a));

  ExperimentConfig reseeded = a;
  reseeded.seed = 43;
  CHECK(config_hash_hex(reseeded) != config_hash_hex(a));
}

TEST_CASE("csv dumps carry provenance and survive gzip") {
  const fs::path dir = fresh_dir("csv");
  TrajectoryGrid traj;
  traj.dt = 0.5;
  traj.n_particles = 2;
  traj.positions = {0.0, 1.0, 0.25, 1.25, 0.5, 1.5};
  const std::string comment = provenance_comment("00c0ffee00c0ffee", 7);
  CHECK(comment == "# config_hash=00c0ffee00c0ffee seed=7");

  const std::string plain = (dir / "traj.csv").string();
  const std::string packed = (dir / "traj.csv.gz").string();
  dump_trajectory_csv(traj, plain, comment);
  dump_trajectory_csv(traj, packed, comment);
  const std::string text = read_text_file(plain);
  CHECK(read_text_file(packed) == text);
  CHECK(text.find(comment + "\nt,x1,x2\n0,0,1\n") == 0);

  BoxPath bp;
  bp.initial = {0};
  bp.events.push_back({0.75, 0, 1});
  dump_boxpath_csv(bp, (dir / "boxes.csv").string(), comment);
  const std::string boxes = read_text_file((dir / "boxes.csv").string());
  CHECK(boxes.find("t,particle,new_box\n") != std::string::npos);
  CHECK(boxes.find("0.75,0,1\n") != std::string::npos);

  JumpPath jp;
  jp.initial = {0, 2};
  jp.horizon = 2.0;
  jp.events.push_back({0.5, 1, +1});
  jp.events.push_back({1.5, 0, -1});
  dump_jumppath_csv(jp, (dir / "jumps.csv").string(), comment);
  const std::string jumps = read_text_file((dir / "jumps.csv").string());
  CHECK(jumps.find("t,particle,delta\n") != std::string::npos);
  CHECK(jumps.find("0.5,1,+1\n") != std::string::npos);
  CHECK(jumps.find("1.5,0,-1\n") != std::string::npos);

  dump_rates_csv({{"(0,2)", 0, "right", 0.5}}, (dir / "rates.csv").string(),
                 comment);
  const std::string rates = read_text_file((dir / "rates.csv").string());
  CHECK(rates.find("config,particle,direction,rate\n") != std::string::npos);
  CHECK(rates.find("\"(0,2)\",0,right,0.5\n") != std::string::npos);

  CHECK_THROWS(read_text_file((dir / "missing.csv").string()));
}

TEST_CASE("potential tables parse or complain") {
  const fs::path dir = fresh_dir("tables");
  {
    std::ofstream out(dir / "good.csv");
    out << "# x,u samples\n";
    out << "-0.5,1.5\n-0.25, 0.75\n0 0\n0.25,0.75\n0.5,1.5\n";
  }
  std::vector<double> x, u;
  load_potential_table((dir / "good.csv").string(), x, u);
  REQUIRE(x.size() == 5);
  CHECK(x[0] == -0.5);
  CHECK(u[2] == 0.0);
  CHECK(x[2] == 0.0);

  {
    std::ofstream out(dir / "short.csv");
    out << "0,0\n1,1\n";
  }
  CHECK_THROWS(load_potential_table((dir / "short.csv").string(), x, u));
  CHECK_THROWS(load_potential_table((dir / "absent.csv").string(), x, u));
}

TEST_CASE("reports render deterministically with sorted keys") {
  ExperimentReport rep;
  rep.name = "demo";
  rep.seed = 9;
  rep.config_hash = "abc";
  rep.scalars["zeta"] = 1.25;
  rep.scalars["alpha"] = -3.0;
  rep.series["beta"] = {1.0, 0.5, 0.25};
  rep.criteria.push_back({"low-enough", 0.1, 0.2, "<=", 0.0, true});
  rep.criteria.push_back({"in-band", 5.0, 1.0, "in", 2.0, false});

  const std::string once = render_report_json(rep);
  const std::string twice = render_report_json(rep);
  CHECK(once == twice);
  CHECK(once.find("\"alpha\"") < once.find("\"zeta\""));

  const fs::path dir = fresh_dir("report");
  write_report_json(rep, (dir / "report.json").string());
  CHECK(read_text_file((dir / "report.json").string()) == once);

  CHECK_FALSE(rep.all_pass());
  const std::string text = render_criteria_text(rep);
  CHECK(text.find("PASS") != std::string::npos);
  CHECK(text.find("FAIL") != std::string::npos);
  CHECK(text.find("low-enough") != std::string::npos);
  rep.criteria[1].pass = true;
  CHECK(rep.all_pass());
}

TEST_CASE("identical configs write identical artifacts") {
  const fs::path dir1 = fresh_dir("exp1");
  const fs::path dir2 = fresh_dir("exp2");
  const std::string base =
      "[experiment]\nname = rates\nseed = 7\n[walk]\nn = 2\np = 1\n"
      "y0 = 0, 2\nL = 1\n";
  const ExperimentConfig c1 =
      parse_config_text("[experiment]\nout_dir = " + dir1.string() + "\n" + base);
  ExperimentConfig c2 =
      parse_config_text("[experiment]\nout_dir = " + dir2.string() + "\n" + base);
  CHECK(run_experiment(c1) == 0);
  CHECK(run_experiment(c2) == 0);
  CHECK(read_text_file((dir1 / "rates.csv").string()) ==
        read_text_file((dir2 / "rates.csv").string()));
  CHECK(read_text_file((dir1 / "report.json").string()) ==
        read_text_file((dir2 / "report.json").string()));
  CHECK(read_text_file((dir1 / "report.json").string()).find("total_rate") !=
        std::string::npos);
}
