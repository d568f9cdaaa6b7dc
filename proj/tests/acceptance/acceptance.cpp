// Acceptance runner: one PASS/FAIL line per criterion. Tolerances are pinned
// here; nothing is loosened at run time.
//
//   rmq_acceptance [--only NAME]... [--workers N] [--list]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "oracles.hpp"
#include "rmq/collapse.hpp"
#include "rmq/dynamics.hpp"
#include "rmq/ensembles.hpp"
#include "rmq/estimates.hpp"
#include "rmq/stats.hpp"
#include "rmq_app/app.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  // Records a sub-check; the criterion passes only if all of them do.
  void check(bool ok, const std::string& what) {
    if (!detail.str().empty()) detail << "; ";
    detail << what << (ok ? "" : " [x]");
    pass = pass && ok;
  }
};

std::string num(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

std::size_t g_workers = 1;

// Scratch directory for CLI runs, removed on exit.
class Scratch {
 public:
  explicit Scratch(const std::string& tag) {
    path_ = fs::temp_directory_path() / ("rmq_acceptance_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  Scratch(const Scratch&) = delete;
  Scratch& operator=(const Scratch&) = delete;

  [[nodiscard]] fs::path operator/(const std::string& s) const { return path_ / s; }

 private:
  fs::path path_;
};

int cli(std::vector<std::string> args, std::string* err = nullptr) {
  args.insert(args.begin(), "rmq");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, e;
  const int status = rmq::app::run_cli(static_cast<int>(argv.size()), argv.data(), out, e);
  if (err) *err = e.str();
  return status;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

std::map<std::string, std::string> result_files(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().filename() != "manifest.json") out[e.path().filename().string()] = slurp(e.path());
  }
  return out;
}

// ---------------------------------------------------------------------------

void geometry(Verdict& v) {
  Scratch tmp("geometry");
  const int status = cli({"check", "geometry", "--out", (tmp / "out").string(), "--format", "json", "--set",
                          "geometry.n_separations=100", "--set", "geometry.max_separation=6", "--set",
                          "geometry.lattice=10"});
  v.check(status == 0, "exit " + std::to_string(status));
  if (status != 0) return;
  const auto j = read_json(tmp / "out" / "geometry_report.json");
  const double iso = j["isometry_max_abs_error"], ps = j["phase_space_max_abs_error"];
  v.check(j["samples"] == 100, "100 separations in (0, 6 sigma]");
  v.check(iso < 1e-6, "isometry max err " + num(iso) + " < 1e-6");
  v.check(ps < 1e-6, "phase-space 10x10 max err " + num(ps) + " < 1e-6");
}

void velocity(Verdict& v) {
  Scratch tmp("velocity");
  const int status = cli({"check", "velocity", "--out", (tmp / "out").string(), "--format", "json", "--set",
                          "velocity.sigma=1", "--set", "velocity.momenta=0,1,2", "--set", "velocity.slopes=0,0.5"});
  v.check(status == 0, "exit " + std::to_string(status));
  if (status != 0) return;
  const auto j = read_json(tmp / "out" / "velocity_report.json");
  v.check(j["rows"].size() == 6, "6 cases (p in {0,1,2}, V in {0, 0.5 z})");
  const double worst = j["max_rel_error"];
  v.check(worst < 0.02, "max rel err " + num(worst) + " < 0.02");
}

void free_packet(Verdict& v) {
  const auto g = rmq::Grid::centered(512, 16.0);
  const rmq::FreeHamiltonian h{g, {}, rmq::Potential::free()};
  const double a = -4.0, p = 1.0, s = 1.0;
  auto phi = rmq::make_packet({a, s, p}, g);
  double worst_mu = 0.0, worst_delta = 0.0;
  for (int k = 0; k <= 20; ++k) {
    const double t = 0.1 * k;
    if (k > 0) phi = rmq::free_evolve(phi, h, 0.1, 10);
    const double mu = a + p * t;
    const double delta = std::sqrt(s * s + std::pow(t / (2.0 * s), 2));
    worst_mu = std::max(worst_mu, std::abs(rmq::mu_z(phi) / mu - 1.0));
    worst_delta = std::max(worst_delta, std::abs(rmq::delta_z(phi) / delta - 1.0));
  }
  v.check(worst_mu < 1e-3, "mu rel err " + num(worst_mu) + " < 1e-3");
  v.check(worst_delta < 1e-3, "delta rel err " + num(worst_delta) + " < 1e-3");
}

void born(Verdict& v) {
  for (const std::string w : {"0.64,0.36", "0.25,0.75"}) {
    Scratch tmp("born");
    std::string err;
    const int status = cli({"simulate", "born", "--out", (tmp / "out").string(), "--workers", std::to_string(g_workers),
                            "--set", "born.weights=" + w, "--set", "born.n_runs=10000", "--set", "born.epsilon=0.05",
                            "--set", "born.window_count=64"},
                           &err);
    const auto j = read_json(tmp / "out" / "born_report.json");
    const double n_runs = j["n_runs"], completed = j["completed_runs"], timeouts = j["timeouts"];
    const double hits = completed - timeouts;
    v.check(status == 0, "(" + w + ") exit " + std::to_string(status));
    v.check(!j["aborted"].get<bool>() && timeouts / n_runs < 0.05,
            "timeouts " + num(timeouts, 6) + "/" + num(completed, 6) + " completed of " + num(n_runs, 6));
    bool within = hits > 0;
    std::string freqs;
    for (std::size_t i = 0; i < j["weights"].size(); ++i) {
      const double wi = j["weights"][i];
      const double f = hits > 0 ? j["counts"][i].get<double>() / hits : 0.0;
      within = within && std::abs(f - wi) <= 3.0 * std::sqrt(wi * (1.0 - wi) / std::max(hits, 1.0));
      freqs += (i ? "," : "") + num(f, 4);
    }
    v.check(within, "freq (" + freqs + ") within 3 sigma");
    const double p = j["chi2_p"];
    v.check(hits > 0 && p > 0.01, "chi2_p " + num(p) + " > 0.01");
  }
}

void sparre_andersen(Verdict& v) {
  v.check(rmq::sparre_andersen_exact(1) == 0.5, "P(1) = " + num(rmq::sparre_andersen_exact(1), 17));
  v.check(rmq::sparre_andersen_exact(2) == 0.375, "P(2) = " + num(rmq::sparre_andersen_exact(2), 17));
  for (auto law : {rmq::StepLaw::plus_minus_one, rmq::StepLaw::gaussian}) {
    rmq::RandomStream rng(law == rmq::StepLaw::gaussian ? 101 : 102);
    const auto r = rmq::survival_simulation(law, 100000, 64, rng);
    v.check(r.max_abs_deviation < 0.01, std::string(law == rmq::StepLaw::gaussian ? "gaussian" : "+-1") +
                                            " 1e5 walks max dev " + num(r.max_abs_deviation) + " < 0.01");
  }
  const double tail = rmq::sparre_andersen_exact(310000000);
  v.check(std::abs(tail / 3.2e-5 - 1.0) < 0.01, "P(3.1e8) = " + num(tail) + " within 1% of 3.2e-5");
}

void estimates(Verdict& v) {
  using namespace rmq::estimates;
  const auto r = compute_estimates(EnvironmentParams{});
  // The per-cycle displacement row takes D_a = 1e-12 m^2/s as input; the
  // fully chained value is printed alongside.
  const double da_paper_input = displacement_per_cycle(PositionDiffusion{1e-12}, r.t_return).si();
  const std::vector<std::tuple<std::string, double, double>> golden{
      {"tau_air", r.tau_collision.si(), 2e-12},
      {"tau_gamma", r.tau_photon.si(), 3e-15},
      {"Gamma_air", r.gamma.si(), 1e22},
      {"N", r.n_kicks, 1e10},
      {"p_kick", r.p_kick.si(), 2.5e-23},
      {"dp/p", r.momentum_ratio, 1e-12},
      {"T_spr", r.t_spr.si(), 1e16},
      {"tau/T_spr air", r.tau_over_t_spr_air, 1e-28},
      {"tau/T_spr rad", r.tau_over_t_spr_radiation, 1e-31},
      {"eps air", r.epsilon_air, 1e-6},
      {"eps rad", r.epsilon_radiation, 3e-9},
      {"D_a", r.d_a.si(), 1e-12},
      {"n", static_cast<double>(r.n_return), 3.1e8},
      {"T", r.t_return.si(), 3e-4},
      {"da_RM", da_paper_input, 1e-8},
      {"dsigma", r.dsigma_cycle.si(), 1e-20},
  };
  for (const auto& [name, value, paper] : golden) {
    const bool ok = value > paper / 3.0 && value < paper * 3.0;
    v.check(ok, name + " " + num(value, 3) + " vs " + num(paper, 2));
  }
  v.detail << " (chained da_RM " << num(r.da_cycle.si(), 3) << ")";
}

void newtonian(Verdict& v) {
  Scratch tmp("newtonian");
  const int status =
      cli({"simulate", "trajectory", "--out", (tmp / "out").string(), "--format", "json", "--workers",
           std::to_string(g_workers), "--set", "trajectory.potential=free", "--set", "trajectory.momentum=1", "--set",
           "trajectory.epsilon=0.01", "--set", "trajectory.n_seeds=200"});
  v.check(status == 0, "trajectory exit " + std::to_string(status));
  if (status == 0) {
    const auto j = read_json(tmp / "out" / "trajectory_report.json");
    const double z = j["max_abs_z"];
    v.check(z < 3.0, "200 seeds, " + num(j["checkpoints"].get<double>(), 4) + " checkpoints, max |z| " + num(z) + " < 3");
  }
  rmq::RandomStream rng(9);
  const auto walk = rmq::reduced_plane_walk({0.0, 0.0}, 0.1, {0.5, 1.0}, -1.5, 200000, rng, -0.05, false);
  if (walk.detections.size() < 1000) {
    v.check(false, "only " + std::to_string(walk.detections.size()) + " detections");
    return;
  }
  const auto res = rmq::detection_residuals(walk, 0.0, 0.1, 0.5);
  const std::vector<double> first(res.begin(), res.begin() + 1000);
  const double p = rmq::stats::ks_test(first, rmq::stats::normal_cdf).p_value;
  v.check(p > 0.01, "residual KS p " + num(p) + " > 0.01 (1e3 detections)");
}

void commutator(Verdict& v) {
  const auto g = rmq::Grid::centered(512, 16.0);
  const rmq::FreeHamiltonian h{g, {}, rmq::Potential::free()};
  const auto phi = rmq::make_packet({0.0, 1.0, 1.0}, g);
  rmq::KickConfig kick;
  kick.scale = 0.05;
  kick.window = rmq::GaussianWindow{};
  rmq::RandomStream rng(2);
  const Eigen::MatrixXcd hk = rmq::sample_gue(64, 0.05, rng).entries;
  std::vector<double> lt, le;
  for (double tau : {0.02, 0.01, 0.005, 0.0025, 0.00125}) {
    lt.push_back(std::log(tau));
    le.push_back(std::log(rmq::commutator_epsilon(phi, h, kick, hk, tau, 1.0).measured));
  }
  const auto fit = rmq::stats::linear_fit(lt, le);
  v.check(std::abs(fit.slope - 1.0) <= 0.1, "exponent " + num(fit.slope) + " in 1 +- 0.1");
  using namespace rmq::estimates;
  const double eps = epsilon_bound(EnvironmentParams{}, Time{2e-12});
  v.check(eps > 2e-6 / 3.0 && eps < 2e-6 * 3.0, "SI bound " + num(eps) + " vs 2e-6");
}

std::pair<std::vector<double>, std::vector<double>> kick_lengths(bool orthogonal) {
  const rmq::Grid grid(64, 64.0, -32.0);
  const auto phi = rmq::make_packet({0.0, 4.0, 0.0}, grid);
  std::mt19937_64 gen(15);
  std::normal_distribution<double> normal;
  rmq::Amplitudes chi(64);
  for (auto& x : chi) x = {normal(gen), normal(gen)};
  chi -= phi.amplitudes().dot(chi) * grid.spacing() * phi.amplitudes();
  chi /= std::sqrt(chi.squaredNorm() * grid.spacing());
  const rmq::GridState psi(grid, std::cos(1.0) * phi.amplitudes() + std::sin(1.0) * chi);

  rmq::RandomStream cal(16);
  rmq::KickConfig cfg;
  cfg.scale = rmq::calibrate_step(64, 0.05, 1.0, cal, 300);
  cfg.propagator = rmq::KickPropagator::taylor;
  rmq::KickOperator op(grid, cfg);
  rmq::RandomStream rng(17);
  std::vector<double> a, b;
  for (int i = 0; i < 10000; ++i) {
    for (const rmq::GridState* s : {&phi, &psi}) {
      const Eigen::MatrixXcd hm =
          orthogonal ? oracle::sample_goe(64, cfg.scale, gen) : rmq::sample_gue(64, cfg.scale, rng).entries;
      rmq::Amplitudes amp = s->amplitudes();
      op.apply(amp, hm);
      (s == &phi ? a : b).push_back(rmq::fs_distance(*s, rmq::GridState(grid, amp)));
    }
  }
  return {a, b};
}

void gue(Verdict& v) {
  rmq::RandomStream rng(0);
  const auto h = rmq::sample_gue(200, 1.0, rng);
  const double herm = (h.entries - h.entries.adjoint()).cwiseAbs().maxCoeff();
  v.check(herm == 0.0, "Hermiticity err " + num(herm));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h.entries, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double radius = 2.0 * std::sqrt(200.0);
  const double ks = rmq::stats::ks_distance({ev.data(), ev.data() + ev.size()},
                                            [&](double x) { return rmq::semicircle_cdf(x, radius); });
  v.check(ks < 0.05, "N=200 semicircle KS " + num(ks) + " < 0.05");
  auto [ga, gb] = kick_lengths(false);
  const double p_gue = rmq::stats::ks_test_two_sample(ga, gb).p_value;
  v.check(p_gue > 0.01, "GUE isotropy p " + num(p_gue) + " > 0.01");
  auto [oa, ob] = kick_lengths(true);
  const double p_goe = rmq::stats::ks_test_two_sample(oa, ob).p_value;
  v.check(p_goe < 0.01, "GOE isotropy p " + num(p_goe) + " < 0.01");
}

void determinism(Verdict& v) {
  // Small configurations of every scenario, run twice with one worker and
  // once with three.
  const std::vector<std::vector<std::string>> scenarios{
      {"simulate", "born", "--set", "born.n_runs=6", "--set", "born.n_steps_max=40", "--set", "born.batch_size=3",
       "--set", "born.calibration_trials=50"},
      {"simulate", "born", "--set", "born.weights=1,0", "--set", "born.n_runs=6", "--set", "born.trace=true", "--set",
       "born.calibration_trials=50"},
      {"simulate", "survival", "--set", "survival.n_walks=40000"},
      {"simulate", "trajectory", "--set", "trajectory.n_seeds=5", "--set", "trajectory.t_final=0.5", "--set",
       "trajectory.calibration_trials=50"},
      {"simulate", "renewal", "--set", "renewal.n_cycles=2000"},
      {"check", "geometry", "--set", "geometry.n_separations=20"},
      {"check", "velocity", "--set", "velocity.momenta=1"},
      {"check", "gue"},
      {"estimate"},
  };
  Scratch tmp("determinism");
  int k = 0;
  for (const auto& base : scenarios) {
    std::map<std::string, std::string> outputs[3];
    int status[3];
    const std::vector<std::string> runs[3] = {{"--workers", "1"}, {"--workers", "1"}, {"--workers", "3"}};
    for (int r = 0; r < 3; ++r) {
      auto args = base;
      const auto dir = tmp / ("run" + std::to_string(k) + "_" + std::to_string(r));
      args.insert(args.end(), {"--seed", "1234", "--out", dir.string()});
      args.insert(args.end(), runs[r].begin(), runs[r].end());
      status[r] = cli(args);
      outputs[r] = fs::exists(dir) ? result_files(dir) : std::map<std::string, std::string>{};
    }
    const bool same = !outputs[0].empty() && outputs[0] == outputs[1] && outputs[0] == outputs[2] &&
                      status[0] == status[1] && status[0] == status[2];
    v.check(same, base[base.size() > 1 && base[0] != "estimate" ? 1 : 0] + " (" +
                      std::to_string(outputs[0].size()) + " files)");
    ++k;
  }
}

struct Criterion {
  std::string name;
  std::string summary;
  std::function<void(Verdict&)> run;
  double runtime_limit_s;  // <= 0: not judged
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {"geometry", "Geometry identities", geometry, 10.0},
      {"velocity", "Velocity decomposition", velocity, 30.0},
      {"free_packet", "Free-packet oracles", free_packet, 0.0},
      {"born", "Born rule frequencies", born, 0.0},
      {"sparre_andersen", "Sparre Andersen survival", sparre_andersen, 60.0},
      {"estimates", "Estimates golden suite", estimates, 1.0},
      {"newtonian", "Stroboscopic Newtonian motion", newtonian, 600.0},
      {"commutator", "Commutator suppression", commutator, 0.0},
      {"gue", "GUE sampler validation", gue, 0.0},
      {"determinism", "Determinism across reruns and workers", determinism, 0.0},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria for the rmq simulator"};
  std::vector<std::string> only;
  bool list = false;
  g_workers = std::max(1U, std::thread::hardware_concurrency());
  app.add_option("--only", only, "Run only the named criteria");
  app.add_option("--workers", g_workers, "Worker threads for the heavy scenarios")->check(CLI::PositiveNumber);
  app.add_flag("--list", list, "List criterion names");
  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const auto& c : criteria()) std::cout << c.name << '\n';
    return 0;
  }
  for (const auto& name : only) {
    if (std::none_of(criteria().begin(), criteria().end(), [&](const auto& c) { return c.name == name; })) {
      std::cerr << "unknown criterion: " << name << '\n';
      return 2;
    }
  }

  int failed = 0;
  for (const auto& c : criteria()) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(v);
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.runtime_limit_s > 0.0) v.check(secs < c.runtime_limit_s, "runtime < " + num(c.runtime_limit_s) + " s");
    std::cout << (v.pass ? "PASS " : "FAIL ") << c.name << " | " << c.summary << " | " << v.detail.str() << " | "
              << num(secs, 3) << " s" << std::endl;
    failed += v.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
