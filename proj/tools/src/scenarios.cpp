#include "rmq_app/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "rmq/collapse.hpp"
#include "rmq/dynamics.hpp"
#include "rmq/ensembles.hpp"
#include "rmq/error.hpp"
#include "rmq/estimates.hpp"
#include "rmq/geometry.hpp"
#include "rmq/parallel.hpp"
#include "rmq/stats.hpp"

namespace rmq::app {
namespace {

using nlohmann::json;

// Calibration draws come from a stream no run index can reach.
constexpr std::uint64_t kCalibrationStream = ~std::uint64_t{0};

std::string csv_number(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

Grid grid_from(const Config& cfg, const std::string& section) {
  const auto points = cfg.count(section, "grid_points");
  if (points < 64) throw ConfigError(section + ".grid_points", "must be at least 64");
  return Grid::centered(points, cfg.positive(section, "half_width"));
}

KickConfig window_kick(const Config& cfg, const std::string& section) {
  KickConfig k;
  GaussianWindow w;
  w.count = cfg.count(section, "window_count");
  w.width = cfg.positive(section, "window_width");
  w.spacing = cfg.positive(section, "window_spacing");
  k.window = w;
  return k;
}

double kick_scale(const Config& cfg, const std::string& section, const GridState& state, const KickConfig& kick,
                  std::uint64_t seed, std::ostringstream& log) {
  if (cfg.text(section, "scale") != "auto") {
    const double s = cfg.real(section, "scale");
    if (s < 0.0) throw ConfigError(section + ".scale", "must be non-negative or auto");
    return s;
  }
  const double eps = cfg.positive(section, "epsilon");
  if (eps >= 0.5) throw ConfigError(section + ".epsilon", "must lie in (0, 0.5)");
  RandomStream rng = RandomStream::derive(seed, kCalibrationStream);
  const double s = calibrate_step(state, kick, eps, rng, cfg.count(section, "calibration_trials"));
  log << "calibrated GUE scale " << csv_number(s) << " for epsilon " << csv_number(eps) << '\n';
  return s;
}

Outcome born(Context& c) {
  const Config& cfg = c.cfg;
  const auto weights = cfg.reals("born", "weights");
  const auto centers = cfg.reals("born", "centers");
  if (weights.size() != centers.size()) throw ConfigError("born.centers", "needs one centre per weight");
  if (weights.size() < 2) throw ConfigError("born.weights", "needs at least two outcomes");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw ConfigError("born.weights", "weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("born.weights", "weights must sum to 1");

  BornSetup setup;
  for (double w : weights) setup.amplitudes.emplace_back(std::sqrt(w));
  setup.centers = centers;
  setup.sigma = cfg.positive("born", "sigma");
  setup.grid = grid_from(cfg, "born");
  setup.kick = window_kick(cfg, "born");
  setup.kick.propagator = cfg.choice("born", "propagator", {"taylor", "eigendecomposition"}) == "taylor"
                              ? KickPropagator::taylor
                              : KickPropagator::eigendecomposition;
  setup.n_steps_max = cfg.count("born", "n_steps_max");
  setup.n_runs = cfg.count("born", "n_runs");
  setup.batch_size = cfg.count("born", "batch_size");
  setup.workers = c.workers;
  setup.master_seed = c.seed;
  if (cfg.text("born", "mu_tol") != "auto") setup.mu_tol = cfg.positive("born", "mu_tol");

  const GridState initial = superposition(setup.grid, setup.amplitudes, setup.centers, setup.sigma);
  setup.kick.scale = kick_scale(cfg, "born", initial, setup.kick, c.seed, c.log);

  const BornReport report = born_statistics_partial(setup);
  const std::size_t completed = report.runs.size();
  c.log << "born: " << completed << " runs, " << report.timeouts << " timeouts\n";

  std::ostringstream jsonl;
  for (const auto& r : report.runs) {
    json line{{"seed", r.seed},
              {"outcome", r.outcome ? json(*r.outcome) : json(nullptr)},
              {"hitting_step", r.hitting_step},
              {"timeout", r.timeout}};
    jsonl << line.dump() << '\n';
  }
  c.out.add("runs.jsonl", jsonl.str());

  const double hits = static_cast<double>(completed - report.timeouts);
  std::vector<double> freq;
  for (auto n : report.counts) freq.push_back(hits > 0 ? static_cast<double>(n) / hits : 0.0);
  if (c.json()) {
    json j{{"weights", report.weights},   {"counts", report.counts},   {"frequencies", freq},
           {"n_runs", report.n_runs},     {"completed_runs", completed}, {"timeouts", report.timeouts},
           {"chi2", report.chi2},         {"chi2_p", report.chi2_p},   {"kick_scale", setup.kick.scale},
           {"aborted", report.aborted},   {"abort_reason", report.abort_reason}};
    c.out.add("born_report.json", dump_json(j));
  }
  if (c.csv()) {
    std::ostringstream csv;
    csv << "outcome,weight,count,frequency\n";
    for (std::size_t i = 0; i < report.counts.size(); ++i) {
      csv << i << ',' << csv_number(report.weights[i]) << ',' << report.counts[i] << ',' << csv_number(freq[i]) << '\n';
    }
    c.out.add("born_counts.csv", csv.str());
  }
  if (cfg.flag("born", "trace")) {
    std::vector<ClassSpec> detectors;
    for (double z : centers) detectors.push_back({z, setup.sigma});
    RandomStream rng = RandomStream::derive(c.seed, 0);
    const auto run = run_collapse(initial, detectors, setup.kick, setup.n_steps_max, rng, {true, setup.mu_tol});
    std::ostringstream trace;
    write_trace_csv(trace, run.foliation_trace);
    c.out.add("trace_run0.csv", trace.str());
  }
  if (report.aborted) return {3, "TimeoutFractionExceeded: " + report.abort_reason};
  return {0, "chi2_p = " + csv_number(report.chi2_p)};
}

Outcome survival(Context& c) {
  const Config& cfg = c.cfg;
  const StepLaw law =
      cfg.choice("survival", "law", {"gaussian", "plus_minus_one"}) == "gaussian" ? StepLaw::gaussian : StepLaw::plus_minus_one;
  const auto n_walks = cfg.count("survival", "n_walks");
  const auto n_max = cfg.u64("survival", "n_max");
  const auto chunk = cfg.count("survival", "chunk");
  const std::size_t n_chunks = (n_walks + chunk - 1) / chunk;
  std::vector<std::vector<std::size_t>> alive(n_chunks);
  parallel_for(n_chunks, c.workers, [&](std::size_t i) {
    const std::size_t walks = std::min(chunk, n_walks - i * chunk);
    RandomStream rng = RandomStream::derive(c.seed, i);
    const auto r = survival_simulation(law, walks, n_max, rng);
    for (double f : r.empirical_survival) alive[i].push_back(static_cast<std::size_t>(std::llround(f * static_cast<double>(walks))));
  });
  SurvivalReport report;
  for (std::size_t n = 0; n <= n_max; ++n) {
    std::size_t total = 0;
    for (const auto& a : alive) total += a[n];
    const double emp = static_cast<double>(total) / static_cast<double>(n_walks);
    const double exact = sparre_andersen_exact(n);
    report.n_values.push_back(n);
    report.empirical_survival.push_back(emp);
    report.exact_survival.push_back(exact);
    report.max_abs_deviation = std::max(report.max_abs_deviation, std::abs(emp - exact));
  }
  c.log << "survival: max deviation " << csv_number(report.max_abs_deviation) << '\n';
  if (c.json()) {
    json j{{"n_values", report.n_values},
           {"empirical_survival", report.empirical_survival},
           {"exact_survival", report.exact_survival},
           {"max_abs_deviation", report.max_abs_deviation},
           {"law", cfg.text("survival", "law")},
           {"n_walks", n_walks}};
    c.out.add("survival_report.json", dump_json(j));
  }
  if (c.csv()) {
    std::ostringstream csv;
    write_survival_csv(csv, report);
    c.out.add("survival.csv", csv.str());
  }
  return {0, "max deviation " + csv_number(report.max_abs_deviation)};
}

Outcome trajectory(Context& c) {
  const Config& cfg = c.cfg;
  const std::string s = "trajectory";
  const Grid grid = grid_from(cfg, s);
  FreeHamiltonian h{grid, {}, Potential::free()};
  const auto& pot = cfg.choice(s, "potential", {"free", "linear", "harmonic"});
  if (pot == "linear") h.potential = Potential::linear(cfg.real(s, "potential_strength"));
  if (pot == "harmonic") h.potential = Potential::harmonic(cfg.positive(s, "potential_strength"), cfg.real(s, "potential_center"));

  const PacketParams params{cfg.real(s, "center"), cfg.positive(s, "width"), cfg.real(s, "momentum")};
  const GridState phi = make_packet(params, grid);
  EvolutionConfig evo;
  evo.dt_free = cfg.positive(s, "dt_free");
  evo.n_free_substeps = cfg.count(s, "n_free_substeps");
  evo.free_steps_per_kick = cfg.count(s, "free_steps_per_kick");
  evo.kick = window_kick(cfg, s);
  evo.kick.window->co_moving = cfg.flag(s, "co_moving");
  evo.kick.propagator = KickPropagator::taylor;
  evo.kick.scale = kick_scale(cfg, s, phi, evo.kick, c.seed, c.log);
  const double t_final = cfg.positive(s, "t_final");
  const auto n_seeds = cfg.count(s, "n_seeds");

  std::vector<Evolution> runs(n_seeds, Evolution{phi, {}});
  parallel_for(n_seeds, c.workers, [&](std::size_t i) {
    RandomStream rng = RandomStream::derive(c.seed, i);
    runs[i] = alternating_evolve(phi, h, evo, t_final, rng);
  });
  const auto newton = newtonian_reference({params.center, params.momentum}, h, t_final, evo.window_duration());
  const std::size_t points = runs.front().series.size();
  if (newton.size() != points) throw Error(ErrorKind::InvalidArgument, "trajectory.t_final must be a multiple of the kick window");

  std::ostringstream mean_csv;
  mean_csv << "t,mean_tau,stderr_tau,newton_tau\n";
  double max_z = 0.0;
  for (std::size_t k = 0; k < points; ++k) {
    std::vector<double> tau;
    for (const auto& r : runs) tau.push_back(r.series[k].tau);
    const double m = stats::mean(tau);
    const double se = n_seeds > 1 ? std::sqrt(stats::variance(tau) / static_cast<double>(n_seeds)) : 0.0;
    if (k > 0 && se > 0.0) max_z = std::max(max_z, std::abs(m - newton[k].position) / se);
    mean_csv << csv_number(runs.front().series[k].t) << ',' << csv_number(m) << ',' << csv_number(se) << ','
             << csv_number(newton[k].position) << '\n';
  }
  c.log << "trajectory: max |z| " << csv_number(max_z) << " over " << points - 1 << " checkpoints\n";
  if (c.csv()) {
    c.out.add("trajectory_mean.csv", mean_csv.str());
    std::ostringstream series;
    write_series_csv(series, runs.front().series);
    c.out.add("trajectory_series.csv", series.str());
  }
  if (c.json()) {
    json j{{"n_seeds", n_seeds},
           {"kick_scale", evo.kick.scale},
           {"checkpoints", points - 1},
           {"max_abs_z", max_z},
           {"within_3_standard_errors", max_z < 3.0}};
    c.out.add("trajectory_report.json", dump_json(j));
  }
  return {0, "max |z| " + csv_number(max_z)};
}

Outcome renewal(Context& c) {
  const Config& cfg = c.cfg;
  RenewalConfig rc;
  rc.d_a = estimates::PositionDiffusion{cfg.real("renewal", "d_a")};
  if (rc.d_a.si() < 0.0) throw ConfigError("renewal.d_a", "must be non-negative");
  rc.step = estimates::Time{cfg.positive("renewal", "step")};
  rc.truncation_quantile = cfg.positive("renewal", "truncation_quantile");
  if (rc.truncation_quantile >= 1.0) throw ConfigError("renewal.truncation_quantile", "must lie in (0, 1)");
  const auto n = cfg.count("renewal", "n_cycles");
  RandomStream rng = RandomStream::derive(c.seed, 0);
  const auto r = renewal_cycle(rc, n, rng);
  double sq = 0.0;
  for (double d : r.displacements) sq += d * d;
  const double rms = std::sqrt(sq / static_cast<double>(n));
  if (c.csv()) {
    std::ostringstream csv;
    csv << "cycle,return_steps,displacement,cumulative_deviation\n";
    for (std::size_t i = 0; i < n; ++i) {
      csv << i << ',' << r.return_steps[i] << ',' << csv_number(r.displacements[i]) << ','
          << csv_number(r.cumulative_deviation[i]) << '\n';
    }
    c.out.add("renewal.csv", csv.str());
  }
  if (c.json()) {
    json j{{"n_cycles", n},
           {"truncation_steps", r.truncation_steps},
           {"truncated", r.truncated},
           {"typical_displacement", r.typical_displacement},
           {"rms_displacement", rms},
           {"final_deviation", r.cumulative_deviation.back()}};
    c.out.add("renewal_report.json", dump_json(j));
  }
  return {0, "typical displacement " + csv_number(r.typical_displacement)};
}

Outcome geometry(Context& c) {
  const Config& cfg = c.cfg;
  const Grid grid = grid_from(cfg, "geometry");
  const double sigma = cfg.positive("geometry", "sigma");
  const auto iso = isometry_check(grid, sigma, cfg.count("geometry", "n_separations"),
                                  cfg.positive("geometry", "max_separation") * sigma);
  const auto lattice = cfg.count("geometry", "lattice");
  double ps_max = 0.0;
  const GridState origin = make_packet({0.0, sigma, 0.0}, grid);
  for (std::size_t i = 0; i < lattice; ++i) {
    for (std::size_t j = 0; j < lattice; ++j) {
      const double da = 3.0 * sigma * static_cast<double>(i + 1) / static_cast<double>(lattice);
      const double dp = 1.5 / sigma * static_cast<double>(j) / static_cast<double>(lattice);
      const PacketParams other{da, sigma, dp};
      const double numeric = std::norm(inner(origin, make_packet(other, grid)));
      ps_max = std::max(ps_max, std::abs(numeric - phase_space_overlap({0.0, sigma, 0.0}, other)));
    }
  }
  c.log << "geometry: isometry " << csv_number(iso.max_abs_error) << ", phase space " << csv_number(ps_max) << '\n';
  if (c.csv()) {
    std::ostringstream csv;
    csv << "separation,cos2_numeric,cos2_closed_form,abs_error\n";
    for (const auto& r : iso.rows) {
      csv << csv_number(r.separation) << ',' << csv_number(r.cos2_numeric) << ',' << csv_number(r.cos2_closed_form)
          << ',' << csv_number(r.abs_error) << '\n';
    }
    c.out.add("geometry.csv", csv.str());
  }
  if (c.json()) {
    json j{{"isometry_max_abs_error", iso.max_abs_error},
           {"samples", iso.samples},
           {"local_scale_ratio", iso.local_scale_ratio},
           {"phase_space_max_abs_error", ps_max},
           {"lattice", lattice}};
    c.out.add("geometry_report.json", dump_json(j));
  }
  return {0, "isometry error " + csv_number(iso.max_abs_error)};
}

Outcome velocity(Context& c) {
  const Config& cfg = c.cfg;
  const Grid grid = grid_from(cfg, "velocity");
  const double sigma = cfg.positive("velocity", "sigma");
  std::ostringstream csv;
  csv << "momentum,slope,v_term,w_term,spread_term,analytic_total,numeric_total,rel_error,precondition_ok\n";
  json rows = json::array();
  double worst = 0.0;
  for (double p : cfg.reals("velocity", "momenta")) {
    for (double g : cfg.reals("velocity", "slopes")) {
      const FreeHamiltonian h{grid, {}, g == 0.0 ? Potential::free() : Potential::linear(g)};
      const auto d = velocity_decomposition({0.0, sigma, p}, h);
      const double rel = std::abs(d.numeric_total / d.analytic_total - 1.0);
      worst = std::max(worst, rel);
      csv << csv_number(p) << ',' << csv_number(g) << ',' << csv_number(d.v_term) << ',' << csv_number(d.w_term) << ','
          << csv_number(d.spread_term) << ',' << csv_number(d.analytic_total) << ',' << csv_number(d.numeric_total)
          << ',' << csv_number(rel) << ',' << (d.precondition_ok ? "true" : "false") << '\n';
      rows.push_back({{"momentum", p},
                      {"slope", g},
                      {"v_term", d.v_term},
                      {"w_term", d.w_term},
                      {"spread_term", d.spread_term},
                      {"analytic_total", d.analytic_total},
                      {"numeric_total", d.numeric_total},
                      {"rel_error", rel},
                      {"precondition_ok", d.precondition_ok}});
    }
  }
  if (c.csv()) c.out.add("velocity.csv", csv.str());
  if (c.json()) c.out.add("velocity_report.json", dump_json({{"rows", rows}, {"max_rel_error", worst}}));
  return {0, "max relative error " + csv_number(worst)};
}

Outcome gue(Context& c) {
  const Config& cfg = c.cfg;
  const auto n = cfg.count("gue", "dimension");
  if (n < 2) throw ConfigError("gue.dimension", "must be at least 2");
  const double scale = cfg.positive("gue", "scale");
  RandomStream rng = RandomStream::derive(c.seed, 0);
  const auto h = sample_gue(n, scale, rng);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h.entries, Eigen::EigenvaluesOnly);
  const double radius = 2.0 * std::sqrt(static_cast<double>(n)) * scale;
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double ks = stats::ks_distance({ev.data(), ev.data() + ev.size()}, [&](double x) { return semicircle_cdf(x, radius); });
  const double herm = (h.entries - h.entries.adjoint()).cwiseAbs().maxCoeff();
  if (c.csv()) {
    std::ostringstream csv;
    write_spectrum_csv(csv, ev);
    c.out.add("spectrum.csv", csv.str());
  }
  if (c.json()) {
    c.out.add("gue_report.json", dump_json({{"dimension", n},
                                            {"scale", scale},
                                            {"radius", radius},
                                            {"hermitian_max_error", herm},
                                            {"ks_distance_semicircle", ks}}));
  }
  return {0, "Kolmogorov distance " + csv_number(ks)};
}

Outcome estimate(Context& c) {
  const Config& cfg = c.cfg;
  const std::string s = "estimate";
  using namespace estimates;
  EnvironmentParams env;
  env.gas_number_density = NumberDensity{cfg.positive(s, "gas_number_density")};
  env.thermal_velocity = Velocity{cfg.positive(s, "thermal_velocity")};
  env.interaction_range = Length{cfg.positive(s, "interaction_range")};
  env.photon_interaction_range = Length{cfg.positive(s, "photon_interaction_range")};
  env.body_radius = Length{cfg.positive(s, "body_radius")};
  env.body_mass = Mass{cfg.positive(s, "body_mass")};
  env.body_speed = Velocity{cfg.positive(s, "body_speed")};
  env.resolution = Length{cfg.positive(s, "resolution")};
  env.gas_particle_mass = Mass{cfg.positive(s, "gas_particle_mass")};
  env.hbar = Action{cfg.positive(s, "hbar")};
  env.step = Time{cfg.positive(s, "step")};
  env.air_window_bound = Time{cfg.positive(s, "air_window_bound")};
  env.radiation_window_bound = Time{cfg.positive(s, "radiation_window_bound")};
  env.return_confidence = cfg.positive(s, "return_confidence");
  if (env.return_confidence >= 1.0) throw ConfigError("estimate.return_confidence", "must lie in (0, 1)");

  const auto report = compute_estimates(env);
  const std::string table = format_table(report);
  c.console << table;
  if (c.json()) {
    json rows = json::object();
    for (const auto& r : report_rows(report)) rows[r.name] = {{"value", r.value}, {"unit", r.unit}};
    c.out.add("estimate.json", dump_json(rows));
  }
  if (c.csv()) {
    std::ostringstream csv;
    csv << "name,value,unit\n";
    for (const auto& r : report_rows(report)) csv << r.name << ',' << csv_number(r.value) << ',' << r.unit << '\n';
    c.out.add("estimate.csv", csv.str());
  }
  c.out.add("estimate.txt", table);
  return {0, "T_spr = " + csv_number(report.t_spr.si()) + " s"};
}

const std::map<std::string, std::function<Outcome(Context&)>>& registry() {
  static const std::map<std::string, std::function<Outcome(Context&)>> r{
      {"born", born},         {"survival", survival}, {"trajectory", trajectory}, {"renewal", renewal},
      {"geometry", geometry}, {"velocity", velocity}, {"gue", gue},               {"estimate", estimate}};
  return r;
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : registry()) v.push_back(k);
    return v;
  }();
  return names;
}

Outcome run_scenario(const std::string& name, Context& ctx) { return registry().at(name)(ctx); }

}  // namespace rmq::app
