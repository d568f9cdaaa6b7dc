#include "rmq/collapse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "rmq/error.hpp"
#include "rmq/parallel.hpp"
#include "rmq/stats.hpp"

namespace rmq {
namespace {

PositionMoments raw_moments(const Grid& grid, const Amplitudes& psi) {
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (Eigen::Index k = 0; k < psi.size(); ++k) {
    const double w = std::norm(psi(k));
    const double z = grid.point(static_cast<std::size_t>(k));
    m0 += w;
    m1 += w * z;
    m2 += w * z * z;
  }
  const double mean = m1 / m0;
  return {mean, std::sqrt(std::max(0.0, m2 / m0 - mean * mean))};
}

std::optional<std::size_t> detect(const PositionMoments& m, std::span<const ClassSpec> detectors,
                                  const std::optional<double>& mu_tol) {
  for (std::size_t i = 0; i < detectors.size(); ++i) {
    if (detectors[i].admits(m.mean, m.stddev, mu_tol)) return i;
  }
  return std::nullopt;
}

CollapseRun collapse_with(const GridState& initial, std::span<const ClassSpec> detectors, KickOperator& op,
                          std::size_t n_steps_max, RandomStream& rng, const CollapseOptions& options) {
  CollapseRun run;
  run.seed = rng.seed();
  run.n_steps_max = n_steps_max;
  run.detectors.assign(detectors.begin(), detectors.end());
  const Grid& grid = initial.grid();
  Amplitudes psi = initial.amplitudes();
  auto observe = [&] {
    const auto m = raw_moments(grid, psi);
    if (options.record_trace) run.foliation_trace.push_back({m.mean, std::log(m.stddev)});
    return detect(m, detectors, options.mu_tol);
  };
  run.outcome = observe();
  while (!run.outcome && run.hitting_step < n_steps_max) {
    op.apply(psi, rng);
    ++run.hitting_step;
    run.outcome = observe();
  }
  return run;
}

}  // namespace

void require_separated(std::span<const ClassSpec> detectors) {
  for (std::size_t i = 0; i < detectors.size(); ++i) {
    for (std::size_t j = i + 1; j < detectors.size(); ++j) {
      const double sigma = std::max(detectors[i].resolution, detectors[j].resolution);
      if (std::abs(detectors[i].center - detectors[j].center) < 6.0 * sigma) {
        std::ostringstream msg;
        msg << "detectors " << i << " and " << j << " are closer than 6 sigma";
        raise(ErrorKind::DetectorOverlap, msg.str());
      }
    }
  }
}

CollapseRun run_collapse(const GridState& initial, std::span<const ClassSpec> detectors, const KickConfig& kick,
                         std::size_t n_steps_max, RandomStream& rng, const CollapseOptions& options) {
  require_normalized(initial);
  require_separated(detectors);
  KickOperator op(initial.grid(), kick);
  return collapse_with(initial, detectors, op, n_steps_max, rng, options);
}

GridState superposition(const Grid& grid, std::span<const std::complex<double>> amplitudes,
                        std::span<const double> centers, double sigma) {
  if (amplitudes.size() != centers.size() || amplitudes.empty()) {
    raise(ErrorKind::InvalidArgument, "need one centre per amplitude");
  }
  Amplitudes sum = Amplitudes::Zero(static_cast<Eigen::Index>(grid.n_points()));
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    if (amplitudes[i] == 0.0) continue;
    sum += amplitudes[i] * make_packet({centers[i], sigma, 0.0}, grid).amplitudes();
  }
  return GridState::normalized(grid, std::move(sum));
}

BornReport born_statistics_partial(const BornSetup& setup) {
  double total = 0.0;
  for (auto c : setup.amplitudes) total += std::norm(c);
  if (std::abs(total - 1.0) > 1e-9) {
    raise(ErrorKind::InvalidArgument, "squared amplitudes must sum to 1");
  }
  if (setup.n_runs == 0 || setup.batch_size == 0) {
    raise(ErrorKind::InvalidArgument, "n_runs and batch_size must be positive");
  }
  std::vector<ClassSpec> detectors;
  for (double c : setup.centers) detectors.push_back({c, setup.sigma});
  require_separated(detectors);
  const GridState initial = superposition(setup.grid, setup.amplitudes, setup.centers, setup.sigma);
  const KickOperator prototype(setup.grid, setup.kick);

  BornReport report;
  for (auto c : setup.amplitudes) report.weights.push_back(std::norm(c));
  report.counts.assign(detectors.size(), 0);
  report.n_runs = setup.n_runs;
  report.runs.resize(setup.n_runs);
  const CollapseOptions options{false, setup.mu_tol};
  const auto budget = static_cast<std::size_t>(std::floor(kMaxTimeoutFraction * static_cast<double>(setup.n_runs)));

  for (std::size_t first = 0; first < setup.n_runs; first += setup.batch_size) {
    const std::size_t count = std::min(setup.batch_size, setup.n_runs - first);
    parallel_for(count, setup.workers, [&](std::size_t i) {
      const std::size_t idx = first + i;
      RandomStream rng = RandomStream::derive(setup.master_seed, idx);
      KickOperator op = prototype;
      const auto run = collapse_with(initial, detectors, op, setup.n_steps_max, rng, options);
      report.runs[idx] = {run.seed, run.outcome, run.hitting_step, run.timed_out()};
    });
    for (std::size_t i = first; i < first + count; ++i) {
      const auto& r = report.runs[i];
      if (r.timeout) {
        ++report.timeouts;
      } else {
        ++report.counts[*r.outcome];
      }
    }
    if (report.timeouts > budget) {
      std::ostringstream msg;
      msg << report.timeouts << " of " << first + count << " runs timed out after " << setup.n_steps_max
          << " kicks; more than " << kMaxTimeoutFraction * 100.0 << "% of " << setup.n_runs << " runs";
      report.aborted = true;
      report.abort_reason = msg.str();
      report.runs.resize(first + count);
      break;
    }
  }
  const auto gof = stats::chi_square_gof(report.counts, report.weights);
  report.chi2 = gof.statistic;
  report.chi2_p = gof.p_value;
  return report;
}

BornReport born_statistics(const BornSetup& setup) {
  auto report = born_statistics_partial(setup);
  if (report.aborted) raise(ErrorKind::TimeoutFractionExceeded, report.abort_reason);
  return report;
}

double sparre_andersen_exact(std::uint64_t n) {
  if (n < 64) {
    double p = 1.0;
    for (std::uint64_t k = 1; k <= n; ++k) {
      p *= static_cast<double>(2 * k - 1) / static_cast<double>(2 * k);
    }
    return p;
  }
  // Gamma(n + 1/2) / (Gamma(n + 1) sqrt(pi))
  return boost::math::tgamma_delta_ratio(static_cast<double>(n) + 0.5, 0.5) / std::sqrt(std::numbers::pi);
}

SurvivalReport survival_simulation(StepLaw law, std::size_t n_walks, std::size_t n_max, RandomStream& rng) {
  if (n_walks == 0) raise(ErrorKind::InvalidArgument, "need at least one walk");
  std::vector<std::size_t> alive(n_max + 1, 0);
  for (std::size_t w = 0; w < n_walks; ++w) {
    ++alive[0];
    if (law == StepLaw::gaussian) {
      double s = 0.0;
      for (std::size_t n = 1; n <= n_max; ++n) {
        s += rng.normal();
        if (!(s > 0.0)) break;
        ++alive[n];
      }
    } else {
      long long s = 0;
      double tie = 0.0;
      for (std::size_t n = 1; n <= n_max; ++n) {
        s += (rng.bits() & 1U) ? 1 : -1;
        tie += rng.normal();
        if (!(s > 0 || (s == 0 && tie > 0.0))) break;
        ++alive[n];
      }
    }
  }
  SurvivalReport report;
  for (std::size_t n = 0; n <= n_max; ++n) {
    const double emp = static_cast<double>(alive[n]) / static_cast<double>(n_walks);
    const double exact = sparre_andersen_exact(n);
    report.n_values.push_back(n);
    report.empirical_survival.push_back(emp);
    report.exact_survival.push_back(exact);
    report.max_abs_deviation = std::max(report.max_abs_deviation, std::abs(emp - exact));
  }
  return report;
}

ReducedWalk reduced_plane_walk(const FoliationPoint& start, double drift_tau, const StepStd& step_std,
                               double detect_s, std::size_t n_max, RandomStream& rng, double drift_s,
                               bool record_trace) {
  if (!(step_std.tau >= 0.0) || !(step_std.s >= 0.0)) {
    raise(ErrorKind::InvalidArgument, "step standard deviations must be non-negative");
  }
  ReducedWalk walk;
  if (record_trace) {
    walk.trace.reserve(n_max + 1);
    walk.trace.push_back(start);
  }
  FoliationPoint p = start;
  std::size_t below = 0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    p.tau += drift_tau + step_std.tau * rng.normal();
    p.s += drift_s + step_std.s * rng.normal();
    if (record_trace) walk.trace.push_back(p);
    if (p.s <= start.s) ++below;
    if (p.s <= detect_s) {
      walk.detections.push_back({n, p.tau});
      p.s = start.s;
    }
  }
  walk.fraction_s_below_start = n_max == 0 ? 0.0 : static_cast<double>(below) / static_cast<double>(n_max);
  return walk;
}

std::vector<double> detection_residuals(const ReducedWalk& walk, double start_tau, double drift_tau,
                                        double std_tau) {
  if (!(std_tau > 0.0)) raise(ErrorKind::InvalidArgument, "std_tau must be positive");
  std::vector<double> out;
  out.reserve(walk.detections.size());
  std::size_t prev_step = 0;
  double prev_tau = start_tau;
  for (const auto& d : walk.detections) {
    const auto dn = static_cast<double>(d.step - prev_step);
    out.push_back((d.tau - prev_tau - drift_tau * dn) / (std_tau * std::sqrt(dn)));
    prev_step = d.step;
    prev_tau = d.tau;
  }
  return out;
}

std::uint64_t sparre_andersen_inverse(double u) {
  if (!(u > 0.0 && u <= 1.0)) raise(ErrorKind::InvalidArgument, "u must lie in (0, 1]");
  const double guess = std::min(1e18, 1.0 / (std::numbers::pi * u * u) - 0.25);
  auto n = static_cast<std::uint64_t>(std::max(1.0, std::floor(guess)));
  while (sparre_andersen_exact(n) >= u) ++n;
  while (n > 1 && sparre_andersen_exact(n - 1) < u) --n;
  return n;
}

RenewalStats renewal_cycle(const RenewalConfig& cfg, std::size_t n_cycles, RandomStream& rng) {
  if (cfg.d_a.si() < 0.0 || !(cfg.step.si() > 0.0)) {
    raise(ErrorKind::InvalidArgument, "renewal needs D_a >= 0 and a positive step");
  }
  const auto cap = estimates::return_time(cfg.truncation_quantile, cfg.step);
  RenewalStats out;
  out.truncation_steps = cap.n_steps;
  out.typical_displacement = estimates::displacement_per_cycle(cfg.d_a, cap.duration).si();
  out.return_steps.reserve(n_cycles);
  out.displacements.reserve(n_cycles);
  out.cumulative_deviation.reserve(n_cycles);
  double total = 0.0;
  for (std::size_t i = 0; i < n_cycles; ++i) {
    std::uint64_t n = sparre_andersen_inverse(rng.uniform());
    if (n > cap.n_steps) {
      n = cap.n_steps;
      ++out.truncated;
    }
    const double spread = std::sqrt(cfg.d_a.si() * static_cast<double>(n) * cfg.step.si());
    const double d = spread * rng.normal();
    total += d;
    out.return_steps.push_back(n);
    out.displacements.push_back(d);
    out.cumulative_deviation.push_back(total);
  }
  return out;
}

RenewalStats renewal_cycle(const estimates::EnvironmentParams& env, std::size_t n_cycles, RandomStream& rng) {
  const auto report = estimates::compute_estimates(env);
  return renewal_cycle(RenewalConfig{report.d_a, env.step, env.return_confidence}, n_cycles, rng);
}

void write_trace_csv(std::ostream& out, std::span<const FoliationPoint> trace) {
  const auto old = out.precision(17);
  out << "step,tau,s\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << i << ',' << trace[i].tau << ',' << trace[i].s << '\n';
  }
  out.precision(old);
}

void write_survival_csv(std::ostream& out, const SurvivalReport& report) {
  const auto old = out.precision(17);
  out << "n,empirical,exact\n";
  for (std::size_t i = 0; i < report.n_values.size(); ++i) {
    out << report.n_values[i] << ',' << report.empirical_survival[i] << ',' << report.exact_survival[i] << '\n';
  }
  out.precision(old);
}

}  // namespace rmq
