// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "formtherm/evaluation.hpp"

#include "formtherm/csv.hpp"
#include "formtherm/error.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <random>
#include <sstream>

namespace formtherm {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

CriterionResult make(int id, const char* title) {
  CriterionResult r;
  r.id = id;
  r.title = title;
  return r;
}

void note(CriterionResult& r, const std::string& text) {
  if (!r.detail.empty()) r.detail += "; ";
  r.detail += text;
}

double peak(const Eigen::VectorXd& v) { return v.size() ? v.maxCoeff() : 0.0; }

bool same_inputs(const ProcessInputs& a, const ProcessInputs& b) {
  return a.t_aust_avg == b.t_aust_avg && a.v_punch == b.v_punch && a.t_hold == b.t_hold;
}

}  // namespace

// ---------------------------------------------------------------------------

struct EvaluationContext::State {
  std::optional<FullOrderSystem> system;
  std::vector<FomRun> runs;
  std::size_t supporting = 0;
  bool have_runs = false;
  std::optional<RomArtifacts> rom;
  double snapshot_seconds = 0.0;
  double reduction_seconds = 0.0;
};

EvaluationContext::EvaluationContext(const ExperimentConfig& config)
    : config_(config), state_(std::make_unique<State>()) {
  state_->system.emplace(make_system(config.scenario));
}

EvaluationContext::~EvaluationContext() = default;

const FullOrderSystem& EvaluationContext::system() const { return *state_->system; }

const std::vector<FomRun>& EvaluationContext::snapshot_runs() {
  if (!state_->have_runs) {
    const auto t0 = Clock::now();
    const std::vector<RunSpec> specs = snapshot_specs(config_, state_->supporting);
    state_->runs = run_fom_batch(system(), config_.scenario.scenario, specs, config_.threads);
    state_->snapshot_seconds = seconds_since(t0);
    state_->have_runs = true;
  }
  return state_->runs;
}

const FomRun& EvaluationContext::supporting() {
  snapshot_runs();
  return state_->runs[state_->supporting];
}

const RomArtifacts& EvaluationContext::rom() {
  if (!state_->rom) {
    const auto& runs = snapshot_runs();
    const auto t0 = Clock::now();
    state_->rom.emplace(reduce(system(), config_.scenario.scenario.sensors, runs, supporting(), config_.rom));
    state_->reduction_seconds = seconds_since(t0);
  }
  return *state_->rom;
}

double EvaluationContext::snapshot_seconds() {
  snapshot_runs();
  return state_->snapshot_seconds;
}

double EvaluationContext::reduction_seconds() {
  rom();
  return state_->reduction_seconds;
}

// ---------------------------------------------------------------------------

CriterionResult criterion_pod_energy(EvaluationContext& ctx) {
  CriterionResult res = make(1, "POD energy ratio and offline cost");
  const RomArtifacts& rom = ctx.rom();
  const Eigen::VectorXd curve = energy_curve(rom.basis.singular_values, EnergyNorm::kSigma);
  bool monotone = true;
  for (Index i = 1; i < curve.size(); ++i) monotone = monotone && curve[i] >= curve[i - 1];
  const double last = curve.size() ? curve[curve.size() - 1] : 0.0;
  const Index r = std::min<Index>(30, curve.size());
  const double e30 = r > 0 ? curve[r - 1] : 0.0;
  const double offline = ctx.snapshot_seconds() + ctx.reduction_seconds();

  res.passed = monotone && std::abs(last - 1.0) <= 1e-12 && e30 >= 0.99 && offline < 600.0;
  res.metrics = {{"energy_r30", e30}, {"energy_last", last}, {"offline_seconds", offline},
                 {"snapshots", static_cast<double>(curve.size())}};
  note(res, "epsilon(30) = " + fmt(e30));
  note(res, std::string("monotone ") + (monotone ? "yes" : "no"));
  note(res, "epsilon(l) - 1 = " + fmt(last - 1.0));
  note(res, "offline " + fmt(offline) + " s");
  return res;
}

CriterionResult criterion_rom_error(EvaluationContext& ctx) {
  CriterionResult res = make(2, "LTV ROM error against the FOM");
  const ExperimentConfig& cfg = ctx.config();
  const RomArtifacts& rom = ctx.rom();
  const FomRun& sup = ctx.supporting();
  const Eigen::VectorXd& volume = cfg.scenario.scenario.mesh.lumped_volume;

  // Error curves along the supporting run for increasing rank.
  std::vector<Index> ranks = cfg.rom.ranks;
  std::sort(ranks.begin(), ranks.end());
  ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
  std::vector<double> peaks;
  for (Index r : ranks) {
    const Index rr = std::min(r, rom.basis.rank());
    const LtvSchedule sched = truncate_schedule(rom.schedule, rr);
    const Eigen::MatrixXd phi = rom.basis.phi.leftCols(rr);
    const ReducedTrajectory traj = simulate_rom(sched, sup.run.grid, phi.transpose() * sup.states[0], sup.spec.disturbance);
    peaks.push_back(peak(rmse_curve(phi, traj, sup.states, volume)));
    res.metrics.emplace_back("peak_rmse_r" + std::to_string(rr), peaks.back());
  }
  bool monotone = true;
  for (std::size_t i = 1; i < peaks.size(); ++i) monotone = monotone && peaks[i] <= peaks[i - 1];

  // Full-rank ROM of the supporting snapshots reproduces the supporting run.
  std::vector<SnapshotRun> only{{sup.spec.id, sup.spec.inputs, sup.spec.description, &sup.states}};
  const SnapshotMatrix q = collect_snapshots(only, 1);
  const ThinSvd svd = thin_svd(q.columns);
  const Index full = numerical_rank(svd.sigma, q.rows(), q.size());
  const Eigen::MatrixXd phi_full = svd.u.leftCols(full);
  const ReducedSystem reduced(ctx.system(), phi_full, cfg.scenario.scenario.sensors);
  const ReducedTrajectory traj_full =
      simulate_galerkin(reduced, sup.run, phi_full.transpose() * sup.states[0], sup.spec.disturbance, &sup.states);
  const double full_peak = peak(rmse_curve(phi_full, traj_full, sup.states, volume));
  res.metrics.emplace_back("peak_rmse_full_rank", full_peak);
  res.metrics.emplace_back("full_rank", static_cast<double>(full));

  // Off-nominal run: bounded, larger than on the supporting run.
  const ProcessInputs& ref = cfg.supporting();
  const FomRun* off = nullptr;
  for (const auto& run : ctx.snapshot_runs())
    if (run.spec.disturbance.empty() && run.spec.inputs.t_aust_avg > ref.t_aust_avg &&
        run.spec.inputs.v_punch == ref.v_punch && run.spec.inputs.t_hold == ref.t_hold && !same_inputs(run.spec.inputs, ref))
      if (!off || run.spec.inputs.t_aust_avg > off->spec.inputs.t_aust_avg) off = &run;
  bool off_ok = false;
  if (off) {
    const Index r = std::min(rom.estimator_rank, rom.basis.rank());
    const LtvSchedule sched = truncate_schedule(rom.schedule, r);
    const Eigen::MatrixXd phi = rom.basis.phi.leftCols(r);
    const ReducedTrajectory traj = simulate_rom(sched, off->run.grid, phi.transpose() * off->states[0], off->spec.disturbance);
    const double off_peak = peak(rmse_curve(phi, traj, off->states, volume));
    const ReducedTrajectory nom = simulate_rom(sched, sup.run.grid, phi.transpose() * sup.states[0], sup.spec.disturbance);
    const double nom_peak = peak(rmse_curve(phi, nom, sup.states, volume));
    off_ok = std::isfinite(off_peak) && off_peak < 1.0e3 && off_peak > nom_peak;
    res.metrics.emplace_back("off_nominal_peak_rmse", off_peak);
    res.metrics.emplace_back("nominal_peak_rmse", nom_peak);
    note(res, off->spec.id + " peak " + fmt(off_peak) + " K vs nominal " + fmt(nom_peak) + " K");
  } else {
    note(res, "no off-nominal sweep run with higher T_aust");
  }

  res.passed = monotone && full_peak <= 0.5 && off_ok;
  std::string p = "peaks";
  for (std::size_t i = 0; i < peaks.size(); ++i) p += " r" + std::to_string(ranks[i]) + "=" + fmt(peaks[i]);
  note(res, p + (monotone ? " (monotone)" : " (not monotone)"));
  note(res, "r=" + std::to_string(full) + " peak " + fmt(full_peak) + " K");
  return res;
}

namespace {

struct Plant {
  FomRun run;
  Eigen::MatrixXd measurements;
};

Plant simulate_plant(const ExperimentConfig& cfg, const PlantSpec& spec, std::uint64_t seed) {
  const FullOrderSystem system = make_system(cfg.scenario, spec.induced_heat);
  Plant p{run_fom(system, cfg.scenario.scenario, spec.run), {}};
  p.measurements = noisy_readings(p.run.states.readings, cfg.scenario.scenario.sensors.sigma_v, seed);
  return p;
}

EstimationOutcome run_filter(EvaluationContext& ctx, const Plant& plant, bool with_disturbance) {
  const RomArtifacts& rom = ctx.rom();
  const Index r = std::min(rom.estimator_rank, rom.basis.rank());
  const LtvSchedule sched = truncate_schedule(rom.schedule, r);
  const Eigen::MatrixXd phi = rom.basis.phi.leftCols(r);
  return estimate(sched, phi, plant.run.run.grid, plant.measurements, plant.run.states[0], ctx.config().estimator,
                  with_disturbance, &plant.run.states, ctx.config().scenario.scenario.mesh.lumped_volume);
}

}  // namespace

CriterionResult criterion_known_disturbance(EvaluationContext& ctx, std::uint64_t seed) {
  CriterionResult res = make(3, "estimation with a known disturbance pulse");
  const ExperimentConfig& cfg = ctx.config();
  const EvaluationSpec& ev = cfg.evaluation;
  const Plant plant = simulate_plant(cfg, cfg.plant, seed);
  const EstimationOutcome out = run_filter(ctx, plant, true);
  const TimeGrid& grid = plant.run.run.grid;

  const double max_rmse = peak(out.rmse);
  // Plateau over the second half of the pulse.
  const double from = ev.pulse_start + 0.5 * (ev.pulse_end - ev.pulse_start);
  double sum = 0.0;
  int count = 0;
  for (Index k = 0; k < out.disturbance.rows(); ++k) {
    const double t = grid.time(k);
    if (t >= from && t <= ev.pulse_end) {
      sum += out.disturbance(k, 0);
      ++count;
    }
  }
  const double plateau = count ? sum / count : 0.0;
  const bool plateau_ok = count > 0 && std::abs(plateau - ev.pulse_value) <= 0.25 * std::abs(ev.pulse_value);

  // Onset: below half the plateau at the pulse start, crossing afterwards.
  double at_start = std::numeric_limits<double>::quiet_NaN();
  double crossing = std::numeric_limits<double>::quiet_NaN();
  for (Index k = 0; k < out.disturbance.rows(); ++k) {
    const double t = grid.time(k);
    if (t <= ev.pulse_start) at_start = out.disturbance(k, 0);
    if (t > ev.pulse_start && std::isnan(crossing) && out.disturbance(k, 0) >= 0.5 * plateau) crossing = t;
  }
  const bool onset_ok = at_start < 0.5 * plateau && crossing > ev.pulse_start;

  res.passed = max_rmse <= 20.0 && plateau_ok && onset_ok;
  res.metrics = {{"max_rmse", max_rmse},
                 {"d_plateau", plateau},
                 {"d_at_pulse_start", at_start},
                 {"onset_delay", crossing - ev.pulse_start},
                 {"jitter_count", static_cast<double>(out.filter.jitter_count)}};
  note(res, "max RMSE " + fmt(max_rmse) + " K");
  note(res, "d-hat plateau " + fmt(plateau) + " (true " + fmt(ev.pulse_value) + ")");
  note(res, "half-plateau reached " + fmt(crossing - ev.pulse_start) + " s after onset");
  return res;
}

CriterionResult criterion_disturbance_benefit(EvaluationContext& ctx, std::uint64_t seed) {
  CriterionResult res = make(4, "disturbance estimation under unmodelled latent heat");
  const ExperimentConfig& cfg = ctx.config();
  if (!cfg.evaluation.latent_plant || !cfg.evaluation.latent_plant->induced_heat) {
    note(res, "experiment defines no latent-heat plant");
    return res;
  }
  const PlantSpec& spec = *cfg.evaluation.latent_plant;
  const Plant plant = simulate_plant(cfg, spec, seed);
  const EstimationOutcome with = run_filter(ctx, plant, true);
  const EstimationOutcome without = run_filter(ctx, plant, false);

  // Window: time points where the source is active somewhere.
  MaterialModel mat = cfg.scenario.material;
  mat.induced_heat = *spec.induced_heat;
  double win_with = 0.0, win_without = 0.0;
  Index active = 0;
  for (Index k = 0; k < with.rmse.size(); ++k) {
    const Eigen::VectorXd& q = plant.run.states[k];
    bool on = false;
    for (Index i = 0; i < q.size() && !on; ++i) on = material_eval(mat, q[i]).induced_heat > 0.0;
    if (!on) continue;
    ++active;
    win_with = std::max(win_with, with.rmse[k]);
    win_without = std::max(win_without, without.rmse[k]);
  }
  const double reduction = win_without > 0.0 ? 1.0 - win_with / win_without : 0.0;
  const double max_with = peak(with.rmse);
  const double max_without = peak(without.rmse);

  res.passed = active > 0 && reduction >= 0.2 && max_with <= max_without;
  res.metrics = {{"window_points", static_cast<double>(active)},
                 {"window_max_rmse_with", win_with},
                 {"window_max_rmse_without", win_without},
                 {"window_reduction", reduction},
                 {"max_rmse_with", max_with},
                 {"max_rmse_without", max_without}};
  note(res, "window peak " + fmt(win_with) + " K vs " + fmt(win_without) + " K (" + fmt(100.0 * reduction) +
                " % lower)");
  note(res, "overall " + fmt(max_with) + " K vs " + fmt(max_without) + " K");
  return res;
}

CriterionResult criterion_speedup(const ExperimentConfig& config) {
  CriterionResult res = make(5, "online ROM speed-up over the FOM");
  const EvaluationSpec& ev = config.evaluation;
  const ScenarioConfig sc = ev.speed_scenario.empty() ? config.scenario : load_scenario_config(ev.speed_scenario);
  const FullOrderSystem system = make_system(sc);
  const Scenario& scenario = sc.scenario;
  RunSpec spec;
  spec.id = "speed";
  spec.inputs = scenario.reference;
  const int repeats = std::max(1, ev.speed_repeats);

  FomRun sup;
  std::vector<double> fom_times;
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = Clock::now();
    sup = run_fom(system, scenario, spec);
    fom_times.push_back(seconds_since(t0));
  }

  std::vector<SnapshotRun> runs{{sup.spec.id, sup.spec.inputs, sup.spec.description, &sup.states}};
  const PodBasis basis = pod_basis(collect_snapshots(runs, 1), BasisRule::fixed(ev.speed_rank));
  const ReducedSystem rom(system, basis.phi, scenario.sensors);
  const LtvSchedule schedule = build_ltv_schedule(rom, sup.run, sup.states, sup.spec.id);

  std::vector<double> rom_times;
  const Eigen::VectorXd x0 = basis.phi.transpose() * sup.states[0];
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = Clock::now();
    const ReducedTrajectory traj = simulate_rom(schedule, sup.run.grid, x0, sup.spec.disturbance);
    rom_times.push_back(seconds_since(t0));
    if (traj.size() != sup.states.size()) throw NumericalError("ROM run ended early");
  }
  const double tf = median(fom_times);
  const double tr = std::max(median(rom_times), 1e-9);
  const double ratio = tf / tr;
  res.passed = ratio >= 100.0;
  res.metrics = {{"nodes", static_cast<double>(system.size())},
                 {"rank", static_cast<double>(basis.rank())},
                 {"fom_seconds", tf},
                 {"rom_seconds", tr},
                 {"speedup", ratio}};
  note(res, "n = " + std::to_string(system.size()) + ", r = " + std::to_string(basis.rank()));
  note(res, "FOM " + fmt(tf) + " s, ROM " + fmt(tr) + " s, ratio " + fmt(ratio));
  return res;
}

// ---------------------------------------------------------------------------
// Library oracle suites.

namespace {

Scenario small_scenario(double resolution) {
  Scenario sc;
  sc.resolution = resolution;
  sc.phase_template = hole_flanging_template();
  sc.sensors.positions = {Eigen::Vector3d(0.11, 0.0, 0.0)};
  sc.sensors.max_distance = 0.05;
  build_mesh(sc);
  return sc;
}

ParameterSlice free_slice(Index n, double t_inf) {
  ParameterSlice p = ParameterSlice::zeros(n);
  p.tool_distance.setConstant(0.01);
  p.contact_temperature.setConstant(t_inf);
  return p;
}

}  // namespace

CriterionResult criterion_fom_oracles() {
  CriterionResult res = make(6, "FOM analytic oracles");
  const Mesh mesh = build_sheet_mesh({0.1, 0.02, 0.002}, 0.01);
  const Index n = mesh.node_count();
  const Eigen::VectorXd none = Eigen::VectorXd::Zero(1);

  // Adiabatic: total heat content is conserved.
  double drift = 0.0;
  {
    FilmModel film;
    film.contact_h0 = film.contact_h_per_pa = film.convection = film.emissivity = 0.0;
    film.rim_exchange = false;
    const FullOrderSystem sys(mesh, MaterialModel::constant(7700.0, 500.0, 25.0), film);
    const ParameterSlice p = free_slice(n, 300.0);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(800.0, 1000.0);
    Eigen::VectorXd q(n);
    for (Index i = 0; i < n; ++i) q[i] = u(rng);
    FomStepper stepper(sys);
    const Eigen::VectorXd m = sys.assemble(q, p).mass;
    const double e0 = m.dot(q);
    for (int k = 0; k < 50; ++k) {
      q = stepper.step(q, p, 0.05, none);
      drift = std::max(drift, std::abs(m.dot(q) - e0) / e0);
    }
  }

  // Uniform Newton cooling of a body without gradients.
  double cooling = 0.0;
  {
    FilmModel film;
    film.convection = 50.0;
    film.emissivity = 0.0;
    film.rim_exchange = false;
    const double rho = 7700.0, cp = 500.0, s = 0.002, h = 50.0, t_inf = 300.0, t0 = 1000.0;
    const FullOrderSystem sys(mesh, MaterialModel::constant(rho, cp, 25.0), film);
    const ParameterSlice p = free_slice(n, t_inf);
    Eigen::VectorXd q = Eigen::VectorXd::Constant(n, t0);
    FomStepper stepper(sys);
    const double dt = 0.1;
    const double a = 2.0 * h / (rho * cp * s);
    for (int k = 1; k <= 600; ++k) {
      q = stepper.step(q, p, dt, none);
      const double exact = t_inf + (t0 - t_inf) * std::exp(-a * dt * k);
      cooling = std::max(cooling, (q.array() - exact).abs().maxCoeff() / (exact - t_inf));
    }
  }

  // Comparison principle on a coarse forming run.
  double overshoot = 0.0;
  {
    const Scenario sc = small_scenario(0.03);
    const FullOrderSystem sys(sc.mesh, MaterialModel::stainless_default(), FilmModel{});
    const ScenarioRun run = realize(sc, sc.reference);
    const StateTrajectory traj = simulate_fom(sys, run, sc.sensors, DisturbanceSignal(1));
    double lo = sc.reference.t_aust_avg, hi = lo;
    for (const auto& s : run.parameters.slices) {
      lo = std::min(lo, s.contact_temperature.minCoeff());
      hi = std::max(hi, s.contact_temperature.maxCoeff());
    }
    for (const auto& q : traj.temperatures)
      overshoot = std::max({overshoot, q.maxCoeff() - hi, lo - q.minCoeff()});
  }

  // A constant source equals the same power injected through E d.
  double source = 0.0;
  {
    const double g0 = 5.0e5;
    MaterialModel with = MaterialModel::constant(7700.0, 500.0, 25.0);
    with.induced_heat = PiecewiseLinear::constant(g0);
    DisturbanceModel all;
    all.regions = {DisturbanceRegion::all()};
    const FullOrderSystem a(mesh, with, FilmModel{});
    const FullOrderSystem b(mesh, MaterialModel::constant(7700.0, 500.0, 25.0), FilmModel{}, all);
    const ParameterSlice p = free_slice(n, 300.0);
    Eigen::VectorXd qa = Eigen::VectorXd::Constant(n, 900.0), qb = qa;
    FomStepper sa(a), sb(b);
    const Eigen::VectorXd d = Eigen::VectorXd::Constant(1, g0);
    for (int k = 0; k < 40; ++k) {
      qa = sa.step(qa, p, 0.05, none);
      qb = sb.step(qb, p, 0.05, d);
      source = std::max(source, (qa - qb).cwiseAbs().maxCoeff() / qa.cwiseAbs().maxCoeff());
    }
  }

  res.passed = drift <= 1e-8 && cooling <= 5e-3 && overshoot <= 1e-9 && source <= 1e-8;
  res.metrics = {{"adiabatic_drift", drift}, {"cooling_error", cooling}, {"bound_violation", overshoot},
                 {"source_mismatch", source}};
  note(res, "energy drift " + fmt(drift));
  note(res, "cooling error " + fmt(cooling));
  note(res, "bound violation " + fmt(overshoot) + " K");
  note(res, "source mismatch " + fmt(source));
  return res;
}

CriterionResult criterion_filter_oracles() {
  CriterionResult res = make(7, "filter oracles");

  // Scalar Kalman recursion.
  double scalar = 0.0;
  {
    const double a = 0.95, c = 0.3, g = 0.5, q = 0.2, r = 0.5;
    const Index steps = 50;
    std::vector<AffineStep> st(steps, AffineStep{Eigen::MatrixXd::Constant(1, 1, a), Eigen::VectorXd::Constant(1, c),
                                                 Eigen::MatrixXd::Constant(1, 1, g), Eigen::MatrixXd::Zero(1, 0)});
    const AffineModel model(st, std::vector<Eigen::MatrixXd>(steps + 1, Eigen::MatrixXd::Ones(1, 1)));
    Eigen::MatrixXd y(steps + 1, 1);
    for (Index k = 0; k <= steps; ++k) y(k, 0) = 5.0 + std::sin(0.7 * static_cast<double>(k));
    NoiseConfig noise{Eigen::MatrixXd::Constant(1, 1, q), Eigen::MatrixXd::Constant(1, 1, r), {}};
    const EstimatorResult out =
        run_estimator(model, y, noise, Eigen::VectorXd::Constant(1, 1.0), Eigen::MatrixXd::Constant(1, 1, 2.0));
    double x = 1.0, p = 2.0;
    for (Index k = 1; k <= steps; ++k) {
      const double xm = a * x + c, pm = a * a * p + g * g * q;
      const double gain = pm / (pm + r);
      x = xm + gain * (y(k, 0) - xm);
      p = (1.0 - gain) * pm;
      scalar = std::max({scalar, std::abs(out.states[k][0] - x) / std::max(1.0, std::abs(x)),
                         std::abs(out.covariances[k](0, 0) - p) / std::max(1.0, p)});
    }
  }

  // Noise-free data from the model itself: innovations vanish.
  double innovation = 0.0;
  double sym = 0.0, min_eig = 1.0;
  {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Index n = 4, m = 2, steps = 60;
    std::vector<AffineStep> st;
    std::vector<Eigen::MatrixXd> outs;
    for (Index k = 0; k < steps; ++k) {
      AffineStep s;
      s.a = 0.9 * Eigen::MatrixXd::Identity(n, n);
      s.c = Eigen::VectorXd(n);
      for (Index i = 0; i < n; ++i) {
        s.c[i] = u(rng);
        for (Index j = 0; j < n; ++j) s.a(i, j) += 0.05 * u(rng);
      }
      s.g = Eigen::MatrixXd::Identity(n, n);
      s.b_d = Eigen::MatrixXd::Zero(n, 0);
      st.push_back(s);
    }
    for (Index k = 0; k <= steps; ++k) {
      Eigen::MatrixXd c(m, n);
      for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j) c(i, j) = u(rng);
      outs.push_back(c);
    }
    const AffineModel model(st, outs);
    Eigen::VectorXd x(n);
    for (Index i = 0; i < n; ++i) x[i] = 10.0 * u(rng);
    const Eigen::VectorXd x0 = x;
    Eigen::MatrixXd y(steps + 1, m);
    for (Index k = 0; k <= steps; ++k) {
      y.row(k) = (outs[k] * x).transpose();
      if (k < steps) x = model.propagate(k, x);
    }
    const NoiseConfig noise = NoiseConfig::diagonal(n, 0.5, m, 0.1, 0, 0.0);
    const EstimatorResult out = run_estimator(model, y, noise, x0, 3.0 * Eigen::MatrixXd::Identity(n, n));
    innovation = out.innovations.cwiseAbs().maxCoeff() / std::max(1.0, y.cwiseAbs().maxCoeff());
    for (std::size_t k = 0; k < out.symmetry_error.size(); ++k) {
      sym = std::max(sym, out.symmetry_error[k]);
      min_eig = std::min(min_eig, out.min_eigenvalue[k]);
    }

    // Finite differences reproduce the affine Jacobian.
    double fd = 0.0;
    for (Index k : {Index{0}, steps / 2, steps - 1}) {
      const Eigen::MatrixXd j = finite_difference_jacobian([&](const Eigen::VectorXd& v) { return model.propagate(k, v); }, x0);
      fd = std::max(fd, (j - model.at(k).a).cwiseAbs().maxCoeff() / model.at(k).a.cwiseAbs().maxCoeff());
    }
    res.metrics.emplace_back("fd_jacobian_error", fd);
    note(res, "FD Jacobian error " + fmt(fd));
    res.passed = fd <= 1e-5;
  }

  res.passed = res.passed && scalar <= 1e-10 && innovation <= 1e-9 && sym <= 1e-10 && min_eig >= -1e-8;
  res.metrics.emplace_back("scalar_kalman_error", scalar);
  res.metrics.emplace_back("noise_free_innovation", innovation);
  res.metrics.emplace_back("symmetry_error", sym);
  res.metrics.emplace_back("min_eigenvalue", min_eig);
  note(res, "scalar recursion " + fmt(scalar));
  note(res, "noise-free innovation " + fmt(innovation));
  note(res, "asymmetry " + fmt(sym) + ", min eigenvalue " + fmt(min_eig));
  return res;
}

CriterionResult criterion_pod_oracles() {
  CriterionResult res = make(8, "POD oracles");
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01(0.0, 1.0);
  auto random = [&](Index r, Index c) {
    Eigen::MatrixXd m(r, c);
    for (Index j = 0; j < c; ++j)
      for (Index i = 0; i < r; ++i) m(i, j) = n01(rng);
    return m;
  };

  const PodBasis b1 = pod_basis(random(200, 40), BasisRule::fixed(20));
  const double ortho = (b1.phi.transpose() * b1.phi - Eigen::MatrixXd::Identity(20, 20)).cwiseAbs().maxCoeff();

  const Eigen::VectorXd v = random(50, 1).col(0);
  const Eigen::MatrixXd dup = v.replicate(1, 4);
  const PodBasis b2 = pod_basis(dup, BasisRule::threshold(0.99));
  Eigen::VectorXd unit = v.normalized();
  Index big = 0;
  unit.cwiseAbs().maxCoeff(&big);
  if (unit[big] < 0) unit = -unit;
  double rank_one = b2.rank() == 1 ? (b2.phi.col(0) - unit).cwiseAbs().maxCoeff() : 1.0;
  rank_one = std::max(rank_one, b2.singular_values.tail(3).maxCoeff() / b2.singular_values[0]);

  const Eigen::MatrixXd q = random(20, 6);
  const PodBasis b3 = pod_basis(q, BasisRule::fixed(2));
  const double err = (q - b3.phi * (b3.phi.transpose() * q)).norm();
  const Eigen::JacobiSVD<Eigen::MatrixXd> jac(q);
  const double best = jac.singularValues().tail(4).norm();
  const double eckart = std::abs(err - best) / best;

  res.passed = ortho <= 1e-10 && rank_one <= 1e-12 && eckart <= 1e-10;
  res.metrics = {{"orthonormality", ortho}, {"rank_one_error", rank_one}, {"best_approximation_gap", eckart}};
  note(res, "orthonormality " + fmt(ortho));
  note(res, "rank-one recovery " + fmt(rank_one));
  note(res, "truncation vs best rank-2 " + fmt(eckart));
  return res;
}

namespace {

std::vector<std::pair<std::string, std::string>> read_outputs(const fs::path& dir) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    out.emplace_back(entry.path().filename().string(),
                     std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

CriterionResult criterion_reproducibility(const ExperimentConfig& config, const std::string& work_dir,
                                          std::uint64_t seed) {
  CriterionResult res = make(9, "bitwise reproducibility");
  const std::string path = config.evaluation.reproducibility_experiment;
  const ExperimentConfig small = path.empty() ? config : load_experiment_config(path);
  const fs::path base = work_dir.empty() ? fs::temp_directory_path() / "formtherm_repro" : fs::path(work_dir);
  std::vector<std::vector<std::pair<std::string, std::string>>> outputs;
  for (const char* name : {"a", "b"}) {
    const fs::path dir = base / name;
    fs::remove_all(dir);
    cmd_simulate(small, dir.string(), seed);
    cmd_estimate(small, dir.string(), seed, EstimateOptions{});
    outputs.push_back(read_outputs(dir));
  }
  std::size_t differing = 0;
  if (outputs[0].size() != outputs[1].size()) {
    differing = std::max(outputs[0].size(), outputs[1].size());
  } else {
    for (std::size_t i = 0; i < outputs[0].size(); ++i)
      if (outputs[0][i] != outputs[1][i]) {
        ++differing;
        note(res, outputs[0][i].first + " differs");
      }
  }
  res.passed = !outputs[0].empty() && differing == 0;
  res.metrics = {{"files", static_cast<double>(outputs[0].size())}, {"differing", static_cast<double>(differing)}};
  note(res, std::to_string(outputs[0].size()) + " files compared");
  return res;
}

// ---------------------------------------------------------------------------

std::vector<CriterionResult> evaluate(const ExperimentConfig& config, const EvaluationOptions& options) {
  std::vector<int> ids = options.criteria;
  if (ids.empty()) ids = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  EvaluationContext ctx(config);
  std::vector<CriterionResult> out;
  for (int id : ids) {
    switch (id) {
      case 1: out.push_back(criterion_pod_energy(ctx)); break;
      case 2: out.push_back(criterion_rom_error(ctx)); break;
      case 3: out.push_back(criterion_known_disturbance(ctx, options.seed)); break;
      case 4: out.push_back(criterion_disturbance_benefit(ctx, options.seed)); break;
      case 5: out.push_back(criterion_speedup(config)); break;
      case 6: out.push_back(criterion_fom_oracles()); break;
      case 7: out.push_back(criterion_filter_oracles()); break;
      case 8: out.push_back(criterion_pod_oracles()); break;
      case 9: {
        const std::string dir = options.work_dir.empty() ? "" : (fs::path(options.work_dir) / "reproducibility").string();
        out.push_back(criterion_reproducibility(config, dir, options.seed));
        break;
      }
      default: throw ValidationError("unknown criterion " + std::to_string(id));
    }
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  return "criterion " + std::to_string(r.id) + ": " + (r.passed ? "PASS" : "FAIL") + "  " + r.title + "  (" +
         r.detail + ")";
}

void write_report(const std::string& path, const std::vector<CriterionResult>& results) {
  CsvWriter csv(path, {"acceptance evaluation"}, {"criterion", "passed", "metric", "value"});
  for (const auto& r : results)
    for (const auto& [name, value] : r.metrics)
      csv.row({std::to_string(r.id), r.passed ? "1" : "0", name}, std::vector<double>{value});
  csv.close();
}

}  // namespace formtherm
