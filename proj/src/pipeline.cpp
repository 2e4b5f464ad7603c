// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "formtherm/pipeline.hpp"

#include "formtherm/csv.hpp"
#include "formtherm/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <random>
#include <thread>

namespace formtherm {

namespace fs = std::filesystem;

FullOrderSystem make_system(const ScenarioConfig& config, const std::optional<PiecewiseLinear>& induced_heat) {
  MaterialModel material = config.material;
  if (induced_heat) material.induced_heat = *induced_heat;
  return FullOrderSystem(config.scenario.mesh, material, config.film, config.disturbance);
}

FomRun run_fom(const FullOrderSystem& system, const Scenario& scenario, const RunSpec& spec) {
  FomRun out;
  out.spec = spec;
  if (out.spec.disturbance.empty()) out.spec.disturbance = DisturbanceSignal(system.disturbance().size());
  out.run = realize(scenario, spec.inputs);
  out.states = simulate_fom(system, out.run, scenario.sensors, out.spec.disturbance);
  return out;
}

std::vector<FomRun> run_fom_batch(const FullOrderSystem& system, const Scenario& scenario,
                                  const std::vector<RunSpec>& specs, unsigned threads) {
  std::vector<FomRun> out(specs.size());
  std::vector<std::exception_ptr> errors(specs.size());
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(specs.size(), 1)));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      try {
        out[i] = run_fom(system, scenario, specs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

RomArtifacts reduce(const FullOrderSystem& system, const SensorConfig& sensors, const std::vector<FomRun>& runs,
                    const FomRun& supporting, const RomSpec& spec) {
  std::vector<SnapshotRun> snap;
  snap.reserve(runs.size());
  for (const auto& r : runs) snap.push_back({r.spec.id, r.spec.inputs, r.spec.description, &r.states});
  PodBasis basis;
  Index estimator_rank = 0;
  {
    const SnapshotMatrix q = collect_snapshots(snap, spec.stride);
    Index needed = spec.ranks.empty() ? 1 : *std::max_element(spec.ranks.begin(), spec.ranks.end());
    if (spec.rule.rank) {
      estimator_rank = *spec.rule.rank;
    } else {
      const PodBasis probe = pod_basis(q, spec.rule);
      estimator_rank = probe.rank();
    }
    needed = std::max(needed, estimator_rank);
    basis = pod_basis(q, BasisRule{needed, spec.rule.energy, spec.rule.norm});
  }
  RomArtifacts out;
  out.estimator_rank = std::min(estimator_rank, basis.rank());
  const ReducedSystem rom(system, basis.phi, sensors);
  out.schedule = build_ltv_schedule(rom, supporting.run, supporting.states, supporting.spec.id);
  out.basis = std::move(basis);
  return out;
}

LtvSchedule truncate_schedule(const LtvSchedule& schedule, Index r) {
  if (r < 1 || r > schedule.rank())
    throw ValidationError("cannot truncate a rank-" + std::to_string(schedule.rank()) + " schedule to " + std::to_string(r));
  LtvSchedule out;
  out.supporting_id = schedule.supporting_id;
  out.step_sizes = schedule.step_sizes;
  out.entries.reserve(schedule.entries.size());
  for (const auto& e : schedule.entries) {
    ReducedMatrices t;
    t.mass = e.mass.topLeftCorner(r, r);
    t.stiffness = e.stiffness.topLeftCorner(r, r);
    t.load = e.load.head(r);
    t.disturbance = e.disturbance.topRows(r);
    t.output = e.output.leftCols(r);
    out.entries.push_back(std::move(t));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(out.entries.back().mass, Eigen::EigenvaluesOnly);
    out.mass_condition.push_back(eig.eigenvalues().maxCoeff() / eig.eigenvalues().minCoeff());
  }
  return out;
}

Eigen::MatrixXd noisy_readings(const Eigen::MatrixXd& clean, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw ValidationError("noise standard deviation must be non-negative");
  Eigen::MatrixXd y = clean;
  if (sigma == 0.0) return y;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  for (Index k = 0; k < y.rows(); ++k)
    for (Index j = 0; j < y.cols(); ++j) y(k, j) += sigma * n01(rng);
  return y;
}

EstimationOutcome estimate(const LtvSchedule& schedule, const Eigen::MatrixXd& phi, const TimeGrid& grid,
                           const Eigen::MatrixXd& measurements, const Eigen::VectorXd& q0, const EstimatorSpec& spec,
                           bool with_disturbance, const StateTrajectory* reference, const Eigen::VectorXd& volume) {
  const Index r = schedule.rank();
  const Index m = schedule.outputs();
  const Index nd = schedule.disturbances();
  if (phi.cols() != r) throw ValidationError("basis and schedule ranks differ");
  AffineModel base = discretize(schedule, grid);
  const NoiseConfig noise = NoiseConfig::diagonal(r, spec.q_w, m, spec.r_v, nd, spec.q_d);
  const EkfOptions options{spec.joseph};

  EstimationOutcome out;
  out.disturbance_estimated = with_disturbance;
  const Eigen::VectorXd xr0 = phi.transpose() * q0;
  if (with_disturbance) {
    const AffineModel model = augment(base);
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(r + nd);
    x0.head(r) = xr0;
    Eigen::MatrixXd p0 = Eigen::MatrixXd::Zero(r + nd, r + nd);
    p0.diagonal().head(r).setConstant(spec.p0);
    p0.diagonal().tail(nd).setConstant(spec.p0_d);
    out.filter = run_estimator(model, measurements, noise, x0, p0, options);
    out.disturbance = out.filter.disturbance(nd);
  } else {
    const Eigen::MatrixXd p0 = spec.p0 * Eigen::MatrixXd::Identity(r, r);
    out.filter = run_estimator(base, measurements, noise, xr0, p0, options);
    out.disturbance = Eigen::MatrixXd::Zero(out.filter.size(), nd);
  }
  out.lifted = lift_estimates(phi, out.filter);
  if (reference) {
    const Index n = std::min<Index>(static_cast<Index>(out.lifted.size()), reference->size());
    out.rmse.resize(n);
    for (Index k = 0; k < n; ++k) out.rmse[k] = rmse(out.lifted[static_cast<std::size_t>(k)], (*reference)[k], volume);
  }
  return out;
}

Eigen::MatrixXd point_history(const std::vector<Eigen::Vector3d>& points, const Mesh& mesh,
                              const ParameterTrajectory& params, const std::vector<Eigen::VectorXd>& states) {
  SensorConfig probe;
  probe.positions = points;
  probe.sigma_v = 0.0;
  probe.max_distance = 0.05;
  const Index n = std::min<Index>(params.size(), static_cast<Index>(states.size()));
  Eigen::MatrixXd out(n, static_cast<Index>(points.size()));
  for (Index k = 0; k < n; ++k)
    out.row(k) = output_matrix(probe, mesh, params[k].displacement).apply(states[static_cast<std::size_t>(k)]).transpose();
  return out;
}

// ---------------------------------------------------------------------------

double CommandSummary::metric(const std::string& name) const {
  for (const auto& [k, v] : metrics)
    if (k == name) return v;
  throw ValidationError("summary has no metric '" + name + "'");
}

std::vector<RunSpec> snapshot_specs(const ExperimentConfig& config, std::size_t& supporting) {
  std::vector<RunSpec> specs = config.sweep.expand();
  const ProcessInputs& ref = config.supporting();
  supporting = specs.size();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& u = specs[i].inputs;
    if (u.t_aust_avg == ref.t_aust_avg && u.v_punch == ref.v_punch && u.t_hold == ref.t_hold) {
      supporting = i;
      break;
    }
  }
  if (supporting == specs.size()) {
    RunSpec s;
    s.id = "supporting";
    s.inputs = ref;
    specs.push_back(s);
  }
  for (const auto& e : config.excitation) specs.push_back(e);
  return specs;
}

Index rank_for(const ExperimentConfig& config, const PodBasis& basis) {
  if (config.rom.rule.rank) return std::min(*config.rom.rule.rank, basis.rank());
  const Eigen::VectorXd curve = energy_curve(basis.singular_values, config.rom.rule.norm);
  Index r = 0;
  while (r < curve.size() && curve[r] < config.rom.rule.energy) ++r;
  return std::min(r + 1, basis.rank());
}

namespace {

std::string prepare(const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ValidationError("cannot create output directory '" + out_dir + "': " + ec.message());
  return out_dir;
}

std::string join(const std::string& dir, const std::string& file) { return (fs::path(dir) / file).string(); }

std::string label(const char* prefix, Index j) { return prefix + std::to_string(j); }

}  // namespace

CommandSummary cmd_simulate(const ExperimentConfig& config, const std::string& out_dir, std::uint64_t seed) {
  prepare(out_dir);
  const Scenario& scenario = config.scenario.scenario;
  const FullOrderSystem system = make_system(config.scenario, config.plant.induced_heat);
  const FomRun plant = run_fom(system, scenario, config.plant.run);

  CommandSummary s;
  s.files = {join(out_dir, "plant_states.ftc"), join(out_dir, "parameters.ftc"), join(out_dir, "sensors.csv")};
  save_state_trajectory(s.files[0], plant.states);
  save_parameter_trajectory(s.files[1], plant.run.parameters);

  const Eigen::MatrixXd& clean = plant.states.readings;
  const Eigen::MatrixXd noisy = noisy_readings(clean, scenario.sensors.sigma_v, seed);
  std::vector<std::string> cols{"step", "phase", "t"};
  for (Index j = 0; j < clean.cols(); ++j) cols.push_back(label("clean_", j));
  for (Index j = 0; j < clean.cols(); ++j) cols.push_back(label("noisy_", j));
  CsvWriter csv(s.files[2],
                {"sensor readings of the full-order plant", "t [s]; clean_j, noisy_j [K]",
                 "noise std [K]: " + format_number(scenario.sensors.sigma_v) + ", seed " + std::to_string(seed)},
                cols);
  std::vector<double> row;
  for (Index k = 0; k < clean.rows(); ++k) {
    row.assign(1, plant.run.grid.time(k));
    for (Index j = 0; j < clean.cols(); ++j) row.push_back(clean(k, j));
    for (Index j = 0; j < clean.cols(); ++j) row.push_back(noisy(k, j));
    const Phase ph = plant.run.grid.phase(std::min(k, plant.run.grid.steps() - 1));
    csv.row({std::to_string(k), to_string(ph)}, row);
  }
  csv.close();
  s.metrics = {{"nodes", static_cast<double>(system.size())},
               {"steps", static_cast<double>(plant.run.grid.steps())},
               {"final_mean_temperature", plant.states.temperatures.back().mean()}};
  return s;
}

CommandSummary cmd_reduce(const ExperimentConfig& config, const std::string& out_dir) {
  prepare(out_dir);
  const Scenario& scenario = config.scenario.scenario;
  const FullOrderSystem system = make_system(config.scenario);
  std::size_t sup = 0;
  const std::vector<RunSpec> specs = snapshot_specs(config, sup);
  const std::vector<FomRun> runs = run_fom_batch(system, scenario, specs, config.threads);
  const RomArtifacts art = reduce(system, scenario.sensors, runs, runs[sup], config.rom);

  CommandSummary s;
  s.warnings = art.basis.warnings;
  s.files = {join(out_dir, "basis.ftc"), join(out_dir, "schedule.ftc"), join(out_dir, "energy.csv"),
             join(out_dir, "rom_error.csv")};
  save_pod_basis(s.files[0], art.basis);
  save_ltv_schedule(s.files[1], art.schedule);

  const Eigen::VectorXd& sigma = art.basis.singular_values;
  const Eigen::VectorXd e1 = energy_curve(sigma, EnergyNorm::kSigma);
  const Eigen::VectorXd e2 = energy_curve(sigma, EnergyNorm::kSigmaSquared);
  {
    CsvWriter csv(s.files[2], {"POD spectrum and energy ratio", "energy: sum of sigma; energy_sq: sum of sigma^2"},
                  {"r", "sigma", "energy", "energy_sq"});
    for (Index i = 0; i < sigma.size(); ++i) csv.row({static_cast<double>(i + 1), sigma[i], e1[i], e2[i]});
    csv.close();
  }

  std::vector<Index> ranks;
  for (Index r : config.rom.ranks) ranks.push_back(std::min(r, art.basis.rank()));
  {
    CsvWriter csv(s.files[3], {"LTV ROM error along each snapshot run", "t [s]; rmse [K]"},
                  {"run", "r", "step", "t", "rmse"});
    for (Index r : ranks) {
      const LtvSchedule sched = truncate_schedule(art.schedule, r);
      const Eigen::MatrixXd phi = art.basis.phi.leftCols(r);
      for (std::size_t i = 0; i < runs.size(); ++i) {
        const FomRun& run = runs[i];
        const ReducedTrajectory rt =
            simulate_rom(sched, run.run.grid, phi.transpose() * run.states[0], run.spec.disturbance);
        const Eigen::VectorXd e = rmse_curve(phi, rt, run.states, scenario.mesh.lumped_volume);
        for (Index k = 0; k < e.size(); ++k)
          csv.row({run.spec.id}, std::vector<double>{static_cast<double>(r), static_cast<double>(k),
                                                     run.run.grid.time(k), e[k]});
        if (i == sup) s.metrics.emplace_back("supporting_peak_rmse_r" + std::to_string(r), e.maxCoeff());
      }
    }
    csv.close();
  }
  s.metrics.emplace_back("nodes", static_cast<double>(system.size()));
  s.metrics.emplace_back("snapshots", static_cast<double>(sigma.size()));
  s.metrics.emplace_back("numerical_rank", static_cast<double>(art.basis.numerical_rank));
  s.metrics.emplace_back("estimator_rank", static_cast<double>(art.estimator_rank));
  s.metrics.emplace_back("energy_at_estimator_rank", e1[art.estimator_rank - 1]);
  return s;
}

CommandSummary cmd_estimate(const ExperimentConfig& config, const std::string& out_dir, std::uint64_t seed,
                            const EstimateOptions& options) {
  prepare(out_dir);
  const Scenario& scenario = config.scenario.scenario;
  CommandSummary s;
  const std::string basis_path = join(out_dir, "basis.ftc");
  const std::string schedule_path = join(out_dir, "schedule.ftc");
  if (!fs::exists(basis_path) || !fs::exists(schedule_path)) {
    const CommandSummary red = cmd_reduce(config, out_dir);
    s.warnings = red.warnings;
  }
  const PodBasis full_basis = load_pod_basis(basis_path);
  const LtvSchedule full_schedule = load_ltv_schedule(schedule_path);
  if (full_basis.state_size() != scenario.mesh.node_count())
    throw ValidationError("persisted basis does not match the scenario mesh");
  const Index r = rank_for(config, full_basis);
  const Eigen::MatrixXd phi = full_basis.phi.leftCols(r);
  const LtvSchedule schedule = truncate_schedule(full_schedule, r);
  const Index nd = schedule.disturbances();

  // Plant.
  ScenarioRun run = realize(scenario, config.plant.run.inputs);
  StateTrajectory truth;
  DisturbanceSignal true_d = config.plant.run.disturbance;
  if (options.plant == "fom") {
    const FullOrderSystem plant_system = make_system(config.scenario, config.plant.induced_heat);
    FomRun plant = run_fom(plant_system, scenario, config.plant.run);
    truth = std::move(plant.states);
    true_d = plant.spec.disturbance;
  } else if (options.plant.rfind("external:", 0) == 0) {
    const std::string path = options.plant.substr(9);
    truth = load_state_trajectory(path, scenario.mesh.node_count(), run.grid.steps() + 1);
    if (truth.readings.rows() == 0) {
      truth.readings.resize(truth.size(), scenario.sensors.count());
      for (Index k = 0; k < truth.size(); ++k)
        truth.readings.row(k) =
            output_matrix(scenario.sensors, scenario.mesh, run.parameters[k].displacement).apply(truth[k]).transpose();
    }
    true_d = DisturbanceSignal(nd);
  } else {
    throw ValidationError("unknown plant '" + options.plant + "' (expected fom or external:PATH)");
  }
  const Eigen::MatrixXd y = noisy_readings(truth.readings, scenario.sensors.sigma_v, seed);
  const Eigen::VectorXd& volume = scenario.mesh.lumped_volume;

  std::vector<EstimationOutcome> outcomes;
  if (options.disturbance_estimation)
    outcomes.push_back(estimate(schedule, phi, run.grid, y, truth[0], config.estimator, true, &truth, volume));
  outcomes.push_back(estimate(schedule, phi, run.grid, y, truth[0], config.estimator, false, &truth, volume));
  const EstimationOutcome& primary = outcomes.front();
  const Index steps = primary.rmse.size();

  s.files = {join(out_dir, "estimate_log.csv"), join(out_dir, "rmse.csv"), join(out_dir, "evaluation_points.csv"),
             join(out_dir, "disturbance.csv"), join(out_dir, "properties.csv"), join(out_dir, "estimate.ftc")};
  {
    std::vector<std::string> cols{"step", "t"};
    for (Index j = 0; j < y.cols(); ++j) cols.push_back(label("innovation_", j));
    cols.push_back("rmse");
    for (Index j = 0; j < nd; ++j) cols.push_back(label("d_hat_", j));
    CsvWriter csv(s.files[0],
                  {"extended Kalman filter log", std::string("disturbance estimation: ") +
                                                     (primary.disturbance_estimated ? "on" : "off"),
                   "t [s]; innovation [K]; rmse [K]; d_hat [disturbance units]"},
                  cols);
    for (Index k = 0; k < steps; ++k) {
      std::vector<double> row{static_cast<double>(k), run.grid.time(k)};
      for (Index j = 0; j < y.cols(); ++j) row.push_back(primary.filter.innovations(k, j));
      row.push_back(primary.rmse[k]);
      for (Index j = 0; j < nd; ++j) row.push_back(primary.disturbance(k, j));
      csv.row(row);
    }
    csv.close();
  }
  {
    std::vector<std::string> cols{"step", "t"};
    if (options.disturbance_estimation) cols.push_back("rmse_with_disturbance");
    cols.push_back("rmse_without_disturbance");
    CsvWriter csv(s.files[1], {"RMSE of the lifted estimate against the plant", "t [s]; rmse [K]"}, cols);
    for (Index k = 0; k < steps; ++k) {
      std::vector<double> row{static_cast<double>(k), run.grid.time(k)};
      for (const auto& o : outcomes) row.push_back(o.rmse[k]);
      csv.row(row);
    }
    csv.close();
  }
  if (!config.evaluation_points.empty()) {
    const Eigen::MatrixXd tp = point_history(config.evaluation_points, scenario.mesh, run.parameters, truth.temperatures);
    const Eigen::MatrixXd ep = point_history(config.evaluation_points, scenario.mesh, run.parameters, primary.lifted);
    std::vector<std::string> cols{"step", "t"};
    for (std::size_t p = 0; p < config.evaluation_points.size(); ++p) {
      cols.push_back("true_" + std::to_string(p));
      cols.push_back("estimate_" + std::to_string(p));
    }
    CsvWriter csv(s.files[2], {"temperatures at the evaluation points", "t [s]; temperatures [K]"}, cols);
    for (Index k = 0; k < ep.rows(); ++k) {
      std::vector<double> row{static_cast<double>(k), run.grid.time(k)};
      for (Index p = 0; p < ep.cols(); ++p) {
        row.push_back(tp(k, p));
        row.push_back(ep(k, p));
      }
      csv.row(row);
    }
    csv.close();
  }
  {
    std::vector<std::string> cols{"step", "t"};
    for (Index j = 0; j < nd; ++j) {
      cols.push_back(label("d_true_", j));
      cols.push_back(label("d_hat_", j));
    }
    CsvWriter csv(s.files[3], {"true and estimated disturbance", "t [s]; d [disturbance units]"}, cols);
    for (Index k = 0; k < steps; ++k) {
      // The plant applies d(t_k) over step k; report it at the end of the step.
      const Eigen::VectorXd dt = k == 0 ? Eigen::VectorXd::Zero(nd) : true_d.at(run.grid.time(k - 1));
      std::vector<double> row{static_cast<double>(k), run.grid.time(k)};
      for (Index j = 0; j < nd; ++j) {
        row.push_back(dt[j]);
        row.push_back(primary.disturbance(k, j));
      }
      csv.row(row);
    }
    csv.close();
  }
  const PropertyMap est_props = estimate_properties(primary.lifted, run.grid.times(), config.property);
  const PropertyMap true_props = estimate_properties(truth.temperatures, run.grid.times(), config.property);
  export_property_csv(s.files[4], est_props, scenario.mesh, run.parameters.slices.back().displacement);
  {
    StateTrajectory est;
    est.temperatures = primary.lifted;
    save_state_trajectory(s.files[5], est);
  }

  s.metrics.emplace_back("rank", static_cast<double>(r));
  s.metrics.emplace_back("max_rmse", primary.rmse.maxCoeff());
  s.metrics.emplace_back("max_rmse_without_disturbance", outcomes.back().rmse.maxCoeff());
  s.metrics.emplace_back("property_agreement", classification_agreement(est_props, true_props));
  s.metrics.emplace_back("jitter_count", static_cast<double>(primary.filter.jitter_count));
  return s;
}

}  // namespace formtherm
