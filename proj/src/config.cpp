// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "formtherm/config.hpp"

#include "formtherm/error.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace formtherm {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path + "'");
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    throw ValidationError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

std::string resolve(const std::string& base, const std::string& rel) {
  if (rel.empty()) return rel;
  const fs::path p(rel);
  if (p.is_absolute()) return rel;
  return (fs::path(base).parent_path() / p).lexically_normal().string();
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config key '") + key + "': " + e.what());
  }
}

PiecewiseLinear read_table(const json& j, const std::string& what) {
  if (j.is_number()) return PiecewiseLinear::constant(j.get<double>());
  if (!j.is_object() || !j.contains("T") || !j.contains("value"))
    throw ValidationError(what + " must be a number or {\"T\": [...], \"value\": [...]}");
  return PiecewiseLinear(j.at("T").get<std::vector<double>>(), j.at("value").get<std::vector<double>>());
}

ProcessInputs read_inputs(const json& j, ProcessInputs u) {
  read(j, "t_aust_avg", u.t_aust_avg);
  read(j, "v_punch", u.v_punch);
  read(j, "t_hold", u.t_hold);
  u.validate();
  return u;
}

Eigen::Vector3d read_point(const json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 3) throw ValidationError("points must have three coordinates");
  return {v[0], v[1], v[2]};
}

DisturbanceSignal read_signal(const json& j, Index dimension) {
  if (j.is_null()) return DisturbanceSignal(dimension);
  if (!j.is_array()) throw ValidationError("disturbance signal must be a list of segments");
  std::vector<DisturbanceSignal::Segment> segs;
  for (const auto& s : j) {
    DisturbanceSignal::Segment seg{s.at("start").get<double>(), s.at("end").get<double>(), {}};
    const auto& v = s.at("value");
    if (v.is_number()) {
      seg.value = Eigen::VectorXd::Constant(dimension, v.get<double>());
    } else {
      const auto vals = v.get<std::vector<double>>();
      seg.value = Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Index>(vals.size()));
    }
    segs.push_back(std::move(seg));
  }
  return DisturbanceSignal(dimension, std::move(segs));
}

std::string describe(const json& j) { return j.is_null() ? "none" : j.dump(); }

RunSpec read_run(const json& j, const ProcessInputs& defaults, Index dimension, const std::string& fallback_id) {
  RunSpec r;
  r.id = j.value("id", fallback_id);
  r.inputs = read_inputs(j.value("inputs", json::object()), defaults);
  const json sig = j.value("disturbance", json());
  r.disturbance = read_signal(sig, dimension);
  r.description = describe(sig);
  return r;
}

PlantSpec read_plant(const json& j, const ProcessInputs& defaults, Index dimension, const std::string& id) {
  PlantSpec p;
  p.run = read_run(j, defaults, dimension, id);
  if (j.contains("induced_heat")) p.induced_heat = read_table(j.at("induced_heat"), "plant induced_heat");
  return p;
}

}  // namespace

DisturbanceSignal parse_disturbance_signal(const std::string& json_text, Index dimension) {
  try {
    return read_signal(json::parse(json_text), dimension);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("disturbance signal: ") + e.what());
  }
}

std::vector<RunSpec> SweepSpec::expand() const {
  if (t_aust_avg.empty() || v_punch.empty() || t_hold.empty())
    throw ValidationError("sweep lists must be non-empty");
  std::vector<RunSpec> runs;
  for (double t : t_aust_avg)
    for (double v : v_punch)
      for (double h : t_hold) {
        RunSpec r;
        r.inputs = {t, v, h};
        r.inputs.validate();
        std::ostringstream id;
        id << "sweep_T" << t << "_v" << v << "_h" << h;
        r.id = id.str();
        runs.push_back(std::move(r));
      }
  return runs;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  const json j = read_json(path);
  ScenarioConfig c;
  c.path = path;
  Scenario& s = c.scenario;
  try {
    if (j.contains("geometry")) {
      const auto& g = j.at("geometry");
      read(g, "outer_radius", s.geometry.outer_radius);
      read(g, "hole_radius", s.geometry.hole_radius);
      read(g, "thickness", s.geometry.thickness);
    }
    read(j, "resolution", s.resolution);
    s.reference = read_inputs(j.value("reference_inputs", json::object()), ProcessInputs{});
    if (j.contains("phases")) {
      std::vector<PhaseBlock> blocks;
      for (const auto& b : j.at("phases"))
        blocks.push_back({phase_from_string(b.at("phase").get<std::string>()), b.at("steps").get<Index>(),
                          b.at("duration").get<double>()});
      s.phase_template = make_phase_template(blocks);
    } else {
      s.phase_template = hole_flanging_template();
    }
    if (j.contains("tool")) {
      const auto& t = j.at("tool");
      read(t, "punch_radius", s.tool.punch_radius);
      read(t, "flange_band", s.tool.flange_band);
      read(t, "flange_depth", s.tool.flange_depth);
      read(t, "contact_radius", s.tool.contact_radius);
      read(t, "first_contact", s.tool.first_contact);
      read(t, "ambient_gap", s.tool.ambient_gap);
      read(t, "contact_pressure", s.tool.contact_pressure);
      read(t, "tool_temperature", s.tool.tool_temperature);
      read(t, "ambient_temperature", s.tool.ambient_temperature);
    }
    s.tool.validate(s.geometry.hole_radius, s.geometry.outer_radius);
    if (j.contains("sensors")) {
      const auto& sj = j.at("sensors");
      for (const auto& p : sj.at("positions")) s.sensors.positions.push_back(read_point(p));
      read(sj, "sigma_v", s.sensors.sigma_v);
      read(sj, "max_distance", s.sensors.max_distance);
    }
    s.sensors.validate();
    read(j, "contact_threshold", s.contact_threshold);

    c.material = MaterialModel::stainless_default();
    if (j.contains("material")) {
      const auto& m = j.at("material");
      read(m, "density", c.material.density);
      if (m.contains("specific_heat")) c.material.specific_heat = read_table(m.at("specific_heat"), "specific_heat");
      if (m.contains("conductivity")) c.material.conductivity = read_table(m.at("conductivity"), "conductivity");
      if (m.contains("induced_heat")) c.material.induced_heat = read_table(m.at("induced_heat"), "induced_heat");
    }
    c.material.validate();
    if (j.contains("film")) {
      const auto& f = j.at("film");
      read(f, "contact_h0", c.film.contact_h0);
      read(f, "contact_h_per_pa", c.film.contact_h_per_pa);
      read(f, "convection", c.film.convection);
      read(f, "emissivity", c.film.emissivity);
    }
    c.film.contact_threshold = s.contact_threshold;
    c.film.validate();
    if (j.contains("disturbance")) {
      const auto& d = j.at("disturbance");
      read(d, "unit", c.disturbance.unit);
      if (d.contains("regions")) {
        c.disturbance.regions.clear();
        for (const auto& r : d.at("regions")) {
          const std::string kind = r.at("kind").get<std::string>();
          if (kind == "contact") {
            c.disturbance.regions.push_back(DisturbanceRegion::contact());
          } else if (kind == "all") {
            c.disturbance.regions.push_back(DisturbanceRegion::all());
          } else if (kind == "band") {
            c.disturbance.regions.push_back(
                DisturbanceRegion::band(r.at("r_min").get<double>(), r.at("r_max").get<double>()));
          } else {
            throw ValidationError("unknown disturbance region kind '" + kind + "'");
          }
        }
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError("scenario config '" + path + "': " + e.what());
  }
  if (!(s.resolution > 0.0)) throw ValidationError("resolution must be positive");
  build_mesh(s);
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  const json j = read_json(path);
  ExperimentConfig c;
  c.path = path;
  try {
    read(j, "name", c.name);
    if (!j.contains("scenario")) throw ValidationError("experiment config needs a scenario path");
    c.scenario = load_scenario_config(resolve(path, j.at("scenario").get<std::string>()));
    const ProcessInputs& ref = c.scenario.scenario.reference;
    const Index nd = c.scenario.disturbance.size();

    if (j.contains("sweep")) {
      const auto& s = j.at("sweep");
      read(s, "t_aust_avg", c.sweep.t_aust_avg);
      read(s, "v_punch", c.sweep.v_punch);
      read(s, "t_hold", c.sweep.t_hold);
    }
    if (c.sweep.t_aust_avg.empty()) c.sweep.t_aust_avg = {ref.t_aust_avg};
    if (c.sweep.v_punch.empty()) c.sweep.v_punch = {ref.v_punch};
    if (c.sweep.t_hold.empty()) c.sweep.t_hold = {ref.t_hold};
    c.sweep.expand();

    if (j.contains("excitation")) {
      int i = 0;
      for (const auto& e : j.at("excitation")) c.excitation.push_back(read_run(e, ref, nd, "excitation_" + std::to_string(i++)));
    }
    if (j.contains("rom")) {
      const auto& r = j.at("rom");
      if (r.contains("rank")) {
        c.rom.rule = BasisRule::fixed(r.at("rank").get<Index>());
      } else if (r.contains("energy")) {
        c.rom.rule = BasisRule::threshold(r.at("energy").get<double>());
      }
      if (r.contains("norm")) c.rom.rule.norm = energy_norm_from_string(r.at("norm").get<std::string>());
      read(r, "ranks", c.rom.ranks);
      read(r, "stride", c.rom.stride);
    }
    if (c.rom.stride < 1) throw ValidationError("snapshot stride must be at least 1");
    for (Index r : c.rom.ranks)
      if (r < 1) throw ValidationError("ROM ranks must be positive");
    if (j.contains("estimator")) {
      const auto& e = j.at("estimator");
      read(e, "q_w", c.estimator.q_w);
      read(e, "r_v", c.estimator.r_v);
      read(e, "p0", c.estimator.p0);
      read(e, "q_d", c.estimator.q_d);
      read(e, "p0_d", c.estimator.p0_d);
      read(e, "joseph", c.estimator.joseph);
    }
    if (!(c.estimator.q_w > 0 && c.estimator.r_v > 0 && c.estimator.p0 > 0 && c.estimator.q_d > 0 &&
          c.estimator.p0_d > 0))
      throw ValidationError("estimator covariances must be positive");
    c.plant = read_plant(j.value("plant", json::object()), ref, nd, "plant");
    if (j.contains("evaluation_points"))
      for (const auto& p : j.at("evaluation_points")) c.evaluation_points.push_back(read_point(p));
    if (j.contains("property")) {
      const auto& p = j.at("property");
      read(p, "martensite_start", c.property.martensite_start);
      read(p, "critical_rate", c.property.critical_rate);
      read(p, "hard_value", c.property.hard_value);
      read(p, "soft_value", c.property.soft_value);
      read(p, "window", c.property.window);
    }
    c.property.validate();
    if (j.contains("evaluation")) {
      const auto& e = j.at("evaluation");
      if (e.contains("speed_scenario")) c.evaluation.speed_scenario = resolve(path, e.at("speed_scenario").get<std::string>());
      read(e, "speed_rank", c.evaluation.speed_rank);
      read(e, "speed_repeats", c.evaluation.speed_repeats);
      if (e.contains("reproducibility_experiment"))
        c.evaluation.reproducibility_experiment = resolve(path, e.at("reproducibility_experiment").get<std::string>());
      if (e.contains("latent_plant")) c.evaluation.latent_plant = read_plant(e.at("latent_plant"), ref, nd, "latent_plant");
      read(e, "pulse_start", c.evaluation.pulse_start);
      read(e, "pulse_end", c.evaluation.pulse_end);
      read(e, "pulse_value", c.evaluation.pulse_value);
    }
    if (j.contains("output")) c.output_dir = resolve(path, j.at("output").get<std::string>());
    read(j, "seed", c.seed);
    read(j, "threads", c.threads);
  } catch (const json::exception& e) {
    throw ValidationError("experiment config '" + path + "': " + e.what());
  }
  return c;
}

}  // namespace formtherm
