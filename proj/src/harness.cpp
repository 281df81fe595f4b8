#include "spinsync/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "spinsync/ensemble_init.hpp"

namespace spinsync {

namespace {

const std::vector<std::string> kBlochSlots = {"Sx", "Sy", "Sz", "Ix", "Iy", "Iz", "Ax", "Ay", "Az"};
const std::vector<std::string> kTopsSlots = {"Sx", "Sy", "Sz", "Fx", "Fy", "Fz"};

bool single_state(const RunConfig& cfg) {
  return cfg.engine == "meanfield" || (cfg.engine == "master" && cfg.physics.mean_field);
}

IntegratorOptions integrator_options(const RunConfig& cfg) {
  IntegratorOptions o;
  o.t_end = cfg.numerics.t_end;
  o.sample_dt = cfg.numerics.sample_dt;
  o.rtol = cfg.numerics.rtol;
  o.atol = cfg.numerics.atol;
  return o;
}

Eigen::MatrixXd random_pattern(const RunConfig& cfg, std::size_t n) {
  StochasticOptions opts;
  opts.symmetric = cfg.physics.coupling.symmetric;
  opts.zero_diagonal = cfg.physics.coupling.zero_diagonal;
  const std::uint64_t seed = derive_seed(cfg.seed, streams::kCoupling);
  // A draw that fails to scale is replaced by the next one in the sub-stream.
  for (std::uint64_t attempt = 0; attempt < 16; ++attempt) {
    try {
      return doubly_stochastic(n, derive_seed(seed, attempt), opts);
    } catch (const NumericalError&) {
    }
  }
  throw NumericalError("doubly stochastic scaling failed for 16 consecutive draws");
}

// Total spin per atom along a trajectory, in either layout.
Vec3 mean_f(const Trajectory& traj, std::size_t sample) {
  if (traj.stride == layout::kBlochStride) {
    return traj.mean_vec(sample, layout::kS) + traj.mean_vec(sample, layout::kI);
  }
  return traj.mean_vec(sample, layout::kTopsF);
}

std::vector<Vec3> atom_f(const Trajectory& traj, std::size_t sample) {
  std::vector<Vec3> out(traj.atoms);
  for (std::size_t n = 0; n < traj.atoms; ++n) {
    out[n] = traj.stride == layout::kBlochStride
                 ? Vec3(traj.vec(sample, n, layout::kS) + traj.vec(sample, n, layout::kI))
                 : traj.vec(sample, n, layout::kTopsF);
  }
  return out;
}

Trajectory run_meanfield(const Ensemble& ens, const RunConfig& cfg, RunResult& result) {
  const SpinTriple t0 = observables(ens.rhos.front(), ens.ops);
  const Vec3 f = t0.F();
  const MeanFieldParams p =
      MeanFieldParams::from_total_spin(cfg.physics.omega, cfg.physics.gamma_value(), f);
  result.eigenvalues = exact_eigenvalues(p);

  const IntegratorOptions opts = integrator_options(cfg);
  std::vector<double> times(opts.sample_count());
  for (std::size_t k = 0; k < times.size(); ++k) {
    times[k] = static_cast<double>(k) * opts.sample_dt;
  }
  const std::vector<Vec3> s = meanfield_solution(t0.S, t0.A, p, times);

  Trajectory traj;
  traj.atoms = 1;
  traj.stride = layout::kTopsStride;
  traj.times = times;
  for (const auto& sk : s) {
    std::vector<double> row(layout::kTopsStride);
    store3(row, layout::kTopsS, sk);
    store3(row, layout::kTopsF, f);
    traj.samples.push_back(std::move(row));
  }
  return traj;
}

Json complex_json(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

Json eigen_json(const EigenvalueSet& e) {
  return Json{{"zero", {complex_json(e.zero[0]), complex_json(e.zero[1])}},
              {"plus", {complex_json(e.plus[0]), complex_json(e.plus[1])}},
              {"minus", {complex_json(e.minus[0]), complex_json(e.minus[1])}}};
}

void analyse(RunResult& r) {
  const RunConfig& cfg = r.config;
  const Trajectory& traj = r.traj;

  r.f_initial = mean_f(traj, 0).norm();
  for (std::size_t k = 0; k < traj.size(); ++k) {
    r.drift = std::max(r.drift, (mean_f(traj, k) - mean_f(traj, 0)).norm());
  }

  Json a;
  a["engine"] = cfg.engine;
  a["atoms"] = traj.atoms;
  a["samples"] = traj.size();
  a["F_initial"] = r.f_initial;
  a["F_drift"] = r.drift;
  a["effective_field"] = r.field_magnitude;

  if (cfg.analysis.modes) {
    const double t0 = cfg.mode_window_start();
    const std::size_t first = first_index_at(traj.times, t0);
    const std::vector<double> sx = traj.mean_series(layout::kS);
    const std::span<const double> window(sx.data() + first, sx.size() - first);
    ModeOptions mo;
    mo.max_order = cfg.analysis.max_order;
    Json modes = Json::array();
    try {
      r.modes = extract_modes(window, traj.dt(), mo);
      for (const auto& m : r.modes) {
        modes.push_back(Json{{"lambda_re", m.lambda.real()},
                             {"lambda_im", m.lambda.imag()},
                             {"amp_re", m.amplitude.real()},
                             {"amp_im", m.amplitude.imag()},
                             {"residual", m.residual}});
      }
      r.dominant = dominant_mode(window, traj.dt(), mo);
    } catch (const ValidationError& e) {
      r.mode_error = e.what();
    }
    Json fit{{"series", "mean_Sx"}, {"window_start", traj.times.empty() ? 0.0 : t0},
             {"modes", modes}};
    if (r.dominant) {
      fit["dominant"] = Json{{"R", r.dominant->rate}, {"Omega", r.dominant->frequency}};
    } else {
      fit["dominant"] = nullptr;
      fit["error"] = r.mode_error;
    }
    a["mode_fit"] = fit;
  }

  if (cfg.analysis.sync && traj.atoms >= 2) {
    r.sync = sync_spread(traj, layout::kS);
    const double thr = cfg.analysis.sync_threshold;
    std::optional<double> first_below, stays_below;
    double max_early = 0.0;
    const double horizon = 10.0 / cfg.physics.omega;
    for (std::size_t k = 0; k < r.sync.size(); ++k) {
      if (!first_below && r.sync[k].spread < thr) first_below = r.sync[k].t;
      if (r.sync[k].t <= horizon + 1e-12) max_early = std::max(max_early, r.sync[k].spread);
    }
    for (std::size_t k = r.sync.size(); k-- > 0;) {
      if (r.sync[k].spread >= thr) break;
      stays_below = r.sync[k].t;
    }
    Json s{{"threshold", thr}};
    s["t_first_below"] = first_below ? Json(*first_below) : Json(nullptr);
    s["t_stays_below"] = stays_below ? Json(*stays_below) : Json(nullptr);
    s["max_spread_until_10_over_omega"] = max_early;
    s["final_spread"] = r.sync.back().spread;
    a["sync"] = s;
  }

  if (r.eigenvalues) {
    a["eigenvalues"] = eigen_json(*r.eigenvalues);
  }
  if (r.monitor) {
    a["density_monitor"] = Json{{"max_trace_error", r.monitor->max_trace_error},
                                {"max_hermiticity_error", r.monitor->max_hermiticity_error},
                                {"min_eigenvalue", r.monitor->min_eigenvalue},
                                {"positivity_violations", r.monitor->positivity_violations}};
  }
  r.analysis = a;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ValidationError("cannot write " + path.string());
  }
  out << text;
}

}  // namespace

Ensemble build_ensemble(const RunConfig& cfg) {
  cfg.validate();
  const auto& ph = cfg.physics;
  Ensemble e;
  e.ops = product_operators(ph.I);
  const std::size_t n = single_state(cfg) ? 1 : ph.N;

  auto draw = [&](const AngleDist& d, std::uint64_t stream) {
    if (n == 1 && single_state(cfg)) return std::vector<double>{d.mean};
    return sample_angles(d.mean, d.sigma, n, derive_seed(cfg.seed, stream));
  };
  const auto ty = draw(ph.tilt.theta_y, streams::kThetaY);
  const auto tz = draw(ph.tilt.theta_z, streams::kThetaZ);
  const auto py = draw(ph.tilt.phi_y, streams::kPhiY);
  const auto pz = draw(ph.tilt.phi_z, streams::kPhiZ);

  const CMatrix rho_eq = spin_temperature_state({ph.beta, ph.I});
  for (std::size_t k = 0; k < n; ++k) {
    e.angles.push_back({ty[k], tz[k], py[k], pz[k]});
    e.rhos.push_back(tilt_state(rho_eq, e.angles.back(), e.ops));
  }

  const double gamma = ph.gamma_value();
  if (n == 1 || ph.coupling.kind == "uniform") {
    e.params.coupling = CouplingMatrix::uniform(n, gamma);
  } else {
    e.params.coupling = CouplingMatrix::from_pattern(random_pattern(cfg, n), gamma);
  }
  if (ph.omega_spread > 0.0 && n > 1) {
    e.params.freqs = FrequencySpread::sample(ph.omega, ph.omega_spread * ph.omega, n,
                                             derive_seed(cfg.seed, streams::kFrequencies));
  } else {
    e.params.freqs = FrequencySpread::uniform(n, ph.omega);
  }
  return e;
}

RunResult run(const RunConfig& cfg) {
  RunResult r;
  r.config = cfg;
  const Ensemble ens = build_ensemble(cfg);
  const IntegratorOptions opts = integrator_options(cfg);

  if (cfg.engine == "meanfield") {
    r.traj = run_meanfield(ens, cfg, r);
    r.slots = kTopsSlots;
  } else if (cfg.engine == "bloch") {
    r.traj = integrate(bloch_state_from_density(ens.rhos, ens.ops), ens.params, opts);
    r.slots = kBlochSlots;
  } else if (cfg.engine == "tops") {
    const TopsState s0 = TopsState::from_bloch(bloch_state_from_density(ens.rhos, ens.ops));
    r.traj = integrate_tops(s0, ens.params, opts);
    r.slots = kTopsSlots;
  } else {
    DensityMatrixState s0{ens.rhos, cfg.physics.I, 0.0};
    MasterRun m = integrate_master(s0, ens.params, ens.ops, opts, cfg.output.density_snapshots);
    r.traj = std::move(m.observables);
    r.monitor = m.monitor;
    r.snapshots = std::move(m.snapshots);
    r.slots = kBlochSlots;
  }
  r.field_magnitude = effective_field(ens.params.freqs, atom_f(r.traj, 0)).magnitude;
  analyse(r);
  return r;
}

std::string trajectory_csv(const RunResult& r) {
  const Trajectory& traj = r.traj;
  const std::size_t emitted = std::min(r.config.emitted_atoms(), traj.atoms);
  std::string out = "t";
  for (const auto& s : r.slots) out += ",mean_" + s;
  for (std::size_t n = 0; n < emitted; ++n) {
    for (const auto& s : r.slots) out += ",atom" + std::to_string(n) + "_" + s;
  }
  out += '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out += fmt(traj.times[k]);
    for (std::size_t slot = 0; slot < traj.stride; ++slot) {
      double sum = 0.0;
      for (std::size_t n = 0; n < traj.atoms; ++n) sum += traj.samples[k][n * traj.stride + slot];
      out += ',' + fmt(sum / static_cast<double>(traj.atoms));
    }
    for (std::size_t i = 0; i < emitted * traj.stride; ++i) {
      out += ',' + fmt(traj.samples[k][i]);
    }
    out += '\n';
  }
  return out;
}

std::string sync_csv(const RunResult& r) {
  std::string out = "t,spread\n";
  for (const auto& s : r.sync) out += fmt(s.t) + ',' + fmt(s.spread) + '\n';
  return out;
}

void write_run(const RunResult& r, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_text(out_dir / "trajectory.csv", trajectory_csv(r));
  write_text(out_dir / "analysis.json", r.analysis.dump(2) + "\n");
  write_text(out_dir / "manifest.json", r.config.to_json().dump(2) + "\n");
  if (!r.sync.empty()) {
    write_text(out_dir / "sync.csv", sync_csv(r));
  }
  if (!r.snapshots.empty()) {
    std::string text = "# density matrices: one block per (t, atom); rows of re im pairs\n";
    for (const auto& snap : r.snapshots) {
      for (std::size_t n = 0; n < snap.size(); ++n) {
        text += "t " + fmt(snap.t) + " atom " + std::to_string(n) + "\n";
        text += format_density_matrix(snap.rhos[n]);
      }
    }
    write_text(out_dir / "density.txt", text);
  }
}

std::vector<SweepRow> sweep(const SweepConfig& cfg) {
  cfg.validate();
  std::vector<SweepRow> rows(cfg.values.size());
  const auto count = static_cast<long>(rows.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(cfg.workers)
  for (long i = 0; i < count; ++i) {
    SweepRow& row = rows[i];
    row.value = cfg.values[i];
    try {
      const RunResult r = run(cfg.point(row.value));
      row.f_initial = r.f_initial;
      row.eigenvalues = r.eigenvalues;
      if (r.dominant) {
        row.rate = r.dominant->rate;
        row.frequency = r.dominant->frequency;
      } else {
        row.message = r.mode_error;
      }
    } catch (const ValidationError& e) {
      row.status = "validation_error";
      row.message = e.what();
    } catch (const NumericalError& e) {
      row.status = "numerical_error";
      row.message = e.what();
    } catch (const std::exception& e) {
      row.status = "numerical_error";
      row.message = e.what();
    }
  }
  return rows;
}

std::string sweep_csv(const SweepConfig& cfg, const std::vector<SweepRow>& rows) {
  const bool eig = cfg.base.engine == "meanfield";
  std::string out = cfg.axis + ",status,R,Omega,F_initial";
  if (eig) {
    for (const char* q : {"zero", "plus", "minus"}) {
      for (int i = 1; i <= 2; ++i) {
        const std::string name = std::string("lambda") + std::to_string(i) + "_" + q;
        out += "," + name + "_re," + name + "_im";
      }
    }
  }
  out += ",message\n";
  for (const auto& row : rows) {
    out += fmt(row.value) + ',' + row.status + ',' + fmt(row.rate) + ',' + fmt(row.frequency) +
           ',' + fmt(row.f_initial);
    if (eig) {
      const auto flat = row.eigenvalues ? row.eigenvalues->flat() : std::array<Complex, 6>{};
      for (const auto& z : flat) {
        out += ',' + (row.eigenvalues ? fmt(z.real()) : std::string("nan")) + ',' +
               (row.eigenvalues ? fmt(z.imag()) : std::string("nan"));
      }
    }
    std::string msg = row.message;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    out += ',' + msg + '\n';
  }
  return out;
}

void write_sweep(const SweepConfig& cfg, const std::vector<SweepRow>& rows,
                 const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_text(out_dir / "summary.csv", sweep_csv(cfg, rows));
  write_text(out_dir / "manifest.json", cfg.to_json().dump(2) + "\n");
}

Json budget_report(const BudgetConfig& cfg) {
  const BudgetResult b = relaxation_budget(cfg.vapor, cfg.omega_hf);
  const auto& formulas = budget_formulas();
  const std::pair<const char*, double> rates[] = {
      {"R_SE", b.R_SE},         {"R_wall", b.R_wall},
      {"R_KK_binary", b.R_KK_binary}, {"R_KK_triplet", b.R_KK_triplet},
      {"R_S", b.R_S},           {"R_buff", b.R_buff},
      {"R_CE", b.R_CE},         {"R_nuclear_singlet", b.R_nuclear_singlet},
      {"R_SD", b.R_SD},         {"n_threshold", b.n_threshold}};
  Json results;
  for (const auto& [name, value] : rates) {
    results[name] = Json{{"value", value},
                         {"unit", std::string(name) == "n_threshold" ? "cm^-3" : "s^-1"},
                         {"formula", formulas.at(name)}};
  }
  Json inputs;
  for (const auto& [name, unit] : VaporConfig::units()) {
    inputs[name] = Json{{"value", cfg.vapor.get(name)},
                        {"unit", unit},
                        {"provenance", cfg.vapor.provenance.count(name)
                                           ? cfg.vapor.provenance.at(name)
                                           : std::string("config")}};
  }
  const PulseExcitation pulse = pulse_excitation(cfg.omega_b, cfg.omega_hf, cfg.g_s, cfg.b_perp);
  Json j;
  j["constants"] = Json{{"k_B", Json{{"value", kBoltzmannEv}, {"unit", "eV/K"}}},
                        {"omega_hf", Json{{"value", cfg.omega_hf}, {"unit", "rad/s"}}}};
  j["inputs"] = inputs;
  j["rates"] = results;
  j["pumping"] = Json{{"R_P", cfg.r_pump},
                      {"R_SD", b.R_SD},
                      {"polarization", polarization_from_pumping(cfg.r_pump, b.R_SD)},
                      {"formula", "R_P / (2 (R_P + R_SD))"}};
  j["pulse"] = Json{{"omega_B", cfg.omega_b},
                    {"g_s_hz_per_gauss", cfg.g_s},
                    {"B_perp_gauss", cfg.b_perp},
                    {"azimuth_rad", pulse.azimuth},
                    {"elevation_rad", pulse.elevation},
                    {"excites", pulse.excites}};
  return j;
}

std::filesystem::path preset_dir() {
  if (const char* env = std::getenv("SPINSYNC_PRESET_DIR")) {
    return env;
  }
  return SPINSYNC_PRESET_DIR;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(preset_dir(), ec)) {
    if (entry.path().extension() == ".json") {
      names.push_back(entry.path().stem().string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

std::filesystem::path preset_path(const std::string& name) {
  const auto path = preset_dir() / (name + ".json");
  if (!std::filesystem::exists(path)) {
    throw ValidationError("unknown preset \"" + name + "\"");
  }
  return path;
}

}  // namespace spinsync
