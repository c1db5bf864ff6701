// polspin: simulation and analysis toolkit for 4-photon polarization
// tetrahedron-state metrology.  Subcommands: state, qcrb, simulate, tomo,
// figures.  Exit codes: 0 success, 2 invalid input, 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polspin/constellation.hpp"
#include "polspin/errors.hpp"
#include "polspin/metrology.hpp"
#include "polspin/phase_space.hpp"
#include "polspin/serialization.hpp"
#include "polspin/source_sim.hpp"
#include "polspin/spin_core.hpp"
#include "polspin/tomography.hpp"

namespace {

using namespace polspin;
namespace fs = std::filesystem;

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create output directory: " + dir);
}

json maybe_inf(double v) {
  if (std::isinf(v)) return nullptr;
  return v;
}

BlockDensityMatrix load_density_arg(const std::string& density_path,
                                    const std::string& state_path) {
  if (!density_path.empty())
    return density_from_json(read_json_file(density_path));
  if (!state_path.empty())
    return pure_density(state_from_json(read_json_file(state_path)));
  return pure_density(tetrahedron_state());
}

// --- state -----------------------------------------------------------------

struct StateArgs {
  std::string name = "tetrahedron";
  int photons = 4;
  double theta = 0.0, phi = 0.0;
  std::string constellation_path;
  std::string out = ".";
};

void run_state(const StateArgs& a) {
  ensure_out_dir(a.out);
  PureSpinState psi;
  if (!a.constellation_path.empty()) {
    psi = constellation_to_state(
        constellation_from_json(read_json_file(a.constellation_path)));
  } else if (a.name == "tetrahedron") {
    psi = tetrahedron_state();
  } else if (a.name == "noon") {
    psi = noon_state(a.photons);
  } else if (a.name == "coherent") {
    psi = coherent_state(a.photons, a.theta, a.phi);
  } else {
    throw ValidationError("unknown state name: " + a.name);
  }
  write_json_file(a.out + "/state.json", state_to_json(psi));
  write_json_file(a.out + "/constellation.json",
                  constellation_to_json(state_to_constellation(psi)));

  const BlockDensityMatrix rho = pure_density(psi);
  const auto moments = multipole_moments(rho, psi.two_j);
  const auto unpol = is_second_order_unpolarized(rho);
  json diag{{"format", "state_diagnostics"},
            {"version", 1},
            {"multipoles", moments},
            {"second_order_unpolarized",
             {{"pass", unpol.pass},
              {"vector_norm", unpol.vector_norm},
              {"moment_residual", unpol.moment_residual},
              {"target", unpol.target}}},
            {"sqcrb", maybe_inf(sqcrb(rho))}};
  write_json_file(a.out + "/diagnostics.json", diag);
}

// --- qcrb ------------------------------------------------------------------

struct QcrbArgs {
  int nmin = 1, nmax = 20;
  std::vector<std::string> densities;
  std::string counts_path, bases_path;
  int resamples = 100;
  std::uint64_t seed = 1;
  std::string out = ".";
};

std::string strategy_csv(int nmin, int nmax) {
  std::string csv =
      "n,coherent_single,coherent_sequential,noon_simultaneous,noon_sequential,"
      "platonic\n";
  for (int n = nmin; n <= nmax; ++n) {
    const StrategyReport rep = strategy_report(n);
    auto cell = [&](const char* key) -> std::string {
      auto it = rep.entries.find(key);
      return it == rep.entries.end() ? "" : fmt(it->second);
    };
    csv += std::to_string(n) + "," + cell("coherent_single") + "," +
           cell("coherent_sequential") + "," + cell("noon_simultaneous") + "," +
           cell("noon_sequential") + "," + cell("platonic") + "\n";
  }
  return csv;
}

void run_qcrb(const QcrbArgs& a) {
  if (a.nmin < 1 || a.nmax < a.nmin)
    throw ValidationError("qcrb: need 1 <= nmin <= nmax");
  ensure_out_dir(a.out);
  write_text_file(a.out + "/strategies.csv", strategy_csv(a.nmin, a.nmax));

  std::string pts = "label,sqcrb,sqcrb_std\n";
  bool have_points = false;
  for (const auto& path : a.densities) {
    const BlockDensityMatrix rho = density_from_json(read_json_file(path));
    pts += fs::path(path).filename().string() + "," + fmt(sqcrb(rho)) + ",\n";
    have_points = true;
  }
  if (!a.counts_path.empty()) {
    if (a.bases_path.empty())
      throw ValidationError("qcrb: --counts requires --bases");
    const auto counts = read_counts_csv(a.counts_path);
    const auto bases = bases_from_json(read_json_file(a.bases_path));
    ReconstructionResult rec = mle_reconstruct(counts, bases);
    rec.mc = monte_carlo_errors(counts, bases, a.resamples, a.seed);
    pts += "mle," + fmt(sqcrb(rec.rho)) + "," + fmt(rec.mc.sqcrb_std) + "\n";
    have_points = true;
  }
  if (have_points) write_text_file(a.out + "/points.csv", pts);
}

// --- simulate --------------------------------------------------------------

struct SimArgs {
  SourceParams params;
  std::string out = ".";
};

void run_simulate(const SimArgs& a) {
  ensure_out_dir(a.out);
  const SourceOutput res = run_pipeline(a.params);
  write_json_file(a.out + "/density.json", density_to_json(res.rho));
  std::string csv = "label,monomial,analytic,simulated\n";
  for (const auto& ec : res.ledger)
    csv += ec.label + ",\"" + ec.monomial + "\"," + fmt(ec.analytic) + "," +
           fmt(ec.simulated) + "\n";
  write_text_file(a.out + "/ledger.csv", csv);
  const double alpha =
      a.params.alpha < 0.0 ? a.params.matched_alpha() : a.params.alpha;
  json summary{{"format", "source_summary"},
               {"version", 1},
               {"success_probability", res.success_probability},
               {"truncation_loss", res.truncation_loss},
               {"params",
                {{"eta", a.params.eta},
                 {"mu", a.params.mu},
                 {"t", a.params.t},
                 {"tau", a.params.tau},
                 {"alpha", alpha},
                 {"n_max", a.params.n_max},
                 {"epsilon", a.params.epsilon}}}};
  write_json_file(a.out + "/summary.json", summary);
}

// --- tomo ------------------------------------------------------------------

struct TomoArgs {
  std::string density_path, state_path, bases_path;
  long events = 2434;
  std::uint64_t seed = 1;
  int resamples = 0;
  double tol = 1e-10;
  std::string out = ".";
};

void run_tomo(const TomoArgs& a) {
  ensure_out_dir(a.out);
  const BlockDensityMatrix rho = load_density_arg(a.density_path, a.state_path);
  const std::vector<BasisSetting> bases =
      a.bases_path.empty() ? default_bases()
                           : bases_from_json(read_json_file(a.bases_path));
  const auto counts = simulate_counts(rho, bases, a.events, a.seed);
  write_counts_csv(a.out + "/counts.csv", counts);
  write_json_file(a.out + "/bases.json", bases_to_json(bases));

  MleOptions opts;
  opts.tol = a.tol;
  ReconstructionResult rec = mle_reconstruct(counts, bases, opts);
  if (a.resamples > 0)
    rec.mc = monte_carlo_errors(counts, bases, a.resamples, a.seed + 1000003, opts);

  json doc = reconstruction_to_json(rec);
  RotationParams align;
  align.theta = Vec3(0, 0, rec.phi);
  const BlockDensityMatrix aligned = rotate_density(rec.rho, align);
  doc["fidelity_tetrahedron"] = fidelity(aligned, tetrahedron_state());
  doc["sqcrb"] = maybe_inf(sqcrb(rec.rho));
  doc["symmetric_population"] = std::real(rec.rho.sectors[0].block.trace());
  write_json_file(a.out + "/reconstruction.json", doc);
}

// --- figures ---------------------------------------------------------------

struct FigArgs {
  std::string which = "fig3";
  std::string density_path, state_path;
  int grid_theta = 181, grid_phi = 360;
  int scan_samples = 720;
  std::string out = ".";
};

std::string grid_csv(const SphericalGrid& g) {
  std::string csv = "theta,phi,w\n";
  for (size_t i = 0; i < g.thetas.size(); ++i)
    for (size_t k = 0; k < g.phis.size(); ++k)
      csv += fmt(g.thetas[i]) + "," + fmt(g.phis[k]) + "," +
             fmt(g.values(i, k)) + "\n";
  return csv;
}

void run_figures(const FigArgs& a) {
  ensure_out_dir(a.out);
  const BlockDensityMatrix rho = load_density_arg(a.density_path, a.state_path);
  if (a.which == "fig3") {
    write_text_file(a.out + "/full.csv",
                    grid_csv(wigner_grid(rho, 4, a.grid_theta, a.grid_phi)));
    const auto projs = vertex_projections(rho, a.grid_theta, a.grid_phi);
    json meta{{"format", "vertex_projections"}, {"version", 1}};
    json list = json::array();
    for (const auto& p : projs) {
      write_text_file(a.out + "/vertex_" + std::to_string(p.vertex) + ".csv",
                      grid_csv(p.map));
      list.push_back(json{
          {"vertex", p.vertex},
          {"direction",
           {p.vertex_direction.x(), p.vertex_direction.y(), p.vertex_direction.z()}},
          {"rotation_vector",
           {p.rotation.theta.x(), p.rotation.theta.y(), p.rotation.theta.z()}}});
    }
    meta["projections"] = list;
    write_json_file(a.out + "/fig3_meta.json", meta);
  } else if (a.which == "fig4") {
    std::vector<double> thetas(a.scan_samples);
    for (int i = 0; i < a.scan_samples; ++i)
      thetas[i] = 2.0 * pi * i / a.scan_samples;
    const auto fx = rotation_scan(rho, Vec3(1, 0, 0), thetas);
    const auto fy = rotation_scan(rho, Vec3(0, 1, 0), thetas);
    const auto fz = rotation_scan(rho, Vec3(0, 0, 1), thetas);
    std::string csv = "theta,x,y,z\n";
    for (int i = 0; i < a.scan_samples; ++i)
      csv += fmt(thetas[i]) + "," + fmt(fx[i]) + "," + fmt(fy[i]) + "," +
             fmt(fz[i]) + "\n";
    write_text_file(a.out + "/fig4.csv", csv);
  } else if (a.which == "fig5") {
    write_text_file(a.out + "/strategies.csv", strategy_csv(1, 20));
    if (!a.density_path.empty() || !a.state_path.empty()) {
      std::string pts = "label,sqcrb\n";
      pts += "input," + fmt(sqcrb(rho)) + "\n";
      write_text_file(a.out + "/points.csv", pts);
    }
  } else {
    throw ValidationError("figures: unknown figure '" + a.which + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"4-photon polarization tetrahedron metrology toolkit"};
  app.require_subcommand(1);
  app.set_config("--config");

  StateArgs sa;
  auto* cs = app.add_subcommand("state", "Named or constellation-built pure states");
  cs->add_option("--name", sa.name, "tetrahedron | noon | coherent");
  cs->add_option("--photons", sa.photons, "Photon number for noon/coherent");
  cs->add_option("--theta", sa.theta, "Coherent-state colatitude");
  cs->add_option("--phi", sa.phi, "Coherent-state azimuth");
  cs->add_option("--constellation", sa.constellation_path,
                 "Build the state from a constellation JSON file");
  cs->add_option("--out", sa.out, "Output directory");

  QcrbArgs qa;
  auto* cq = app.add_subcommand("qcrb", "Strategy bounds and evaluated points");
  cq->add_option("--nmin", qa.nmin, "Smallest photon budget");
  cq->add_option("--nmax", qa.nmax, "Largest photon budget");
  cq->add_option("--density", qa.densities, "Density JSON files to evaluate");
  cq->add_option("--counts", qa.counts_path, "Counts CSV for an MLE point");
  cq->add_option("--bases", qa.bases_path, "Bases JSON for the counts");
  cq->add_option("--resamples", qa.resamples, "MC resamples for the MLE point");
  cq->add_option("--seed", qa.seed, "MC seed");
  cq->add_option("--out", qa.out, "Output directory");

  SimArgs ma;
  auto* cm = app.add_subcommand("simulate", "Heralded tetrahedron source");
  cm->add_option("--eta", ma.params.eta, "Collinear pair amplitude");
  cm->add_option("--mu", ma.params.mu, "Herald pair amplitude");
  cm->add_option("--t", ma.params.t, "Collinear transmission");
  cm->add_option("--tau", ma.params.tau, "Herald/signal transmission");
  cm->add_option("--alpha", ma.params.alpha,
                 "Coherent amplitude (negative = matched)");
  cm->add_option("--nmax", ma.params.n_max, "Fock cutoff per mode");
  cm->add_option("--epsilon", ma.params.epsilon, "Leakage weight");
  cm->add_option("--out", ma.out, "Output directory");

  TomoArgs ta;
  auto* ct = app.add_subcommand("tomo", "Simulated counts and MLE reconstruction");
  ct->add_option("--density", ta.density_path, "Input block-density JSON");
  ct->add_option("--state", ta.state_path, "Input pure-state JSON");
  ct->add_option("--events", ta.events, "Total events before censoring");
  ct->add_option("--seed", ta.seed, "Sampling seed");
  ct->add_option("--resamples", ta.resamples, "MC error resamples (0 = skip)");
  ct->add_option("--tol", ta.tol, "MLE log-likelihood tolerance");
  ct->add_option("--bases", ta.bases_path, "Bases JSON (default: built-in 13)");
  ct->add_option("--out", ta.out, "Output directory");

  FigArgs fa;
  auto* cf = app.add_subcommand("figures", "Data files behind the figures");
  cf->add_option("--which", fa.which, "fig3 | fig4 | fig5");
  cf->add_option("--density", fa.density_path, "Input block-density JSON");
  cf->add_option("--state", fa.state_path, "Input pure-state JSON");
  cf->add_option("--grid-theta", fa.grid_theta, "Map rows");
  cf->add_option("--grid-phi", fa.grid_phi, "Map columns");
  cf->add_option("--scan-samples", fa.scan_samples, "fig4 scan resolution");
  cf->add_option("--out", fa.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cs->parsed()) run_state(sa);
    if (cq->parsed()) run_qcrb(qa);
    if (cm->parsed()) run_simulate(ma);
    if (ct->parsed()) run_tomo(ta);
    if (cf->parsed()) run_figures(fa);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
