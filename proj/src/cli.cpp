#include "torus_vrep/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <random>
#include <stdexcept>

#include "torus_vrep/inversion.hpp"
#include "torus_vrep/io.hpp"

namespace tvr {

namespace {

constexpr int kDeltaBoundCutoff = 16384;

Json model_json(const ModelSpec& spec) {
  Json j;
  j["n_particles"] = spec.n;
  j["cutoff"] = spec.cutoff;
  j["spinful"] = spec.spinful;
  j["interaction"] = to_string(spec.interaction.kind);
  if (spec.interaction.kind == InteractionKind::Delta) j["interaction_strength"] = spec.interaction.strength;
  return j;
}

Json config_json(const RunConfig& c) {
  Json j;
  j["subcommand"] = c.subcommand;
  if (!c.topic.empty()) j["topic"] = c.topic;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  return j;
}

Json report_json(const SampleReport& r) {
  Json j;
  j["samples"] = r.samples;
  j["violations"] = r.violations;
  j["worst_margin"] = r.worst_margin;
  j["pass"] = r.pass();
  return j;
}

class Runner {
 public:
  explicit Runner(RunConfig c) : cfg_(std::move(c)) {}

  int dispatch(bool out_given) {
    out_given_ = out_given;
    if (cfg_.subcommand == "solve") return solve_cmd();
    if (cfg_.subcommand == "invert") return invert_cmd();
    if (cfg_.subcommand == "nrep") return nrep_cmd();
    if (cfg_.subcommand == "example") return example_cmd();
    if (cfg_.subcommand == "verify") return verify_cmd();
    throw std::invalid_argument("unknown subcommand '" + cfg_.subcommand + "'");
  }

 private:
  RunConfig cfg_;
  bool out_given_ = false;

  ModelSpec model() const {
    ModelSpec spec;
    spec.n = cfg_.n;
    spec.cutoff = cfg_.cutoff;
    spec.spinful = cfg_.spinful;
    if (cfg_.interaction == "delta") {
      spec.interaction = Interaction::delta(cfg_.interaction_strength);
    } else if (cfg_.interaction == "gaudin") {
      spec.interaction = Interaction::gaudin(2 * cfg_.cutoff);
    } else {
      spec.interaction = Interaction::none();
    }
    spec.validate();
    return spec;
  }

  PotentialClass potential(int default_delta_cutoff) const {
    const int pc = cfg_.potential_cutoff > 0 ? cfg_.potential_cutoff : default_delta_cutoff;
    if (cfg_.potential == "zero") return PotentialClass();
    if (cfg_.potential == "delta") return delta_potential(cfg_.gamma, pc);
    if (cfg_.potential == "cosine") return cosine_potential(cfg_.amplitude, 1);
    if (cfg_.potential_file.empty()) throw std::invalid_argument("field 'potential-file' is required for --potential file");
    return potential_from_json(read_json(cfg_.potential_file));
  }

  GroundStateOptions ground() const {
    GroundStateOptions go;
    go.workers = cfg_.workers;
    go.seed = cfg_.seed;
    return go;
  }

  int profile_grid(int cutoff) const { return cfg_.grid > 0 ? cfg_.grid : std::max(256, 8 * (2 * cutoff + 1)); }

  std::string path(const std::string& name) const { return (std::filesystem::path(cfg_.out) / name).string(); }

  void prepare_out() const { std::filesystem::create_directories(cfg_.out); }

  Json header() const {
    Json j;
    j["schema"] = kSchema;
    j["config"] = config_json(cfg_);
    return j;
  }

  void emit(const Json& j) const {
    prepare_out();
    const std::string text = dump_json(j);
    write_text(path("result.json"), text);
    std::cout << text << std::flush;
  }

  void profile(const std::string& title, int grid, const std::vector<CsvColumn>& series) const {
    std::vector<CsvColumn> cols{{"x", grid_points(grid)}};
    cols.insert(cols.end(), series.begin(), series.end());
    write_csv(path("profile.csv"), cols);
    if (cfg_.svg) write_svg(path("profile.svg"), title, cols.front().values, series);
  }

  int solve_cmd() {
    ModelSpec spec = model();
    const PotentialClass v = potential(2 * spec.cutoff);
    const auto go = ground();
    Json j = header();
    bool converged = true;
    if (cfg_.max_cutoff > spec.cutoff) {
      const auto conv = converge_cutoff(spec, v, cfg_.max_cutoff, cfg_.tol_energy, 4, go);
      Json c;
      c["cutoffs"] = conv.cutoffs;
      c["energies"] = conv.energies;
      c["converged"] = conv.converged;
      c["change"] = conv.change;
      j["cutoff_convergence"] = c;
      spec.cutoff = conv.cutoff;
      converged = conv.converged;
    }
    const auto res = solve(spec, v, go);
    j["model"] = model_json(spec);
    j["potential"] = to_json(v.coefficients());
    j["energy"] = res.energy;
    j["degeneracy"] = res.degeneracy();
    j["gap"] = res.gap;
    j["gap_is_lower_bound"] = res.gap_is_lower_bound;
    j["state_energies"] = res.state_energies;
    Json dens = Json::array();
    for (const auto& d : res.densities) dens.push_back(to_json(d.profile()));
    j["densities"] = dens;
    Json diag;
    diag["dim"] = res.diagnostics.dim;
    diag["blocks_total"] = res.diagnostics.blocks_total;
    diag["blocks_solved"] = res.diagnostics.blocks_solved;
    diag["blocks_pruned"] = res.diagnostics.blocks_pruned;
    diag["method"] = res.diagnostics.method;
    diag["max_residual"] = res.diagnostics.max_residual;
    diag["h_norm"] = res.diagnostics.h_norm;
    diag["warnings"] = res.diagnostics.warnings;
    j["diagnostics"] = diag;
    emit(j);

    const int grid = profile_grid(spec.cutoff);
    TorusFunction avg(2 * spec.cutoff);
    for (const auto& d : res.densities) avg += d.profile() * (1.0 / static_cast<double>(res.densities.size()));
    profile("ground-state density", grid,
            {{"rho", avg.real_samples(grid)},
             {"v", v.coefficients().with_cutoff(std::min(v.cutoff(), max_cutoff(grid))).real_samples(grid)}});
    return converged ? kExitOk : kExitNonConvergence;
  }

  DensityField load_density() const { return density_from_json(read_json(cfg_.density_file)); }

  int invert_cmd() {
    const DensityField rho = load_density();
    cfg_.n = rho.n_particles();
    cfg_.cutoff = std::max(cfg_.cutoff, rho.cutoff());
    const ModelSpec spec = model();
    InversionOptions opts;
    opts.potential_cutoff = cfg_.potential_cutoff;
    opts.tol_rho = cfg_.tol_rho;
    opts.tol_cert = cfg_.tol_cert;
    opts.max_iterations = cfg_.max_iterations;
    opts.proximal = cfg_.proximal;
    opts.penalty_mu = cfg_.penalty_mu;
    opts.refine_tol = cfg_.tol_energy;
    opts.ground = ground();
    opts.penalty.seed = cfg_.seed;
    const auto res = lieb_maximize(rho, spec, opts);

    Json j = header();
    j["model"] = model_json(spec);
    j["converged"] = res.converged;
    j["iterations"] = res.iterations;
    j["mismatch"] = res.mismatch;
    j["dual_value"] = res.dual_value;
    j["primal_value"] = res.primal_value;
    j["ensemble_weights"] = res.weights;
    if (cfg_.proximal > 0.0) j["proximal"] = cfg_.proximal;
    Json c;
    c["D"] = res.cert.D;
    c["P"] = res.cert.P;
    c["gap"] = res.cert.gap;
    c["mismatch"] = res.cert.mismatch;
    c["weak_duality"] = res.cert.weak_duality;
    c["accepted"] = res.cert.accepted;
    c["primal_source"] = res.cert.primal_source;
    c["refined_cutoff"] = res.cert.refined_cutoff;
    c["refined_converged"] = res.cert.refined_converged;
    j["certificate"] = c;
    j["potential"] = potential_to_json(res.potential);
    j["warnings"] = res.warnings;
    emit(j);
    write_text(path("potential.json"), dump_json(potential_to_json(res.potential, profile_grid(res.potential.cutoff()))));
    write_text(path("certificate.json"), dump_json(c));

    std::vector<CsvColumn> trace{{"iter", {}}, {"G", {}}, {"mismatch", {}}, {"step", {}}};
    for (const auto& r : res.trace) {
      trace[0].values.push_back(r.iter);
      trace[1].values.push_back(r.G);
      trace[2].values.push_back(r.mismatch);
      trace[3].values.push_back(r.step);
    }
    write_csv(path("trace.csv"), trace);
    const int grid = profile_grid(res.potential.cutoff());
    profile("inversion", grid,
            {{"rho", rho.profile().real_samples(grid)},
             {"rho_matched", res.matched_density.real_samples(grid)},
             {"v", res.potential.coefficients().real_samples(grid)}});
    return res.converged ? kExitOk : kExitNonConvergence;
  }

  int nrep_cmd() {
    const DensityField rho = load_density();
    const auto c = construct(rho, cfg_.grid);
    Json j = header();
    j["n_particles"] = c.n;
    j["grid"] = c.grid;
    j["A"] = c.A;
    j["rho_cubed"] = c.rho_cubed;
    j["kinetic"] = c.kinetic;
    j["orbital_kinetic"] = c.orbital_kinetic;
    j["c1"] = c.bounds.c1;
    j["c2"] = c.bounds.c2;
    j["bound"] = c.bound();
    const bool holds = c.kinetic <= c.bound() * (1.0 + 1e-12);
    j["bound_holds"] = holds;
    j["reconstruction_error"] = c.reconstruction_error;
    j["gram_error"] = c.gram_error;
    j["periodicity_error"] = c.periodicity_error;
    Json orbs = Json::array();
    for (const auto& o : c.orbitals) {
      Json e;
      std::vector<double> re, im;
      for (auto z : o) {
        re.push_back(z.real());
        im.push_back(z.imag());
      }
      e["re"] = re;
      e["im"] = im;
      orbs.push_back(e);
    }
    j["orbitals"] = orbs;
    emit(j);

    std::vector<CsvColumn> cols{{"x", c.x}, {"rho_in", c.rho_in}, {"rho_reconstructed", c.rho_reconstructed}};
    for (int k = 0; k < c.n; ++k) {
      CsvColumn col{"abs_phi_" + std::to_string(k), {}};
      for (auto z : c.orbitals[k]) col.values.push_back(std::abs(z));
      cols.push_back(col);
    }
    write_csv(path("nrep.csv"), cols);
    if (cfg_.svg) write_svg(path("nrep.svg"), "orbital construction", c.x, {cols.begin() + 1, cols.end()});
    const bool ok = holds && c.reconstruction_error <= 1e-10 * std::max(1.0, rho.max_value());
    return ok ? kExitOk : kExitValidation;
  }

  int example_cmd() {
    Json j;
    if (cfg_.topic == "englisch") {
      EnglischParams p{cfg_.a, cfg_.b, cfg_.alpha, cfg_.n};
      j = density_to_json(englisch_density(p, cfg_.cutoff), profile_grid(cfg_.cutoff));
    } else if (cfg_.topic == "cosine") {
      if (!(std::abs(cfg_.amplitude) < 1.0)) throw std::invalid_argument("field 'amplitude' must lie in (-1, 1)");
      TorusFunction f(1);
      f.at(0) = 1.0;
      f.at(1) = f.at(-1) = 0.5 * cfg_.amplitude;
      j = density_to_json(make_density(f, cfg_.n), profile_grid(1));
    } else {
      const int pc = cfg_.potential_cutoff > 0 ? cfg_.potential_cutoff : 2 * cfg_.cutoff;
      j = potential_to_json(delta_potential(cfg_.gamma, pc), profile_grid(pc));
    }
    const std::string text = dump_json(j);
    if (out_given_) {
      prepare_out();
      write_text(path(cfg_.topic + ".json"), text);
    }
    std::cout << text << std::flush;
    return kExitOk;
  }

  std::pair<double, double> bound_pair(const PotentialClass& v, const ModelSpec& spec, Json& j) const {
    if (cfg_.bound_a >= 0.0 && cfg_.bound_b >= 0.0) return {cfg_.bound_a, cfg_.bound_b};
    const auto kb = kinetic_bound_estimate(v, cfg_.eps, spec);
    j["mode"] = kb.mode;
    j["prefactor"] = kb.prefactor;
    j["attainable"] = kb.attainable;
    j["attained"] = kb.attained;
    j["c_emb"] = kb.c_emb;
    if (!kb.attained) {
      throw std::invalid_argument("epsilon " + format_double(cfg_.eps) + " is not attainable; smallest attainable is " +
                                  format_double(kb.attainable));
    }
    return {kb.a, kb.b};
  }

  int verify_cmd() {
    const ModelSpec spec = model();
    Json j = header();
    j["model"] = model_json(spec);
    bool pass = false;
    if (cfg_.topic == "kinetic-bounds") {
      const PotentialClass v = potential(kDeltaBoundCutoff);
      Json b;
      const auto [a, bb] = bound_pair(v, spec, b);
      b["a"] = a;
      b["b"] = bb;
      const auto rep = validate_kinetic_bound(v, a, bb, spec, cfg_.samples, cfg_.seed);
      j["bound"] = b;
      j["report"] = report_json(rep);
      pass = rep.pass();
    } else if (cfg_.topic == "coercivity") {
      const PotentialClass v = potential(kDeltaBoundCutoff);
      Json b;
      const auto [a, bb] = bound_pair(v, spec, b);
      b["a"] = a;
      b["b"] = bb;
      const auto rep = shifted_coercivity_check(spec, v.with_cutoff(std::min(v.cutoff(), 2 * spec.cutoff)), a, bb,
                                                cfg_.samples, cfg_.seed);
      j["bound"] = b;
      j["upper_constant"] = rep.upper_constant;
      j["lower"] = report_json(rep.lower);
      j["upper"] = report_json(rep.upper);
      pass = rep.pass();
    } else if (cfg_.topic == "concavity") {
      const int pc = cfg_.potential_cutoff > 0 ? cfg_.potential_cutoff : spec.cutoff;
      const auto rep = concavity_check(spec, cfg_.samples, pc, cfg_.amplitude, cfg_.seed, ground());
      j["report"] = report_json(rep);
      pass = rep.pass();
    } else if (cfg_.topic == "psi-estimate") {
      const auto rep = psi_density_estimate_check(spec, cfg_.samples, cfg_.seed);
      j["report"] = report_json(rep);
      pass = rep.pass();
    } else if (cfg_.topic == "nrep-bound") {
      std::mt19937_64 rng(cfg_.seed);
      SampleReport rep;
      rep.worst_margin = std::numeric_limits<double>::infinity();
      double worst_reconstruction = 0.0;
      for (int i = 0; i < cfg_.samples; ++i) {
        const auto rho = random_density(spec.n, spec.cutoff, rng);
        const auto c = construct(rho, cfg_.grid);
        const double margin = c.bound() - c.kinetic;
        worst_reconstruction = std::max(worst_reconstruction, c.reconstruction_error);
        ++rep.samples;
        rep.worst_margin = std::min(rep.worst_margin, margin);
        if (margin < 0.0 || c.reconstruction_error > 1e-10) ++rep.violations;
      }
      j["c1"] = tbound_constants(spec.n).c1;
      j["c2"] = tbound_constants(spec.n).c2;
      j["worst_reconstruction_error"] = worst_reconstruction;
      j["report"] = report_json(rep);
      pass = rep.pass();
    } else {
      std::mt19937_64 rng(cfg_.seed);
      std::normal_distribution<double> g;
      const double c = embedding_constant();
      double worst = 0.0;
      SampleReport rep;
      rep.worst_margin = std::numeric_limits<double>::infinity();
      for (int i = 0; i < cfg_.samples; ++i) {
        TorusFunction f(spec.cutoff);
        for (int k = -spec.cutoff; k <= spec.cutoff; ++k) f.at(k) = cplx{g(rng), g(rng)} / (1.0 + k * k);
        const double ratio = norm(f, Space::Linf) / norm(f, Space::H1);
        worst = std::max(worst, ratio);
        ++rep.samples;
        rep.worst_margin = std::min(rep.worst_margin, c - ratio);
        if (ratio > c * (1.0 + 1e-12)) ++rep.violations;
      }
      j["c_emb"] = c;
      j["worst_ratio"] = worst;
      j["report"] = report_json(rep);
      pass = rep.pass();
    }
    j["pass"] = pass;
    emit(j);
    return pass ? kExitOk : kExitValidation;
  }
};

}  // namespace

int run(const std::vector<std::string>& args) {
  RunConfig cfg;
  CLI::App app{"Ground states, N-representability and density inversion on the torus", "torus-vrep"};
  app.set_config("--config", "", "key=value configuration file; flags take precedence");
  app.require_subcommand(1, 1);

  auto positive = CLI::PositiveNumber;
  app.add_option("--n", cfg.n, "particle count")->check(positive);
  app.add_option("--cutoff", cfg.cutoff, "orbital cutoff K")->check(CLI::NonNegativeNumber);
  app.add_flag("--spinful", cfg.spinful, "spin-1/2 particles");
  app.add_option("--interaction", cfg.interaction)->check(CLI::IsMember({"none", "delta", "gaudin"}));
  app.add_option("--interaction-strength", cfg.interaction_strength, "delta interaction coupling");
  app.add_option("--potential", cfg.potential)->check(CLI::IsMember({"zero", "delta", "cosine", "file"}));
  app.add_option("--potential-file", cfg.potential_file);
  app.add_option("--gamma", cfg.gamma, "delta potential strength");
  app.add_option("--amplitude", cfg.amplitude, "cosine amplitude");
  app.add_option("--potential-cutoff", cfg.potential_cutoff)->check(CLI::NonNegativeNumber);
  app.add_option("--density", cfg.density_file, "density JSON, '-' for stdin");
  app.add_option("--a", cfg.a);
  app.add_option("--b", cfg.b);
  app.add_option("--alpha", cfg.alpha);
  app.add_option("--tol-rho", cfg.tol_rho)->check(positive);
  app.add_option("--tol-cert", cfg.tol_cert)->check(positive);
  app.add_option("--tol-energy", cfg.tol_energy)->check(positive);
  app.add_option("--max-iter", cfg.max_iterations)->check(CLI::NonNegativeNumber);
  app.add_option("--proximal", cfg.proximal)->check(CLI::NonNegativeNumber);
  app.add_option("--penalty-mu", cfg.penalty_mu)->check(positive);
  app.add_option("--max-cutoff", cfg.max_cutoff, "raise K until E converges")->check(CLI::NonNegativeNumber);
  app.add_option("--eps", cfg.eps)->check(positive);
  app.add_option("--bound-a", cfg.bound_a);
  app.add_option("--bound-b", cfg.bound_b);
  app.add_option("--samples", cfg.samples)->check(positive);
  app.add_option("--grid", cfg.grid)->check(CLI::NonNegativeNumber);
  auto* out = app.add_option("--out", cfg.out, "output directory");
  app.add_flag("--svg", cfg.svg, "also write SVG plots");
  app.add_option("--seed", cfg.seed);
  app.add_option("--workers", cfg.workers)->check(positive);

  for (const char* name : {"solve", "invert", "nrep"}) app.add_subcommand(name)->fallthrough();
  app.add_subcommand("example")
      ->fallthrough()
      ->add_option("topic", cfg.topic)
      ->required()
      ->check(CLI::IsMember({"englisch", "cosine", "delta"}));
  app.add_subcommand("verify")
      ->fallthrough()
      ->add_option("topic", cfg.topic)
      ->required()
      ->check(CLI::IsMember({"kinetic-bounds", "coercivity", "concavity", "psi-estimate", "nrep-bound", "embedding"}));

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();

  try {
    return Runner(cfg).dispatch(out->count() > 0);
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace tvr
