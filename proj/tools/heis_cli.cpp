// Experiment runner for the Heisenberg rectangle toolkit. Subcommands sweep
// the library's operations and emit CSV with a reproducibility header line
// (tool version, schema, seed, config hash, full config). All randomness
// derives from --seed through per-row streams, so sweep order and parallelism
// cannot change any number.
//
// Exit codes: 0 success, 1 usage/config error, 2 acceptance failure.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "heis/acceptance.hpp"
#include "heis/core.hpp"
#include "heis/covers.hpp"
#include "heis/energy.hpp"
#include "heis/limsup.hpp"
#include "heis/rng.hpp"
#include "heis/svf.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kSchemaVersion = 1;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// One-line rendering of the executed subcommand's configuration (including
// defaulted options) for the CSV header.
std::string flatten_config(const CLI::App& app) {
  const CLI::App* node = &app;
  std::string path;
  while (!node->get_subcommands().empty()) {
    node = node->get_subcommands().front();
    if (!path.empty()) path += " ";
    path += node->get_name();
  }
  std::string flat = path;
  std::istringstream in(node->config_to_str(true, false));
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line.front() == '[') continue;
    flat += " " + line;
  }
  return flat;
}

struct Output {
  std::ofstream file;
  std::ostream* os = &std::cout;

  // --out is resolved against HEIS_OUT_DIR when relative and the variable is
  // set; empty --out means stdout.
  bool open(const std::string& path) {
    if (path.empty()) return true;
    std::string full = path;
    const char* dir = std::getenv("HEIS_OUT_DIR");
    if (dir && *dir && path.front() != '/') {
      full = std::string(dir) + "/" + path;
    }
    file.open(full);
    if (!file) {
      std::cerr << "heis: cannot open output file: " << full << "\n";
      return false;
    }
    os = &file;
    return true;
  }
};

void write_header(std::ostream& os, const std::string& config, std::uint64_t seed) {
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(fnv1a(config)));
  os << "# heis " << kVersion << " schema=" << kSchemaVersion << " seed=" << seed
     << " config_hash=" << hash << "\n";
  os << "# config: " << config << "\n";
}

struct SweepArgs {
  std::vector<double> t;
  std::vector<double> r1;
  std::vector<double> r2;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_phi(const SweepArgs& args, const std::string& config) {
  Output out;
  if (!out.open(args.out)) return 1;
  write_header(*out.os, config, args.seed);
  *out.os << "r1,r2,t,branch,phi\n";
  for (double r1 : args.r1) {
    for (double r2 : args.r2) {
      for (double t : args.t) {
        const heis::PhiValue v = heis::phi(t, heis::Radii(r1, r2));
        *out.os << num(r1) << "," << num(r2) << "," << num(t) << "," << to_string(v.branch)
                << "," << num(v.value) << "\n";
      }
    }
  }
  return 0;
}

int cmd_threshold(double alpha, double beta, const std::string& out_path, std::uint64_t seed,
                  const std::string& config) {
  Output out;
  if (!out.open(out_path)) return 1;
  write_header(*out.os, config, seed);
  *out.os << "alpha,beta,threshold,exact_num,exact_den\n";
  const auto th = heis::dimension_threshold(heis::PowerLawSeq(alpha, beta));
  *out.os << num(alpha) << "," << num(beta) << "," << num(th.value) << ",";
  if (th.exact) {
    *out.os << th.exact->num << "," << th.exact->den;
  } else {
    *out.os << ",";
  }
  *out.os << "\n";
  return 0;
}

int cmd_cover(const SweepArgs& args, std::uint64_t samples, const std::string& config) {
  Output out;
  if (!out.open(args.out)) return 1;
  write_header(*out.os, config, args.seed);
  *out.os << "r1,r2,t,construction,element_count,density_claim,max_gap,violations,content,phi,"
             "content_over_phi\n";
  const heis::Rng base(args.seed);
  std::uint64_t row = 0;
  for (double r1 : args.r1) {
    for (double r2 : args.r2) {
      for (double t : args.t) {
        const heis::Radii r(r1, r2);
        const heis::Cover cover = heis::build_cover(r, t);
        const heis::DensityReport rep = heis::verify_density(cover, samples, base.stream(row));
        const double cont = heis::content(cover, t);
        const double phi_v = heis::phi(t, r).value;
        *out.os << num(r1) << "," << num(r2) << "," << num(t) << ","
                << to_string(cover.construction) << "," << cover.element_count() << ","
                << num(cover.density_claim) << "," << num(rep.max_gap) << "," << rep.violations
                << "," << num(cont) << "," << num(phi_v) << "," << num(cont / phi_v) << "\n";
        ++row;
      }
    }
  }
  return 0;
}

int cmd_energy(const SweepArgs& args, std::uint64_t pairs, const std::string& config) {
  Output out;
  if (!out.open(args.out)) return 1;
  write_header(*out.os, config, args.seed);
  *out.os << "r1,r2,t,n_pairs,seed,energy,stderr,bound,energy_over_bound,cap_lower,phi,"
             "cap_over_phi\n";
  const heis::Rng base(args.seed);
  std::uint64_t row = 0;
  for (double r1 : args.r1) {
    for (double r2 : args.r2) {
      for (double t : args.t) {
        const heis::Radii r(r1, r2);
        const heis::EnergyEstimate est = heis::riesz_energy_rect(r, t, pairs, base.stream(row));
        const double bound = heis::energy_bound_rect(t, r).bound;
        const double cap = heis::capacity_lower_bound(r, t, est);
        const double phi_v = heis::phi(t, r).value;
        *out.os << num(r1) << "," << num(r2) << "," << num(t) << "," << pairs << "," << args.seed
                << "," << num(est.value) << "," << num(est.stderr_) << "," << num(bound) << ","
                << num(est.value / bound) << "," << num(cap) << "," << num(phi_v) << ","
                << num(cap / phi_v) << "\n";
        ++row;
      }
    }
  }
  return 0;
}

int cmd_simulate(double alpha, double beta, const std::vector<double>& window_spec,
                 const std::vector<std::uint64_t>& n_list, const std::vector<double>& deltas,
                 std::uint64_t seed, const std::string& out_path, const std::string& config) {
  if (window_spec.size() != 6) {
    std::cerr << "heis simulate: --window needs six numbers x0,x1,y0,y1,z0,z1\n";
    return 1;
  }
  if (!deltas.empty() && deltas.size() != n_list.size()) {
    std::cerr << "heis simulate: --delta list must match --n-list length\n";
    return 1;
  }
  Output out;
  if (!out.open(out_path)) return 1;
  write_header(*out.os, config, seed);
  *out.os << "N,delta,occupied,log_inv_delta,log_occupied\n";

  const heis::Window w(window_spec[0], window_spec[1], window_spec[2], window_spec[3],
                       window_spec[4], window_spec[5]);
  const heis::PowerLawSeq seq(alpha, beta);
  const heis::Rng base(seed);
  std::uint64_t max_n = 0;
  for (std::uint64_t n : n_list) max_n = std::max(max_n, 2 * n);
  const auto centers = heis::sample_centers(w, max_n, base.stream(0));

  std::vector<std::pair<double, std::uint64_t>> counts;
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    const std::uint64_t n = n_list[i];
    const double delta =
        deltas.empty() ? 1.0 / std::sqrt(static_cast<double>(n)) : deltas[i];
    const heis::Grid grid(delta);
    const std::uint64_t occupied = heis::occupied_cells(centers, seq, n, 2 * n, grid, &w);
    counts.emplace_back(delta, occupied);
    *out.os << n << "," << num(delta) << "," << occupied << "," << num(std::log(1.0 / delta))
            << "," << num(std::log(static_cast<double>(occupied))) << "\n";
  }
  if (counts.size() >= 3) {
    const auto fit = heis::dimension_estimate(counts);
    *out.os << "# fit slope=" << num(fit.slope) << " r2=" << num(fit.r2_fit) << "\n";
  }
  return 0;
}

int cmd_coeffs(int blocks, const std::string& weights, std::uint64_t horizon,
               const std::string& out_path, std::uint64_t seed, const std::string& config) {
  std::function<double(std::uint64_t)> weight;
  if (weights == "unit") {
    weight = [](std::uint64_t) { return 1.0; };
  } else if (weights == "log") {
    weight = [](std::uint64_t k) { return 1.0 + std::log(static_cast<double>(k)); };
  } else {
    std::cerr << "heis gadgets coeffs: --weights must be 'unit' or 'log'\n";
    return 1;
  }
  Output out;
  if (!out.open(out_path)) return 1;
  write_header(*out.os, config, seed);
  *out.os << "n,k,a\n";
  const heis::BlockTable table = heis::block_coefficients(weight, blocks, horizon);
  for (std::size_t n = 1; n <= table.blocks.size(); ++n) {
    const auto& blk = table.blocks[n - 1];
    for (std::uint64_t k = blk.first; k <= blk.last; ++k) {
      *out.os << n << "," << k << "," << num(table.at(n, k)) << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heisenberg-group rectangle geometry and limsup-set toolkit"};
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "Key-value config file; command-line flags win on conflict");
  app.require_subcommand(1);

  SweepArgs phi_args;
  auto* phi_cmd = app.add_subcommand("phi", "Evaluate the directed singular value function");
  phi_cmd->configurable();
  phi_cmd->add_option("--t", phi_args.t, "Exponents t in [0,4]")->required()->delimiter(',');
  phi_cmd->add_option("--r1", phi_args.r1, "Horizontal radii")->required()->delimiter(',');
  phi_cmd->add_option("--r2", phi_args.r2, "Vertical radii (sqrt of half-extent)")
      ->required()
      ->delimiter(',');
  phi_cmd->add_option("--out", phi_args.out, "Output CSV path (default stdout)");

  double alpha = 0.5, beta = 0.5;
  std::string threshold_out;
  std::uint64_t threshold_seed = 0;
  auto* th_cmd = app.add_subcommand("threshold", "Dimension threshold for power-law radii");
  th_cmd->configurable();
  th_cmd->add_option("--alpha", alpha, "Exponent of r1 = n^-alpha")->required();
  th_cmd->add_option("--beta", beta, "Exponent of r2 = n^-beta")->required();
  th_cmd->add_option("--out", threshold_out, "Output CSV path (default stdout)");

  SweepArgs cover_args;
  std::uint64_t cover_samples = 10000;
  auto* cover_cmd = app.add_subcommand("cover", "Build covers, verify density, report content");
  cover_cmd->configurable();
  cover_cmd->add_option("--t", cover_args.t, "Exponents t in [0,4]")->required()->delimiter(',');
  cover_cmd->add_option("--r1", cover_args.r1, "Horizontal radii")->required()->delimiter(',');
  cover_cmd->add_option("--r2", cover_args.r2, "Vertical radii")->required()->delimiter(',');
  cover_cmd->add_option("--samples", cover_samples, "Density-check samples per cover");
  cover_cmd->add_option("--seed", cover_args.seed, "Master seed");
  cover_cmd->add_option("--out", cover_args.out, "Output CSV path (default stdout)");

  SweepArgs energy_args;
  std::uint64_t energy_pairs = 100000;
  auto* energy_cmd =
      app.add_subcommand("energy", "Monte Carlo rectangle energies and capacity bounds");
  energy_cmd->configurable();
  energy_cmd->add_option("--t", energy_args.t, "Exponents t in (0,4) excluding 1,2,3")
      ->required()
      ->delimiter(',');
  energy_cmd->add_option("--r1", energy_args.r1, "Horizontal radii")->required()->delimiter(',');
  energy_cmd->add_option("--r2", energy_args.r2, "Vertical radii")->required()->delimiter(',');
  energy_cmd->add_option("--pairs", energy_pairs, "Point pairs per estimate");
  energy_cmd->add_option("--seed", energy_args.seed, "Master seed");
  energy_cmd->add_option("--out", energy_args.out, "Output CSV path (default stdout)");

  SweepArgs capacity_args;
  std::uint64_t capacity_pairs = 100000;
  auto* capacity_cmd =
      app.add_subcommand("capacity", "Capacity lower bounds (same sweep and schema as energy)");
  capacity_cmd->configurable();
  capacity_cmd->add_option("--t", capacity_args.t, "Exponents t in (0,4) excluding 1,2,3")
      ->required()
      ->delimiter(',');
  capacity_cmd->add_option("--r1", capacity_args.r1, "Horizontal radii")
      ->required()
      ->delimiter(',');
  capacity_cmd->add_option("--r2", capacity_args.r2, "Vertical radii")->required()->delimiter(',');
  capacity_cmd->add_option("--pairs", capacity_pairs, "Point pairs per estimate");
  capacity_cmd->add_option("--seed", capacity_args.seed, "Master seed");
  capacity_cmd->add_option("--out", capacity_args.out, "Output CSV path (default stdout)");

  double sim_alpha = 0.5, sim_beta = 0.5;
  std::vector<double> sim_window = {0, 1, 0, 1, 0, 1};
  std::vector<std::uint64_t> sim_n = {1000, 10000, 100000};
  std::vector<double> sim_delta;
  std::uint64_t sim_seed = 0;
  std::string sim_out;
  auto* sim_cmd = app.add_subcommand("simulate", "Box-count random rectangle generations");
  sim_cmd->configurable();
  sim_cmd->add_option("--alpha", sim_alpha, "Exponent of r1 = n^-alpha");
  sim_cmd->add_option("--beta", sim_beta, "Exponent of r2 = n^-beta");
  sim_cmd->add_option("--window", sim_window, "Window x0,x1,y0,y1,z0,z1")->delimiter(',');
  sim_cmd->add_option("--n-list", sim_n, "Generation starts N (counts [N, 2N])")->delimiter(',');
  sim_cmd->add_option("--delta", sim_delta, "Explicit grid steps (default N^-1/2)")
      ->delimiter(',');
  sim_cmd->add_option("--seed", sim_seed, "Master seed");
  sim_cmd->add_option("--out", sim_out, "Output CSV path (default stdout)");

  auto* gadgets_cmd = app.add_subcommand("gadgets", "Auxiliary constructions");
  gadgets_cmd->require_subcommand(1);
  int coeff_blocks = 8;
  std::string coeff_weights = "unit";
  std::uint64_t coeff_horizon = 1ULL << 24;
  std::uint64_t coeff_seed = 0;
  std::string coeff_out;
  auto* coeffs_cmd = gadgets_cmd->add_subcommand("coeffs", "Block coefficient table a[n][k]");
  coeffs_cmd->configurable();
  coeffs_cmd->add_option("--blocks", coeff_blocks, "Number of blocks n");
  coeffs_cmd->add_option("--weights", coeff_weights, "Weight sequence: unit | log");
  coeffs_cmd->add_option("--horizon", coeff_horizon, "Largest available index k");
  coeffs_cmd->add_option("--out", coeff_out, "Output CSV path (default stdout)");

  std::uint64_t accept_seed = 0;
  auto* accept_cmd = app.add_subcommand("accept", "Run the acceptance suite");
  accept_cmd->add_option("--seed", accept_seed, "Master seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  const std::string config = flatten_config(app);
  try {
    if (phi_cmd->parsed()) return cmd_phi(phi_args, config);
    if (th_cmd->parsed()) return cmd_threshold(alpha, beta, threshold_out, threshold_seed, config);
    if (cover_cmd->parsed()) return cmd_cover(cover_args, cover_samples, config);
    if (energy_cmd->parsed()) return cmd_energy(energy_args, energy_pairs, config);
    if (capacity_cmd->parsed()) return cmd_energy(capacity_args, capacity_pairs, config);
    if (sim_cmd->parsed()) {
      return cmd_simulate(sim_alpha, sim_beta, sim_window, sim_n, sim_delta, sim_seed, sim_out,
                          config);
    }
    if (gadgets_cmd->parsed() && coeffs_cmd->parsed()) {
      return cmd_coeffs(coeff_blocks, coeff_weights, coeff_horizon, coeff_out, coeff_seed, config);
    }
    if (accept_cmd->parsed()) {
      std::cout << "acceptance suite, seed " << accept_seed << "\n";
      const auto results = heis::acceptance::run_all(accept_seed, &std::cout);
      if (!heis::acceptance::all_pass(results)) {
        for (const auto& r : results) {
          if (!r.pass) {
            std::cout << "first failing criterion: " << r.id << " " << r.name << "\n";
            break;
          }
        }
        return 2;
      }
      std::cout << "all criteria passed\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "heis: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "heis: no subcommand executed\n";
  return 1;
}
