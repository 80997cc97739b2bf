#include "ebcm/commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ebcm/alpha_scan.hpp"
#include "ebcm/config.hpp"
#include "ebcm/csv_io.hpp"
#include "ebcm/errors.hpp"
#include "ebcm/fringe_fit.hpp"

namespace ebcm {

using nlohmann::json;

namespace {

constexpr const char* kSeedingScheme =
    "sub_seed = derive_seed(master_seed, [1, phi0_index, protocol_key, set_index]); "
    "derive_seed chains SplitMix64 over the key path; each cell runs mt19937_64 seeded with "
    "SplitMix64(sub_seed); protocol_key: fixed-1=1, fixed+1=2, random=random-per-1=3, "
    "random-per-N=256+N";

RunConfig load(const CommandOptions& opts) {
  RunConfig rc = opts.config.empty() ? RunConfig{} : load_config(opts.config);
  if (opts.seed) rc.experiment.master_seed = *opts.seed;
  rc.validate();
  return rc;
}

json meta(const std::string& command, const RunConfig& rc, const char* columns) {
  return json{{"ebcm_meta_version", 1},
              {"command", command},
              {"config", config_to_json(rc)},
              {"master_seed", rc.experiment.master_seed},
              {"photons_per_set", rc.experiment.photons_per_set},
              {"seeding", kSeedingScheme},
              {"columns", columns}};
}

void write_outputs(const CommandOptions& opts, const std::string& table, const json& meta) {
  if (opts.out.empty()) throw IoError("no output path given");
  write_text_file(opts.out, table);
  write_text_file(meta_path_for(opts.out), meta.dump(2) + "\n");
}

// Fit preconditions checked before any simulation time is spent.
void require_fittable_grid(const PhaseGrid& g) {
  const double span = (g.stop - g.start) / g.count * (g.count - 1);
  if (g.count < 6) throw ConfigError("phi0_grid.count", "fitting needs at least 6 phi0 points");
  if (span < std::numbers::pi - 1e-12) {
    throw ConfigError("phi0_grid", "fitting needs phi0 points spanning at least pi");
  }
}

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const FitFailure& e) {
    err << "fit failure: " << e.what() << '\n';
    return kExitFitFailure;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInternal;
  }
}

std::vector<Context> contexts_for(const PhaseProtocol& p) {
  if (p.is_random()) return {Context::all, Context::x_minus, Context::x_plus};
  return {Context::all};
}

}  // namespace

int cmd_sweep(const CommandOptions& opts, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig rc = load(opts);
    const auto records = run_sweep(rc.experiment, opts.threads);
    std::ostringstream table;
    write_records(table, records);
    write_outputs(opts, table.str(), meta("sweep", rc, kRecordColumns));
    return kExitOk;
  });
}

int cmd_alpha_scan(const CommandOptions& opts, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig rc = load(opts);
    const auto reference =
        simulate_qm_reference(rc.experiment, PhaseProtocol::random_per_photon(),
                              derive_seed(rc.experiment.master_seed, {rc.reference_seed}));
    ExperimentConfig prediction = rc.experiment;
    prediction.burn_in = rc.prediction_burn_in;
    const auto result = alpha_scan(prediction, rc.alpha_grid, reference, rc.replicas, opts.threads);

    std::ostringstream table;
    write_alpha_scan(table, result);
    json m = meta("alpha-scan", rc, kAlphaScanColumns);
    m["replicas"] = result.replicas;
    m["replica_seeds"] = result.replica_seeds;
    m["reference_seed"] = rc.reference_seed;
    m["n_free"] = 0;
    m["reference"] = "quantum prediction with Poisson noise, random x per photon";
    write_outputs(opts, table.str(), m);
    return kExitOk;
  });
}

int cmd_switch_compare(const CommandOptions& opts, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig rc = load(opts);
    require_fittable_grid(rc.experiment.grid);
    const auto cmp = run_switch_rate_comparison(rc.experiment, rc.switch_block, opts.threads);
    const std::string block_tag = PhaseProtocol::random_per_n(rc.switch_block).tag();

    std::ostringstream table;
    table << "# ebcm switch-compare v1\n" << kSwitchColumns << '\n';
    bool all_ok = true;
    for (auto c : {Context::x_minus, Context::x_plus, Context::all}) {
      std::map<std::string, FitResult> fits;
      for (const auto& [tag, recs] : {std::pair{std::string("random"), &cmp.per_photon},
                                      std::pair{block_tag, &cmp.per_block}}) {
        for (const auto& pt : fringe_points(*recs, c)) {
          table << "fringe," << tag << ',' << context_tag(c) << ',' << format_real(pt.phi0) << ','
                << format_real(pt.counts) << ",,,,,,\n";
        }
        const FitResult fit = fit_fringe(*recs, c);
        all_ok = all_ok && fit.converged;
        fits[tag] = fit;
        table << "fit," << tag << ',' << context_tag(c) << ",,,," << format_real(fit.phase_offset)
              << ',' << format_real(fit.visibility) << ",," << format_real(fit.sigma[2]) << ','
              << int{fit.converged} << '\n';
      }
      const FitResult& a = fits["random"];
      const FitResult& b = fits[block_tag];
      if (a.converged && b.converged) {
        const PhaseShift s = phase_shift_between(a, b);
        table << "summary,random-vs-" << block_tag << ',' << context_tag(c) << ",,,,,,"
              << format_real(s.shift) << ',' << format_real(s.sigma) << ",1\n";
      } else {
        table << "summary,random-vs-" << block_tag << ',' << context_tag(c) << ",,,,,,,,0\n";
      }
    }
    json m = meta("switch-compare", rc, kSwitchColumns);
    m["switch_block"] = rc.switch_block;
    write_outputs(opts, table.str(), m);
    if (!all_ok) {
      err << "fit failure: at least one fringe fit did not converge\n";
      return kExitFitFailure;
    }
    return kExitOk;
  });
}

int cmd_fit(const CommandOptions& opts, std::ostream& err) {
  return guarded(err, [&] {
    std::ifstream in(opts.in);
    if (!in) throw IoError("cannot read records table " + opts.in.string());
    const auto records = read_records(in);

    std::vector<std::string> order;
    std::map<std::string, std::vector<FringeRecord>> groups;
    for (const auto& r : records) {
      const auto tag = r.protocol.tag();
      if (!groups.count(tag)) order.push_back(tag);
      groups[tag].push_back(r);
    }

    std::vector<FitRow> rows;
    bool all_ok = true;
    for (const auto& tag : order) {
      const auto& recs = groups[tag];
      for (auto c : contexts_for(recs.front().protocol)) {
        FitRow row{tag, c, fit_fringe(recs, c)};
        all_ok = all_ok && row.fit.converged;
        rows.push_back(row);
      }
    }
    std::ostringstream table;
    write_fits(table, rows);
    if (opts.out.empty()) throw IoError("no output path given");
    write_text_file(opts.out, table.str());
    if (!all_ok) {
      err << "fit failure: at least one fringe fit did not converge\n";
      return kExitFitFailure;
    }
    return kExitOk;
  });
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Event-based memory beamsplitter interferometer simulator"};
  app.require_subcommand(1);

  CommandOptions opts;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "Run configuration (JSON)");
    sub->add_option("--out", opts.out, "Output table path")->required();
    sub->add_option("--seed", seed, "Override master_seed");
    sub->add_option("--threads", opts.threads, "Worker threads")->check(CLI::PositiveNumber);
  };

  auto* sweep = app.add_subcommand("sweep", "Run the acquisition schedule");
  add_common(sweep);
  auto* scan = app.add_subcommand("alpha-scan", "Chi-square of reference data versus EBCM per alpha");
  add_common(scan);
  auto* sw = app.add_subcommand("switch-compare", "Per-photon versus per-block switching shift");
  add_common(sw);
  auto* fit = app.add_subcommand("fit", "Fit fringes of a records table");
  fit->add_option("--in", opts.in, "Records table from `sweep`")->required();
  fit->add_option("--out", opts.out, "Fit table path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  for (auto* sub : {sweep, scan, sw}) {
    if (sub->parsed() && sub->count("--seed") > 0) opts.seed = seed;
  }

  if (sweep->parsed()) return cmd_sweep(opts, std::cerr);
  if (scan->parsed()) return cmd_alpha_scan(opts, std::cerr);
  if (sw->parsed()) return cmd_switch_compare(opts, std::cerr);
  return cmd_fit(opts, std::cerr);
}

}  // namespace ebcm
