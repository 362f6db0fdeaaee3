// SPDX-License-Identifier: Apache-2.0
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pedrad/config.hpp"
#include "pedrad/error.hpp"
#include "pedrad/parallel.hpp"
#include "pedrad/pipeline.hpp"
#include "pedrad/text_io.hpp"

namespace {

struct Common {
  std::string config;
  std::string output;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config, "configuration file")->required();
  cmd->add_option("-o,--output", c.output, "override [paths] output_dir");
}

pedrad::RunConfig load(const Common& c) {
  auto cfg = pedrad::load_config(c.config);
  if (!c.output.empty()) cfg.paths.output_dir = c.output;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pedrad: pedestrian radar signature simulator"};
  app.footer("\n" + pedrad::config_help_text());
  app.require_subcommand(1);

  int threads = 0;
  bool quiet = false;
  app.add_option("--threads", threads, "worker threads; 0 uses every hardware thread")->check(CLI::NonNegativeNumber);
  app.add_flag("-q,--quiet", quiet, "suppress progress messages");

  Common rcs_opts, est_opts, synth_opts, sig_opts, cmp_opts, sweep_opts, pipe_opts;
  bool bistatic = false;
  auto* rcs = app.add_subcommand("rcs", "trace the mesh sequence and write rcs.csv");
  add_common(rcs, rcs_opts);
  rcs->add_flag("--bistatic", bistatic, "also write a 0..359 deg bistatic sweep of the first frame");

  auto* est = app.add_subcommand("estimate", "solve point-scatterer reflectivities per block");
  add_common(est, est_opts);
  auto* synth = app.add_subcommand("synth", "synthesize radar data cubes from coefficients");
  add_common(synth, synth_opts);
  auto* sig = app.add_subcommand("signature", "range-time, Doppler-time and range-Doppler signatures from cubes");
  add_common(sig, sig_opts);

  std::string sim_path, meas_path;
  bool no_cfar = false;
  auto* cmp = app.add_subcommand("compare", "NMSE and SSIM of simulated against measured signatures");
  add_common(cmp, cmp_opts);
  cmp->add_option("--sim", sim_path, "simulated cube file or cube directory")->required();
  cmp->add_option("--measured", meas_path, "measured cube file or cube directory")->required();
  cmp->add_flag("--no-cfar", no_cfar, "skip OS-CFAR on the measured side");

  auto* sweep = app.add_subcommand("sweep", "mean regression residual over (M, L) candidates");
  add_common(sweep, sweep_opts);
  auto* pipe = app.add_subcommand("pipeline", "rcs, estimate, synth, signature (and compare) in one run");
  add_common(pipe, pipe_opts);

  std::string ref_out;
  auto* ref = app.add_subcommand("config-reference", "print the configuration reference as Markdown");
  ref->add_option("-o,--output", ref_out, "write to a file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? pedrad::kExitOk : pedrad::kExitValidation;
  }

  pedrad::RunOptions run;
  run.threads = pedrad::resolve_threads(threads);
  run.log = quiet ? nullptr : &std::cerr;
  try {
    if (ref->parsed()) {
      if (ref_out.empty()) std::cout << pedrad::config_reference_markdown();
      else pedrad::text::write_file(ref_out, pedrad::config_reference_markdown());
      return pedrad::kExitOk;
    }
    if (rcs->parsed()) {
      auto cfg = load(rcs_opts);
      if (bistatic) cfg.aspect.bistatic_sweep = true;
      return pedrad::cmd_rcs(cfg, run);
    }
    if (est->parsed()) return pedrad::cmd_estimate(load(est_opts), run);
    if (synth->parsed()) return pedrad::cmd_synth(load(synth_opts), run);
    if (sig->parsed()) return pedrad::cmd_signature(load(sig_opts), run);
    if (cmp->parsed()) {
      auto cfg = load(cmp_opts);
      if (no_cfar) cfg.compare.cfar = false;
      return pedrad::cmd_compare(cfg, sim_path, meas_path, run);
    }
    if (sweep->parsed()) return pedrad::cmd_sweep(load(sweep_opts), run);
    if (pipe->parsed()) return pedrad::cmd_pipeline(load(pipe_opts), run);
  } catch (const pedrad::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return pedrad::kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return pedrad::kExitValidation;
  }
  return pedrad::kExitValidation;
}
