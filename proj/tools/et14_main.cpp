#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "et14/errors.hpp"
#include "et14/runner.hpp"
#include "et14/simd_batch.hpp"

namespace {

void add_common(CLI::App* cmd, et14::RunConfig& cfg) {
  cmd->add_option("--seed", cfg.seed, "random seed (determines every output byte)");
  cmd->add_option("--samples", cfg.samples, "number of sampled states");
  cmd->add_option("--form", cfg.form, "closure form: x | eta | sub5");
  cmd->add_option("--closure", cfg.closure_path, "closure spec JSON file");
  cmd->add_option("--state", cfg.state_path, "state JSON file");
  cmd->add_option("--out", cfg.out_path, "summary JSON output path");
  cmd->add_option("--rows", cfg.rows_path, "per-state rows output path");
  cmd->add_option("--format", cfg.format, "rows format: json | csv");
  cmd->add_option("--threads", cfg.threads, "worker threads for the sweeps");
  cmd->add_option("--families", cfg.families, "bundled random families per suite");
  cmd->add_option("--degree", cfg.degree, "polynomial degree of bundled families");
  cmd->add_option("--tol-identity", cfg.tol_identity, "exact-derivative identity tolerance");
  cmd->add_option("--tol-fd", cfg.tol_fd, "finite-difference cross-check tolerance");
  cmd->add_option("--tol-negative", cfg.tol_negative, "negative-witness floor");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"et14: exact 14-moment closure identity verifier"};
  app.require_subcommand(1);

  et14::RunConfig cfg;

  auto* verify = app.add_subcommand("verify", "frame-change, gradient and compatibility sweeps");
  add_common(verify, cfg);
  verify->add_flag("--tamper-q1", cfg.tamper_q1,
                   "inject a Q1 dependence into H0 (must make the run fail)");

  auto* convexity = app.add_subcommand("convexity", "second-derivative block analysis");
  add_common(convexity, cfg);
  convexity->add_flag("--reproduce-form5-failure", cfg.reproduce_form5_failure,
                      "sweep the X-form families and demand an indefinite verdict each time");
  std::vector<std::string> scan_tokens;
  convexity->add_option("--scan-K", scan_tokens,
                        "scan random K-families, e.g. --scan-K degree=2 count=50")
      ->expected(-1);

  auto* reduce = app.add_subcommand("reduce", "representation-theorem round trips");
  add_common(reduce, cfg);

  auto* subsystem = app.add_subcommand("subsystem", "5-moment reduction checks");
  add_common(subsystem, cfg);

  auto* kernels = app.add_subcommand("kernels", "print the sweep kernel that would run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (kernels->parsed()) {
      std::printf("x-sweep kernel: %s\n", et14::batch::active_kernel_name());
      return 0;
    }
    for (const auto& tok : scan_tokens) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw et14::ParseError("bad --scan-K token: " + tok);
      const std::string key = tok.substr(0, eq);
      const int value = std::stoi(tok.substr(eq + 1));
      if (key == "degree")
        cfg.scan_k_degree = value;
      else if (key == "count")
        cfg.scan_k_count = value;
      else
        throw et14::ParseError("bad --scan-K key: " + key);
    }
    if (verify->parsed()) cfg.command = "verify";
    if (convexity->parsed()) cfg.command = "convexity";
    if (reduce->parsed()) cfg.command = "reduce";
    if (subsystem->parsed()) cfg.command = "subsystem";

    const et14::RunResult r = et14::run_command(cfg);
    if (cfg.out_path.empty()) std::fputs((r.summary.to_json().dump(2) + "\n").c_str(), stdout);
    if (r.exit_code != 0) {
      for (const auto& c : r.summary.checks)
        if (!c.pass) std::fprintf(stderr, "FAILED check: %s (%s)\n", c.name.c_str(),
                                  c.paper_ref.c_str());
    }
    return r.exit_code;
  } catch (const et14::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
