// mgfit: reverse-engineer a return series with game-playing agent ensembles
// and predict next-day directional moves.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mgfit/commands.hpp"
#include "mgfit/errors.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::vector<std::string> variants;
  bool no_resume = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_variants) {
  cmd->add_option("--config", flags.config_path, "run configuration (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", flags.seed, "override the master seed");
  cmd->add_option("--workers", flags.workers, "worker threads (0 = all cores)");
  if (with_variants)
    cmd->add_option("--variant", flags.variants,
                    "restrict to these variants (repeatable)");
  cmd->add_flag("--no-resume", flags.no_resume, "recompute checkpointed days");
}

mgfit::RunConfig resolve(const CommonFlags& flags) {
  mgfit::RunConfig cfg = mgfit::load_config(flags.config_path);
  if (flags.seed) cfg.master_seed = *flags.seed;
  if (flags.workers) cfg.workers = *flags.workers;
  if (flags.no_resume) cfg.resume = false;
  if (!flags.variants.empty()) {
    cfg.variants.clear();
    for (const auto& name : flags.variants) {
      const auto v = mgfit::variant_from_string(name);
      if (!v) throw mgfit::ConfigError("unknown variant '" + name + "'");
      cfg.variants.push_back(*v);
    }
  }
  mgfit::finalize(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reverse-engineer financial return series with agent-based games"};
  app.require_subcommand(1);

  CommonFlags predict_flags, blackbox_flags, report_flags;
  auto* predict = app.add_subcommand(
      "predict", "sliding-window next-day predictions over a price CSV");
  add_common(predict, predict_flags, true);
  auto* blackbox = app.add_subcommand(
      "blackbox", "plant a hidden ensemble, recover it blind, score recovery");
  add_common(blackbox, blackbox_flags, false);
  auto* report = app.add_subcommand(
      "report", "rebuild report.json/report.txt from recorded predictions");
  add_common(report, report_flags, false);
  auto* reference = app.add_subcommand(
      "config-reference", "print the config file reference with all defaults");

  CLI11_PARSE(app, argc, argv);

  try {
    if (reference->parsed()) {
      std::cout << mgfit::config_reference();
      return 0;
    }
    if (predict->parsed()) mgfit::cmd_predict(resolve(predict_flags), std::cout);
    if (blackbox->parsed()) mgfit::cmd_blackbox(resolve(blackbox_flags), std::cout);
    if (report->parsed()) mgfit::cmd_report(resolve(report_flags), std::cout);
    return 0;
  } catch (const mgfit::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const mgfit::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
}
