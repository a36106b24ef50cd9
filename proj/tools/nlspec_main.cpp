#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "nlspec/config.hpp"
#include "nlspec/runner.hpp"

namespace {

constexpr const char* kKinds = "eig|sweep|exhaust|compare_local|eigfn_conv|growth|invariance|mono_m0|check_all";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Principal eigenvalues of nonlocal dispersal operators"};
  app.set_version_flag("--version", std::string(NLSPEC_VERSION));
  std::string kind_name;
  std::string config_path;
  std::string out_dir;
  unsigned threads = 1;
  bool strict = false;
  app.add_option("kind", kind_name, std::string("Experiment kind: ") + kKinds)->required();
  app.add_option("--config", config_path, "Path to the experiment config")->required();
  app.add_option("--out", out_dir, "Output directory (default: the config's output key)");
  app.add_option("--threads", threads, "Worker threads; NLSPEC_THREADS overrides")->check(CLI::PositiveNumber);
  app.add_flag("--strict", strict, "Treat warnings as invariant violations");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : nlspec::kExitUsage;
  }

  const auto kind = nlspec::experiment_kind_from_string(kind_name);
  if (!kind) {
    std::cerr << "error: unknown kind '" << kind_name << "' (expected " << kKinds << ")\n";
    return nlspec::kExitUsage;
  }
  if (const char* env = std::getenv("NLSPEC_THREADS"); env && *env) {
    try {
      std::size_t used = 0;
      const long v = std::stol(env, &used);
      if (used != std::string(env).size() || v < 1) throw std::invalid_argument(env);
      threads = static_cast<unsigned>(v);
    } catch (const std::exception&) {
      std::cerr << "error: NLSPEC_THREADS must be a positive integer, got '" << env << "'\n";
      return nlspec::kExitUsage;
    }
  }

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read config file " << config_path << '\n';
    return nlspec::kExitUsage;
  }
  std::ostringstream text;
  text << in.rdbuf();
  const nlspec::ParseOutcome parsed = nlspec::parse_config(text.str(), kind);
  if (!parsed.ok()) {
    for (const auto& e : parsed.errors) std::cerr << config_path << ": " << nlspec::format_issue(e) << '\n';
    return nlspec::kExitUsage;
  }

  nlspec::RunOptions opts;
  opts.out_dir = out_dir.empty() ? parsed.config->output : out_dir;
  opts.threads = threads;
  opts.strict = strict;
  opts.config_path = config_path;
  const nlspec::RunOutcome outcome = nlspec::run(*parsed.config, opts, std::cerr);
  if (outcome.exit_code == nlspec::kExitOk) std::cout << "wrote " << opts.out_dir.string() << '\n';
  return outcome.exit_code;
}
