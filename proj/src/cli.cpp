#include "atlas/cli.hpp"

#include <CLI11.hpp>
#include <map>

#include "atlas/error.hpp"
#include "atlas/pipeline.hpp"
#include "atlas/serve.hpp"

namespace atlas {
namespace {

struct CommonFlags {
  std::string config_path;
  std::vector<std::string> overrides;
  unsigned threads = 0;
  std::string output_dir;
  std::string input_csv;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("-c,--config", flags.config_path, "Pipeline configuration file (key = value lines)");
  cmd->add_option("--set", flags.overrides, "Override a configuration key, e.g. --set ridge_lambda=0.1");
  cmd->add_option("--threads", flags.threads, "Worker cap; results do not depend on it")->check(CLI::PositiveNumber);
  cmd->add_option("-o,--output-dir", flags.output_dir, "Directory for stage artifacts and the bundle");
  cmd->add_option("-i,--input", flags.input_csv, "Consumption CSV");
}

PipelineConfig resolve_config(const CommonFlags& flags) {
  auto config = flags.config_path.empty() ? PipelineConfig::defaults() : load_config(flags.config_path);
  auto overrides = flags.overrides;
  if (!flags.input_csv.empty()) overrides.push_back("input_csv=" + flags.input_csv);
  if (!flags.output_dir.empty()) overrides.push_back("output_dir=" + flags.output_dir);
  if (flags.threads > 0) overrides.push_back("threads=" + std::to_string(flags.threads));
  apply_overrides(config, overrides);
  return config;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Opioid consumption atlas: batch analytics and bundle export"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto* run = app.add_subcommand("run", "Run every stage and write the bundle");
  auto* ingest = app.add_subcommand("ingest", "Parse, normalize and convert the consumption table");
  auto* compute = app.add_subcommand("compute", "Compute cognostics, layouts and trends from the series cache");
  auto* exporter = app.add_subcommand("export", "Assemble the bundle from the stage artifacts");
  for (auto* cmd : {run, ingest, compute, exporter}) add_common(cmd, flags);

  std::string stage_name = "all";
  const std::map<std::string, ComputeStage> stages{{"cognostics", ComputeStage::Cognostics},
                                                   {"embedding", ComputeStage::Embedding},
                                                   {"trends", ComputeStage::Trends},
                                                   {"all", ComputeStage::All}};
  compute->add_option("--stage", stage_name, "Which computation to rerun")
      ->check(CLI::IsMember({"cognostics", "embedding", "trends", "all"}));

  auto* serve = app.add_subcommand("serve", "Serve a bundle directory over local HTTP");
  std::string serve_dir = "atlas-out";
  std::string host = "127.0.0.1";
  int port = 8080;
  serve->add_option("-d,--dir", serve_dir, "Directory to serve");
  serve->add_option("--host", host, "Interface to bind");
  serve->add_option("-p,--port", port, "Port to listen on")->check(CLI::Range(0, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ErrorClass::Config);
  }

  const Log log(&err);
  try {
    if (serve->parsed()) {
      StaticServer server(serve_dir);
      const int bound = server.bind(host, port);
      log.event("serving", "url=http://" + host + ":" + std::to_string(bound) + "/");
      server.run();
      return 0;
    }
    const auto config = resolve_config(flags);
    log.event("config", "output_dir=" + config.output_dir.string() + " threads=" + std::to_string(config.threads));
    if (run->parsed()) {
      const auto bundle = run_pipeline(config, log);
      log.event("wrote", "path=" + (config.output_dir / artifacts::kBundle).string() +
                             " series=" + std::to_string(bundle.series.size()));
    } else if (ingest->parsed()) {
      run_ingest(config, log);
    } else if (compute->parsed()) {
      run_compute(config, stages.at(stage_name), log);
    } else if (exporter->parsed()) {
      const auto bundle = run_export(config, log);
      log.event("wrote", "path=" + (config.output_dir / artifacts::kBundle).string() +
                             " series=" + std::to_string(bundle.series.size()));
    }
  } catch (const Error& e) {
    log.event("error", std::string("kind=") + std::string(to_string(e.kind())));
    err << e.what() << '\n';
    return static_cast<int>(classify(e.kind()));
  } catch (const std::exception& e) {
    log.event("error", "kind=Unexpected");
    err << e.what() << '\n';
    return static_cast<int>(ErrorClass::Data);
  }
  return 0;
}

}  // namespace atlas
