#include <csignal>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "httplib.h"
#include "mindmeld/cli.hpp"
#include "mindmeld/service.hpp"

namespace {

httplib::Server* g_server = nullptr;

void stop_server(int) {
  if (g_server != nullptr) g_server->stop();
}

int serve(const std::string& host, int port, const std::optional<std::string>& config_path) {
  mindmeld::SessionConfig config;
  try {
    config = mindmeld::load_session_config(config_path);
  } catch (const mindmeld::Error& e) {
    std::cerr << "serve: " << e.what() << "\n";
    return mindmeld::cli::kParseError;
  }
  mindmeld::Service service(config);
  httplib::Server server;
  service.register_routes(server);
  g_server = &server;
  std::signal(SIGINT, stop_server);
  std::signal(SIGTERM, stop_server);
  std::cerr << "mindmeld: listening on " << host << ":" << port << "\n";
  bool ok = server.listen(host, port);
  service.shutdown();
  g_server = nullptr;
  if (!ok) {
    std::cerr << "serve: cannot listen on " << host << ":" << port << "\n";
    return mindmeld::cli::kParseError;
  }
  return mindmeld::cli::kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mindmeld: associative mind-maps from conversation streams, with trust scoring"};
  app.require_subcommand(1);

  mindmeld::cli::ReplayOptions replay;
  std::string config_path;
  auto* replay_cmd = app.add_subcommand("replay", "Replay a JSON-lines transcript and write a JSON report");
  replay_cmd->add_option("--transcript", replay.transcript_path, "Transcript (JSON lines)")->required();
  replay_cmd->add_option("--seeds", replay.seeds_path, "Participant seeds document")->required();
  replay_cmd->add_option("--config", config_path, "Config document (falls back to $MINDMELD_CONFIG)");
  replay_cmd->add_option("--out", replay.out_path, "Report output path")->required();
  std::string snapshot_out;
  replay_cmd->add_option("--snapshot-out", snapshot_out, "Also write the final session snapshot here");

  auto* demo_cmd = app.add_subcommand("demo", "Run the built-in Alice/Bob conversation and print a trace");

  std::string snapshot_path;
  std::string view;
  auto* dot_cmd = app.add_subcommand("export-dot", "Render one mind-map of a snapshot as Graphviz DOT");
  dot_cmd->add_option("--snapshot", snapshot_path, "Session snapshot or replay report")->required();
  dot_cmd->add_option("--view", view, "self:<agent> or outer:<agent>:<partner>")->required();

  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP + event-stream API");
  serve_cmd->add_option("--port", port, "TCP port")->check(CLI::Range(1, 65535));
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--config", config_path, "Config document (falls back to $MINDMELD_CONFIG)");

  CLI11_PARSE(app, argc, argv);

  auto optional_path = [](const std::string& path) {
    return path.empty() ? std::nullopt : std::optional<std::string>(path);
  };

  if (*replay_cmd) {
    replay.config_path = optional_path(config_path);
    replay.snapshot_path = optional_path(snapshot_out);
    return mindmeld::cli::replay(replay, std::cerr);
  }
  if (*demo_cmd) return mindmeld::cli::demo(std::cout);
  if (*dot_cmd) return mindmeld::cli::export_dot(snapshot_path, view, std::cout, std::cerr);
  if (*serve_cmd) return serve(host, port, optional_path(config_path));
  return 0;
}
