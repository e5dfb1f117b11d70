// irtcat-server: HTTP service for adaptive test delivery and administration.

#include <CLI11.hpp>

#include <csignal>
#include <iostream>

#include "irtcat/service.hpp"

namespace {

irtcat::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive testing HTTP service"};
  std::string config_path;
  std::string bank_path;
  app.add_option("--config", config_path, "Service config (JSON)")->check(CLI::ExistingFile);
  app.add_option("--bank", bank_path, "Item bank file; overrides the config")->check(CLI::ExistingFile);
  CLI11_PARSE(app, argc, argv);

  try {
    irtcat::ServiceConfig config = config_path.empty() ? irtcat::ServiceConfig{} : irtcat::load_service_config(config_path);
    if (!bank_path.empty()) config.bank_path = bank_path;
    irtcat::apply_env_overrides(config);
    if (config.bank_path.empty()) {
      std::cerr << "error: no item bank configured (--bank, config \"bank\" or IRTCAT_BANK)\n";
      return 1;
    }
    if (config.admin_token.empty()) std::cerr << "warning: no admin token set; admin endpoints are disabled\n";

    irtcat::CatService service(config);
    irtcat::HttpServer server(service);
    const int port = server.bind(config.host, config.port);
    if (port < 0) {
      std::cerr << "error: cannot bind " << config.host << ':' << config.port << '\n';
      return 1;
    }
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cerr << "listening on " << config.host << ':' << port << " with " << service.bank()->items.size()
              << " items\n";
    server.listen_after_bind();
    g_server = nullptr;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
