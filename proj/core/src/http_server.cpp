#include <httplib.h>

#include "irtcat/service.hpp"

namespace irtcat {

namespace {

constexpr const char* kSessionId = "([A-Za-z0-9_-]+)";

void send(httplib::Response& res, const ApiResponse& api) {
  res.status = api.status;
  res.set_content(api.body.dump(), "application/json");
}

// Empty bodies parse as an empty object.
std::optional<json> parse_body(const httplib::Request& req, httplib::Response& res) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    send(res, {400, {{"error", "malformed_request"}, {"message", std::string("invalid JSON: ") + e.what()}}});
    return std::nullopt;
  }
}

std::string admin_token(const httplib::Request& req) {
  const auto auth = req.get_header_value("Authorization");
  constexpr std::string_view kBearer = "Bearer ";
  if (auth.starts_with(kBearer)) return auth.substr(kBearer.size());
  return req.get_header_value("X-Admin-Token");
}

std::optional<ItemId> parse_item_id(const std::string& text) {
  try {
    const auto value = std::stoull(text);
    if (value > std::numeric_limits<ItemId>::max()) return std::nullopt;
    return static_cast<ItemId>(value);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

struct HttpServer::Impl {
  CatService& service;
  httplib::Server server;

  explicit Impl(CatService& s) : service(s) { routes(); }

  // Wraps an admin handler with the token check.
  template <typename F>
  httplib::Server::Handler admin(F handler) {
    return [this, handler](const httplib::Request& req, httplib::Response& res) {
      if (!service.authorized(admin_token(req))) {
        send(res, {401, {{"error", "unauthorized"}, {"message", "missing or invalid admin token"}}});
        return;
      }
      handler(req, res);
    };
  }

  template <typename F>
  httplib::Server::Handler with_item(F handler) {
    return admin([handler](const httplib::Request& req, httplib::Response& res) {
      const auto id = parse_item_id(req.matches[1]);
      if (!id) {
        send(res, {404, {{"error", "unknown_item"}, {"message", "invalid item id"}}});
        return;
      }
      handler(req, res, *id);
    });
  }

  void routes() {
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      std::string message = "internal error";
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        message = e.what();
      } catch (...) {
      }
      send(res, {500, {{"error", "internal"}, {"message", message}}});
    });

    server.Get("/health", [](const httplib::Request&, httplib::Response& res) { send(res, {200, {{"status", "ok"}}}); });

    server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      if (const auto body = parse_body(req, res)) send(res, service.create_session(*body));
    });
    server.Get(std::string("/sessions/") + kSessionId, [this](const httplib::Request& req, httplib::Response& res) {
      send(res, service.get_session(req.matches[1]));
    });
    server.Post(std::string("/sessions/") + kSessionId + "/answers",
                [this](const httplib::Request& req, httplib::Response& res) {
                  if (const auto body = parse_body(req, res)) send(res, service.submit_answer(req.matches[1], *body));
                });
    server.Get(std::string("/sessions/") + kSessionId + "/report",
               [this](const httplib::Request& req, httplib::Response& res) {
                 send(res, service.get_report(req.matches[1]));
               });

    server.Get("/admin/items", admin([this](const httplib::Request&, httplib::Response& res) {
                 send(res, service.list_items());
               }));
    server.Post("/admin/items", admin([this](const httplib::Request& req, httplib::Response& res) {
                  if (const auto body = parse_body(req, res)) send(res, service.create_item(*body));
                }));
    server.Get(R"(/admin/items/(\d+))", with_item([this](const httplib::Request&, httplib::Response& res, ItemId id) {
                 send(res, service.get_item(id));
               }));
    server.Put(R"(/admin/items/(\d+))",
               with_item([this](const httplib::Request& req, httplib::Response& res, ItemId id) {
                 if (const auto body = parse_body(req, res)) send(res, service.update_item(id, *body));
               }));
    server.Delete(R"(/admin/items/(\d+))",
                  with_item([this](const httplib::Request&, httplib::Response& res, ItemId id) {
                    send(res, service.delete_item(id));
                  }));
    server.Get("/admin/config", admin([this](const httplib::Request&, httplib::Response& res) {
                 send(res, service.get_config());
               }));
    server.Put("/admin/config", admin([this](const httplib::Request& req, httplib::Response& res) {
                 if (const auto body = parse_body(req, res)) send(res, service.put_config(*body));
               }));
    server.Get("/admin/stats/exposure", admin([this](const httplib::Request&, httplib::Response& res) {
                 send(res, service.exposure_stats());
               }));
    server.Post("/admin/calibration/estimate", admin([this](const httplib::Request& req, httplib::Response& res) {
                  if (req.is_multipart_form_data()) {
                    if (!req.has_file("log")) {
                      send(res, {400, {{"error", "malformed_request"}, {"message", "multipart field 'log' missing"}}});
                      return;
                    }
                    send(res, service.calibrate(req.get_file_value("log").content));
                    return;
                  }
                  send(res, service.calibrate(req.body));
                }));
    server.Get(std::string("/admin/sessions/") + kSessionId,
               admin([this](const httplib::Request& req, httplib::Response& res) {
                 send(res, service.admin_session(req.matches[1]));
               }));

    if (service.config().static_dir) server.set_mount_point("/", service.config().static_dir->string());
  }
};

HttpServer::HttpServer(CatService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace irtcat
