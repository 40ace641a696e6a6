#include "dcn/http_service.hpp"

#include <sys/socket.h>

#include <charconv>
#include <optional>
#include <vector>

#include <httplib.h>

namespace dcn {

namespace {

constexpr const char* kJson = "application/json";

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, const ServiceError& e) { send_json(res, e.status(), e.body()); }

std::vector<int> int_list(const std::string& text, const std::string& what) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    int v = 0;
    const char* first = text.data() + pos;
    const char* last = text.data() + comma;
    const auto [end, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || end != last || first == last)
      throw ServiceError(422, "invalid_query", "malformed " + what + " '" + text + "'");
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

std::optional<LayoutSpec> layout_param(const httplib::Request& req) {
  if (!req.has_param("layout")) return std::nullopt;
  try {
    return parse_layout(req.get_param_value("layout"));
  } catch (const std::exception& e) {
    throw ServiceError(422, "invalid_layout", e.what());
  }
}

Json parse_body(const httplib::Request& req) {
  const Json body = Json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) throw ServiceError(400, "bad_request", "body must be a JSON object");
  return body;
}

std::optional<InitSpec> init_from(const Json& body) {
  if (body.contains("ket") && body.contains("amps"))
    throw ServiceError(400, "bad_request", "give either 'ket' or 'amps', not both");
  if (body.contains("ket")) {
    if (!body["ket"].is_string()) throw ServiceError(400, "bad_request", "'ket' must be a bit string");
    return InitKet{body["ket"].get<std::string>()};
  }
  if (!body.contains("amps")) return std::nullopt;
  const Json& amps = body["amps"];
  try {
    if (amps.is_string()) return InitAmps{parse_amplitude_list(amps.get<std::string>())};
    if (!amps.is_array()) throw ServiceError(400, "bad_request", "'amps' must be a string or an array");
    Amplitudes<double> values(static_cast<Eigen::Index>(amps.size()));
    for (std::size_t i = 0; i < amps.size(); ++i) {
      const Json& a = amps[i];
      if (a.is_number())
        values[static_cast<Eigen::Index>(i)] = a.get<double>();
      else if (a.is_string())
        values[static_cast<Eigen::Index>(i)] = parse_complex(a.get<std::string>());
      else
        throw ServiceError(400, "bad_request", "amplitude entries must be numbers or complex literals");
    }
    return InitAmps{values};
  } catch (const std::invalid_argument& e) {
    throw ServiceError(400, "bad_request", e.what());
  }
}

}  // namespace

struct HttpService::Impl {
  explicit Impl(ServiceConfig config) : sessions(std::move(config)) {}

  SessionManager sessions;
  httplib::Server server;
  bool bound = false;

  template <typename F>
  static void guarded(httplib::Response& res, F&& f) {
    try {
      f();
    } catch (const ServiceError& e) {
      send_error(res, e);
    }
  }

  void routes() {
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });

    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
      res.set_content(Json{{"code", res.status == 404 ? "not_found" : "error"},
                           {"message", httplib::status_message(res.status)}}
                          .dump(),
                      kJson);
      return httplib::Server::HandlerResponse::Handled;
    });

    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      std::string message = "internal error";
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        message = e.what();
      } catch (...) {
      }
      send_json(res, 500, Json{{"code", "internal"}, {"message", message}});
    });

    server.Get("/config", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, config_json(sessions.config()));
    });

    server.Post("/session", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const Json body = parse_body(req);
        if (!body.contains("qubits") || !body["qubits"].is_number_integer())
          throw ServiceError(400, "bad_request", "'qubits' must be an integer");
        const bool normalize = body.value("normalize", false);
        std::optional<std::uint64_t> seed;
        if (body.contains("seed")) {
          if (!body["seed"].is_number_unsigned()) throw ServiceError(400, "bad_request", "'seed' must be unsigned");
          seed = body["seed"].get<std::uint64_t>();
        }
        const std::string id = sessions.create(body["qubits"].get<int>(), init_from(body), normalize, seed);
        send_json(res, 201, sessions.state(id));
      });
    });

    server.Post(R"(/session/([0-9a-f]+)/op)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        std::string statement = req.body;
        if (req.get_header_value("Content-Type").starts_with(kJson)) {
          const Json body = parse_body(req);
          if (!body.contains("op") || !body["op"].is_string())
            throw ServiceError(400, "bad_request", "'op' must be a statement string");
          statement = body["op"].get<std::string>();
        }
        send_json(res, 200, sessions.apply_text(req.matches[1], statement));
      });
    });

    server.Post(R"(/session/([0-9a-f]+)/undo)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 200, sessions.undo(req.matches[1])); });
    });

    server.Post(R"(/session/([0-9a-f]+)/redo)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 200, sessions.redo(req.matches[1])); });
    });

    server.Get(R"(/session/([0-9a-f]+)/state)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 200, sessions.state(req.matches[1])); });
    });

    server.Get(R"(/session/([0-9a-f]+)/render\.svg)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto spec = layout_param(req);
        res.set_content(sessions.render(req.matches[1], spec), "image/svg+xml");
      });
    });

    server.Get(R"(/session/([0-9a-f]+)/placement)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto spec = layout_param(req);
        send_json(res, 200, sessions.placement(req.matches[1], spec));
      });
    });

    server.Get(R"(/session/([0-9a-f]+)/separability)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const std::string id = req.matches[1];
        if (req.has_param("qubit")) {
          const std::vector<int> q = int_list(req.get_param_value("qubit"), "qubit");
          if (q.size() != 1) throw ServiceError(422, "invalid_query", "give exactly one qubit");
          send_json(res, 200, sessions.separability_of_qubit(id, q.front()));
          return;
        }
        if (!req.has_param("partition"))
          throw ServiceError(422, "invalid_query", "give 'partition=P,Q' or 'qubit=k'");
        const std::vector<int> pq = int_list(req.get_param_value("partition"), "partition");
        if (pq.size() != 2 || pq[0] < 1 || pq[1] < 1)
          throw ServiceError(422, "invalid_partition", "partition must be two positive integers P,Q");
        PartitionSpec part{static_cast<std::uint64_t>(pq[0]), static_cast<std::uint64_t>(pq[1]), {}};
        if (req.has_param("order")) part.qubit_order = int_list(req.get_param_value("order"), "order");
        send_json(res, 200, sessions.separability(id, part));
      });
    });

    server.Get(R"(/session/([0-9a-f]+)/export)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        res.set_content(sessions.export_dcn(req.matches[1]), "text/plain");
        res.set_header("Content-Disposition", "attachment; filename=\"session.dcn\"");
      });
    });
  }
};

HttpService::HttpService(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) { impl_->routes(); }

HttpService::~HttpService() { stop(); }

int HttpService::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    impl_->bound = bound > 0;
    return impl_->bound ? bound : -1;
  }
  impl_->bound = impl_->server.bind_to_port(host, port);
  return impl_->bound ? port : -1;
}

bool HttpService::listen() { return impl_->bound && impl_->server.listen_after_bind(); }

void HttpService::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void HttpService::wait_until_ready() const { impl_->server.wait_until_ready(); }

SessionManager& HttpService::sessions() { return impl_->sessions; }

}  // namespace dcn
