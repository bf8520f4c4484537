#include "svrt/harness/server.hpp"

#include <httplib.h>
#include <json.hpp>

#include "svrt/error.hpp"

namespace svrt::harness {

using nlohmann::json;

struct TrialServer::Impl {
  TrialSessionManager& manager;
  httplib::Server http;
  explicit Impl(TrialSessionManager& m) : manager(m) {}
};

namespace {

std::string encode_pixels(const std::vector<std::uint8_t>& pixels) {
  return httplib::detail::base64_encode(std::string(pixels.begin(), pixels.end()));
}

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& kind, const std::string& message) {
  reply(res, status, json{{"error", kind}, {"message", message}});
}

// Runs a handler, mapping exceptions to JSON error replies.
template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const NotFound& e) {
      reply_error(res, 404, e.kind(), e.what());
    } catch (const Conflict& e) {
      reply_error(res, 409, e.kind(), e.what());
    } catch (const InvalidArgument& e) {
      reply_error(res, 400, e.kind(), e.what());
    } catch (const json::exception& e) {
      reply_error(res, 400, "bad_request", e.what());
    } catch (const std::exception& e) {
      reply_error(res, 500, "internal", e.what());
    }
  };
}

int int_field(const json& body, const char* name) {
  if (!body.is_object() || !body.contains(name) || !body[name].is_number_integer())
    throw InvalidArgument(std::string("request body needs an integer '") + name + "'");
  return body[name].get<int>();
}

}  // namespace

TrialServer::TrialServer(TrialSessionManager& manager) : impl_(std::make_unique<Impl>(manager)) {
  auto& http = impl_->http;
  auto& m = impl_->manager;
  http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                            {"Access-Control-Allow-Headers", "Content-Type"},
                            {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  http.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  http.Post("/api/session", guarded([&m](const httplib::Request& req, httplib::Response& res) {
              const int problem = int_field(json::parse(req.body), "problem");
              reply(res, 200, json{{"session_id", m.create(problem)}});
            }));
  http.Get(R"(/api/session/([^/]+)/next)", guarded([&m](const httplib::Request& req, httplib::Response& res) {
             const auto t = m.next(req.matches[1]);
             reply(res, 200, json{{"trial_index", t.trial_index}, {"width", t.image.width},
                                  {"height", t.image.height}, {"pixels", encode_pixels(t.image.pixels)}});
           }));
  http.Post(R"(/api/session/([^/]+)/answer)", guarded([&m](const httplib::Request& req, httplib::Response& res) {
              const int label = int_field(json::parse(req.body), "label");
              const auto o = m.answer(req.matches[1], label);
              reply(res, 200, json{{"correct", o.correct}, {"true_label", o.true_label},
                                   {"status", to_string(o.status)}, {"trials", o.trials}});
            }));
  http.Get(R"(/api/session/([^/]+)/history)", guarded([&m](const httplib::Request& req, httplib::Response& res) {
             json list = json::array();
             for (const auto& h : m.history(req.matches[1]))
               list.push_back({{"trial_index", h.trial.index}, {"true_label", h.trial.true_label},
                               {"given_label", *h.trial.given_label}, {"correct", h.trial.correct},
                               {"width", h.image.width}, {"height", h.image.height},
                               {"pixels", encode_pixels(h.image.pixels)}});
             reply(res, 200, list);
           }));
  http.Get(R"(/api/cohort/(-?\d+))", guarded([&m](const httplib::Request& req, httplib::Response& res) {
             const auto s = m.cohort(std::stoi(req.matches[1]));
             json body{{"p_a", s.p_a}, {"p_n", s.p_n}, {"n", s.n}, {"accuracy", nullptr}};
             if (s.n > 0) body["accuracy"] = human_accuracy(s);
             reply(res, 200, body);
           }));
}

TrialServer::~TrialServer() { stop(); }

int TrialServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->http.bind_to_any_port(host) : (impl_->http.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void TrialServer::serve() {
  if (!impl_->http.listen_after_bind()) throw IoError("server stopped with an error");
}

void TrialServer::stop() { impl_->http.stop(); }

}  // namespace svrt::harness
