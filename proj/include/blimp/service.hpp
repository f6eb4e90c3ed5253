#pragma once

#include <string>

#include <json.hpp>

#include "blimp/session.hpp"
#include "blimp/store.hpp"

namespace blimp {

struct HttpResponse {
  int status = 200;
  nlohmann::json body;
};

/// JSON API over a design store and live simulation sessions. `handle` is
/// the transport-independent core; `serve` binds it to HTTP.
///
///   POST   /api/designs                      design object or {"toml": text}
///   GET    /api/designs
///   GET    /api/designs/{id}
///   GET    /api/designs/{id}/evaluation
///   POST   /api/sim/sessions                 {"design_id"}
///   POST   /api/sim/sessions/{id}/input      {"x","y","z","slider"}
///   POST   /api/sim/sessions/{id}/step       {"steps"}
///   GET    /api/sim/sessions/{id}/state
///   POST   /api/sim/sessions/{id}/remap      {"command"}
///   DELETE /api/sim/sessions/{id}
///
/// Errors carry {"errors": [{"path", "message"}]}.
class Service {
 public:
  Service(DesignStore& store, SessionManager& sessions) : store_(store), sessions_(sessions) {}

  HttpResponse handle(const std::string& method, const std::string& path, const std::string& body);

  /// Feasibility and performance for a stored design.
  nlohmann::json evaluation(const std::string& id, const DesignSpec& design) const;

 private:
  HttpResponse route(const std::string& method, const std::string& path, const std::string& body);

  DesignStore& store_;
  SessionManager& sessions_;
};

/// Blocks serving HTTP until the process is stopped. Returns false if the
/// port cannot be bound.
bool serve(Service& service, const std::string& host, int port);

} // namespace blimp
