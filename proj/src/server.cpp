#include "blimp/service.hpp"

#include <httplib.h>

namespace blimp {

bool serve(Service& service, const std::string& host, int port) {
  httplib::Server server;
  const auto dispatch = [&service](const httplib::Request& req, httplib::Response& res) {
    const HttpResponse r = service.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server.Get(".*", dispatch);
  server.Post(".*", dispatch);
  server.Delete(".*", dispatch);
  return server.listen(host, port);
}

} // namespace blimp
