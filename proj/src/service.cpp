#include "blimp/service.hpp"

#include <regex>

#include "blimp/design_file.hpp"
#include "blimp/report.hpp"

namespace blimp {

namespace {

HttpResponse error(int status, const std::string& path, const std::string& message) {
  return {status, {{"errors", json::array({{{"path", path}, {"message", message}}})}}};
}

HttpResponse design_error(const DesignError& e) {
  json errs = json::array();
  for (const auto& f : e.errors()) errs.push_back({{"path", f.path}, {"message", f.message}});
  if (errs.empty()) errs.push_back({{"path", ""}, {"message", e.what()}});
  json body{{"errors", errs}};
  if (e.kind() == DesignError::Kind::syntax) body["location"] = {{"line", e.line()}, {"column", e.column()}};
  return {422, body};
}

json stored_json(const StoredDesign& d) {
  return {{"id", d.id}, {"name", d.name}, {"content_hash", d.content_hash}, {"created_at", d.created_at}};
}

// Reads a required number field from a JSON object.
double number_field(const json& j, const char* key, double fallback, bool required) {
  if (!j.contains(key)) {
    if (required) throw std::invalid_argument(key);
    return fallback;
  }
  if (!j[key].is_number()) throw std::invalid_argument(key);
  return j[key].get<double>();
}

} // namespace

json Service::evaluation(const std::string& id, const DesignSpec& design) const {
  const auto rec = store_.info(id);
  json out{{"id", id}, {"name", design.name}, {"content_hash", content_hash(design)}};
  if (rec) out["created_at"] = rec->created_at;
  out["evaluated_at"] = utc_timestamp();
  const FeasibilityReport feas = evaluate_feasibility(design);
  out["feasibility"] = to_json(feas);
  try {
    out["performance"] = to_json(max_performance(design));
    out["performance_error"] = nullptr;
  } catch (const InfeasibleDesign& e) {
    out["performance"] = nullptr;
    out["performance_error"] = e.what();
  }
  return out;
}

HttpResponse Service::handle(const std::string& method, const std::string& path, const std::string& body) {
  try {
    return route(method, path, body);
  } catch (const DesignError& e) {
    return design_error(e);
  } catch (const std::exception& e) {
    return error(500, "", e.what());
  }
}

HttpResponse Service::route(const std::string& method, const std::string& path, const std::string& body) {
  static const std::regex design_re(R"(^/api/designs/([0-9a-f]{16})(/evaluation)?$)");
  static const std::regex session_re(R"(^/api/sim/sessions/([A-Za-z0-9]+)(/(input|state|remap|step))?$)");

  const auto parse_body = [&]() -> std::optional<json> {
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    return j;
  };
  const auto malformed = [] { return error(400, "", "request body must be a JSON object"); };
  const auto not_allowed = [] { return error(405, "", "method not allowed"); };

  if (path == "/api/designs") {
    if (method == "GET") {
      json arr = json::array();
      for (const auto& d : store_.list()) arr.push_back(stored_json(d));
      return {200, {{"designs", arr}}};
    }
    if (method != "POST") return not_allowed();
    const auto j = parse_body();
    if (!j) return malformed();
    DesignSpec design;
    if (j->contains("toml")) {
      if (!(*j)["toml"].is_string()) return error(422, "toml", "must be a string");
      design = parse_design((*j)["toml"].get<std::string>());
    } else {
      design = design_from_json(*j);
    }
    const StoredDesign rec = store_.put(design);
    return {201, evaluation(rec.id, design)};
  }

  std::smatch m;
  if (std::regex_match(path, m, design_re)) {
    if (method != "GET") return not_allowed();
    const std::string id = m[1];
    const auto design = store_.get(id);
    if (!design) return error(404, "id", "unknown design " + id);
    if (m[2].matched) return {200, evaluation(id, *design)};
    json out = stored_json(*store_.info(id));
    out["design"] = design_to_json(*design);
    return {200, out};
  }
  if (path.rfind("/api/designs/", 0) == 0) return error(404, "id", "unknown design");

  if (path == "/api/sim/sessions") {
    if (method != "POST") return not_allowed();
    const auto j = parse_body();
    if (!j) return malformed();
    if (!j->contains("design_id") || !(*j)["design_id"].is_string()) {
      return error(422, "design_id", "required string");
    }
    const std::string design_id = (*j)["design_id"];
    const auto design = store_.get(design_id);
    if (!design) return error(404, "design_id", "unknown design " + design_id);
    const std::string id = sessions_.create(*design);
    json out = to_json(sessions_.find(id)->snapshot());
    out["id"] = id;
    out["design_id"] = design_id;
    return {201, out};
  }

  if (std::regex_match(path, m, session_re)) {
    const std::string id = m[1];
    const std::string action = m[3].matched ? m[3].str() : "";
    const auto session = sessions_.find(id);
    if (!session) return error(404, "id", "unknown session " + id);

    if (action.empty()) {
      if (method != "DELETE") return not_allowed();
      sessions_.erase(id);
      return {200, {{"id", id}, {"deleted", true}}};
    }
    if (action == "state") {
      if (method != "GET") return not_allowed();
      json out = to_json(session->snapshot());
      out["id"] = id;
      return {200, out};
    }
    if (method != "POST") return not_allowed();
    const auto j = parse_body();
    if (!j) return malformed();

    if (action == "input") {
      control::JoystickInput in;
      for (const char* key : {"x", "y", "z", "slider"}) {
        try {
          const double v = number_field(*j, key, 0.0, false);
          if (std::string(key) == "x") in.x = v;
          else if (std::string(key) == "y") in.y = v;
          else if (std::string(key) == "z") in.z = v;
          else in.slider = v;
        } catch (const std::invalid_argument&) {
          return error(422, key, "must be a number");
        }
      }
      try {
        session->set_input(in);
      } catch (const std::out_of_range& e) {
        const std::string msg = e.what();
        return error(422, msg.substr(0, msg.find(' ')), msg);
      }
      json out = to_json(session->snapshot());
      out["id"] = id;
      return {200, out};
    }
    if (action == "step") {
      if (!j->contains("steps") || !(*j)["steps"].is_number_integer()) {
        return error(422, "steps", "required integer");
      }
      const long steps = (*j)["steps"];
      if (steps < 1 || steps > 100000) return error(422, "steps", "must be in [1, 100000]");
      session->advance(static_cast<int>(steps));
      json out = to_json(session->snapshot());
      out["id"] = id;
      return {200, out};
    }
    // remap
    if (!j->contains("command") || !(*j)["command"].is_string()) return error(422, "command", "required string");
    control::MappingCommand cmd;
    try {
      cmd = control::parse_command((*j)["command"].get<std::string>());
    } catch (const control::CommandError& e) {
      HttpResponse r = error(422, "command", e.detail());
      r.body["errors"][0]["position"] = e.position();
      return r;
    }
    try {
      const auto result = session->remap(cmd);
      json out = to_json(session->snapshot());
      out["id"] = id;
      out["parsed"] = to_json(cmd);
      out["advanced"] = result.advanced;
      return {200, out};
    } catch (const control::RemapError& e) {
      return error(422, "command", e.what());
    }
  }

  return error(404, "", "no route for " + path);
}

} // namespace blimp
