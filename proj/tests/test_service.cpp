#include <gtest/gtest.h>

#include <cstdio>
#include <random>
#include <sys/wait.h>

#include "blimp/design_file.hpp"
#include "blimp/report.hpp"
#include "blimp/service.hpp"
#include "support.hpp"

using namespace blimp;
using blimp::testing::fixture_path;
using blimp::testing::load_fixture;
using blimp::testing::read_file;
using nlohmann::json;

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  static int counter = 0;
  const fs::path p = fs::temp_directory_path() / ("blimp-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
                                                  std::to_string(counter++));
  fs::remove_all(p);
  return p;
}

struct Fixture {
  fs::path dir = fresh_dir("svc");
  DesignStore store{dir};
  SessionManager sessions{SimSession::Clock::stepped};
  Service service{store, sessions};

  ~Fixture() { fs::remove_all(dir); }

  HttpResponse post(const std::string& path, const json& body) { return service.handle("POST", path, body.dump()); }
  HttpResponse get(const std::string& path) { return service.handle("GET", path, ""); }

  std::string add(const std::string& fixture) {
    const auto r = post("/api/designs", {{"toml", read_file(fixture_path(fixture))}});
    EXPECT_EQ(r.status, 201) << r.body.dump();
    return r.body.value("id", "");
  }
};

bool has_error_path(const json& body, const std::string& path) {
  for (const auto& e : body["errors"]) {
    if (e["path"] == path) return true;
  }
  return false;
}

struct RunResult {
  int code;
  std::string out;
};

RunResult blimpctl(const std::string& args) {
  const std::string cmd = std::string(BLIMPCTL_PATH) + " " + args + " 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = ::pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

} // namespace

TEST(Store, PutGetAndStableIds) {
  const fs::path dir = fresh_dir("store");
  const DesignSpec d = load_fixture("case1.toml");
  std::string id;
  {
    DesignStore store(dir);
    const StoredDesign rec = store.put(d);
    id = rec.id;
    EXPECT_EQ(id.size(), 16u);
    EXPECT_EQ(rec.content_hash, content_hash(d));
    EXPECT_EQ(store.put(d).id, id); // identical content, same record
    EXPECT_EQ(store.list().size(), 1u);
    const auto back = store.get(id);
    ASSERT_TRUE(back);
    EXPECT_EQ(serialize_design(*back), serialize_design(d));
    EXPECT_FALSE(store.get("0123456789abcdef"));
  }
  {
    DesignStore reopened(dir);
    ASSERT_EQ(reopened.list().size(), 1u);
    EXPECT_EQ(reopened.list()[0].id, id);
    EXPECT_EQ(content_hash(*reopened.get(id)), id);
  }
  fs::remove_all(dir);
}

TEST(Store, HashIgnoresFormattingButNotContent) {
  const DesignSpec a = load_fixture("case1.toml");
  const DesignSpec b = parse_design(serialize_design(a));
  EXPECT_EQ(content_hash(a), content_hash(b));
  DesignSpec c = a;
  c.masses.support += 0.001;
  EXPECT_NE(content_hash(a), content_hash(c));
}

TEST(Store, JsonDesignRoundTrip) {
  for (const char* name : {"case1.toml", "case2.toml", "group2_31mm.toml", "symmetric.toml"}) {
    const DesignSpec d = load_fixture(name);
    const json j = design_to_json(d);
    EXPECT_EQ(serialize_design(design_from_json(j)), serialize_design(d)) << name;
    EXPECT_EQ(design_to_json(design_from_json(j)), j) << name;
  }
}

TEST(Store, JsonSchemaErrorsCarryPaths) {
  json j = design_to_json(load_fixture("case1.toml"));
  j["thrusters"][0]["orientation"] = json::array({1, 1, 0});
  try {
    design_from_json(j);
    FAIL();
  } catch (const DesignError& e) {
    bool found = false;
    for (const auto& f : e.errors()) found |= f.path == "thrusters[0].orientation";
    EXPECT_TRUE(found);
  }
  EXPECT_THROW(design_from_json(json::array()), DesignError);
  EXPECT_THROW(design_from_json({{"balloon", {{"shape", {{"nested", 1}}}}}}), DesignError);
}

TEST(Api, CreateDesignReturnsEvaluation) {
  Fixture f;
  const auto r = f.post("/api/designs", {{"toml", read_file(fixture_path("case1.toml"))}});
  ASSERT_EQ(r.status, 201);
  EXPECT_EQ(r.body["name"], "case1");
  EXPECT_EQ(r.body["id"], r.body["content_hash"]);
  EXPECT_TRUE(r.body["feasibility"]["motion_ok"].get<bool>());
  EXPECT_TRUE(r.body["feasibility"]["payload_ok"].get<bool>());
  EXPECT_EQ(r.body["feasibility"]["primitives"].size(), 3u);
  EXPECT_TRUE(r.body["performance"].is_object());
  EXPECT_TRUE(r.body["performance_error"].is_null());
  EXPECT_NEAR(r.body["feasibility"]["payload_mass"].get<double>(), 0.0100960114, 1e-9);
}

TEST(Api, CreateFromJsonObject) {
  Fixture f;
  const json design = design_to_json(load_fixture("case2.toml"));
  const auto r = f.post("/api/designs", design);
  ASSERT_EQ(r.status, 201);
  const std::string id = r.body["id"];
  const auto got = f.get("/api/designs/" + id);
  ASSERT_EQ(got.status, 200);
  EXPECT_EQ(got.body["design"], design);
  const auto list = f.get("/api/designs");
  ASSERT_EQ(list.body["designs"].size(), 1u);
  EXPECT_EQ(list.body["designs"][0]["id"], id);
}

TEST(Api, InfeasibleDesignStillStored) {
  Fixture f;
  const auto r = f.post("/api/designs", {{"toml", read_file(fixture_path("single_motor.toml"))}});
  ASSERT_EQ(r.status, 201);
  EXPECT_FALSE(r.body["feasibility"]["motion_ok"].get<bool>());
  EXPECT_TRUE(r.body["performance"].is_null());
  EXPECT_TRUE(r.body["performance_error"].is_string());
}

TEST(Api, PayloadFailureIsAResultNotAnError) {
  Fixture f;
  DesignSpec d = load_fixture("case1.toml");
  d.masses.electronics = 1.0;
  const auto r = f.post("/api/designs", design_to_json(d));
  ASSERT_EQ(r.status, 201);
  EXPECT_FALSE(r.body["feasibility"]["payload_ok"].get<bool>());
  EXPECT_LT(r.body["feasibility"]["payload_mass"].get<double>(), 0.0);
}

TEST(Api, EvaluationEndpoint) {
  Fixture f;
  const std::string id = f.add("symmetric.toml");
  const auto r = f.get("/api/designs/" + id + "/evaluation");
  ASSERT_EQ(r.status, 200);
  const MaxPerformance perf = max_performance(load_fixture("symmetric.toml"));
  EXPECT_EQ(r.body["performance"]["v_max_horizontal"].get<double>(), perf.v_max_horizontal);
  EXPECT_EQ(r.body["performance"]["v_max_vertical"].get<double>(), perf.v_max_vertical);
  EXPECT_FALSE(r.body["evaluated_at"].get<std::string>().empty());
}

TEST(Api, ValidationErrors) {
  Fixture f;
  auto r = f.post("/api/designs", {{"toml", "name = \"x\"\n[balloon\n"}});
  EXPECT_EQ(r.status, 422);
  EXPECT_TRUE(r.body.contains("location"));
  EXPECT_EQ(r.body["location"]["line"], 2);

  json bad = design_to_json(load_fixture("case1.toml"));
  bad["thrusters"][1]["thrust_range_g"] = json::array({5, -5});
  r = f.post("/api/designs", bad);
  EXPECT_EQ(r.status, 422);
  EXPECT_TRUE(has_error_path(r.body, "thrusters[1].thrust_range_g")) << r.body.dump();

  r = f.post("/api/designs", {{"toml", 12}});
  EXPECT_EQ(r.status, 422);
  EXPECT_TRUE(has_error_path(r.body, "toml"));

  r = f.service.handle("POST", "/api/designs", "{not json");
  EXPECT_EQ(r.status, 400);
  r = f.service.handle("POST", "/api/designs", "[1,2]");
  EXPECT_EQ(r.status, 400);
}

TEST(Api, UnknownIdsAndMethods) {
  Fixture f;
  EXPECT_EQ(f.get("/api/designs/0123456789abcdef").status, 404);
  EXPECT_EQ(f.get("/api/designs/nope").status, 404);
  EXPECT_EQ(f.get("/api/sim/sessions/s99/state").status, 404);
  EXPECT_EQ(f.get("/api/elsewhere").status, 404);
  EXPECT_EQ(f.service.handle("DELETE", "/api/designs", "").status, 405);
  EXPECT_EQ(f.get("/api/sim/sessions").status, 405);
  EXPECT_EQ(f.post("/api/sim/sessions", {{"design_id", "0123456789abcdef"}}).status, 404);
  EXPECT_EQ(f.post("/api/sim/sessions", {{"design", 1}}).status, 422);
}

TEST(Api, SessionLifecycle) {
  Fixture f;
  const std::string design_id = f.add("case1.toml");
  auto r = f.post("/api/sim/sessions", {{"design_id", design_id}});
  ASSERT_EQ(r.status, 201);
  const std::string sid = r.body["id"];
  EXPECT_EQ(r.body["mapping"]["command"], "1F2B3U4DN");
  EXPECT_EQ(r.body["state"]["time"], 0.0);

  r = f.post("/api/sim/sessions/" + sid + "/input", {{"x", 0}, {"y", 1}, {"z", 0}, {"slider", 1}});
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["input"]["y"], 1.0);

  r = f.post("/api/sim/sessions/" + sid + "/input", {{"y", 2}});
  EXPECT_EQ(r.status, 422);
  EXPECT_TRUE(has_error_path(r.body, "y"));
  r = f.post("/api/sim/sessions/" + sid + "/input", {{"x", "left"}});
  EXPECT_EQ(r.status, 422);

  r = f.post("/api/sim/sessions/" + sid + "/step", {{"steps", 50}});
  ASSERT_EQ(r.status, 200);
  EXPECT_NEAR(r.body["state"]["time"].get<double>(), 1.0, 1e-9);
  EXPECT_EQ(f.post("/api/sim/sessions/" + sid + "/step", {{"steps", 0}}).status, 422);
  EXPECT_EQ(f.post("/api/sim/sessions/" + sid + "/step", {{"steps", 1.5}}).status, 422);

  r = f.get("/api/sim/sessions/" + sid + "/state");
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["id"], sid);
  EXPECT_TRUE(r.body["error"].is_null());

  EXPECT_EQ(f.service.handle("DELETE", "/api/sim/sessions/" + sid, "").status, 200);
  EXPECT_EQ(f.get("/api/sim/sessions/" + sid + "/state").status, 404);
}

TEST(Api, RemapSequenceOverHttp) {
  Fixture f;
  const std::string design_id = f.add("case1.toml");
  const std::string sid = f.post("/api/sim/sessions", {{"design_id", design_id}}).body["id"];
  const std::string base = "/api/sim/sessions/" + sid + "/remap";

  auto r = f.post(base, {{"command", "1F2B3U"}});
  EXPECT_EQ(r.status, 422);
  EXPECT_EQ(r.body["errors"][0]["path"], "command");
  EXPECT_EQ(r.body["errors"][0]["position"], 7);

  r = f.post(base, {{"command", "1F2U3U4BC1L4R"}});
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["verdicts"], (json{{"horizontal", true}, {"vertical", true}, {"rotation", false}}));
  EXPECT_EQ(r.body["mapping"]["iteration"], "rotation");

  r = f.post(base, {{"command", "1F2U3U4BC4L1R"}});
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["verdicts"], (json{{"horizontal", true}, {"vertical", true}, {"rotation", true}}));
  EXPECT_EQ(r.body["mapping"]["iteration"], "done");
  EXPECT_EQ(r.body["parsed"]["rotation"]["left"], 4);

  // The confirmed mapping drives the plant forward.
  f.post("/api/sim/sessions/" + sid + "/input", {{"y", 1}, {"slider", 1}});
  r = f.post("/api/sim/sessions/" + sid + "/step", {{"steps", 25}});
  EXPECT_GT(r.body["state"]["velocity"][0].get<double>(), 0.0);

  r = f.post(base, {{"command", "1F2U3U4BC4L1R"}});
  EXPECT_EQ(r.status, 422);
}

TEST(Api, FuzzedBodiesNeverCrash) {
  Fixture f;
  const std::string design_id = f.add("case2.toml");
  const std::string sid = f.post("/api/sim/sessions", {{"design_id", design_id}}).body["id"];
  const std::vector<std::string> paths = {"/api/designs", "/api/sim/sessions", "/api/sim/sessions/" + sid + "/input",
                                          "/api/sim/sessions/" + sid + "/step", "/api/sim/sessions/" + sid + "/remap"};
  const std::vector<json> values = {nullptr, true, -1, 0, 1, 3, 1e308, -0.5, "", "1F2B3U4DN", json::array(),
                                    json::object(), json::array({1, 2, 3}), {{"a", 1}}};
  const std::vector<std::string> keys = {"x", "y", "z", "slider", "steps", "command", "design_id", "toml", "name",
                                         "balloon", "thrusters", "masses", "drag"};
  std::mt19937_64 rng(3);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  for (int i = 0; i < 3000; ++i) {
    json body = json::object();
    const std::size_t n = pick(5);
    for (std::size_t k = 0; k < n; ++k) body[keys[pick(keys.size())]] = values[pick(values.size())];
    std::string text = body.dump();
    if (i % 7 == 0 && !text.empty()) text.erase(pick(text.size()), 1);
    const auto r = f.service.handle("POST", paths[pick(paths.size())], text);
    EXPECT_TRUE(r.status == 200 || r.status == 201 || r.status == 400 || r.status == 404 || r.status == 422)
        << r.status << " " << text << " " << r.body.dump();
    if (r.status >= 400) EXPECT_FALSE(r.body["errors"].empty());
  }
}

TEST(Cli, CheckExitCodes) {
  auto r = blimpctl("check " + fixture_path("case1.toml"));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("motion: PASS"), std::string::npos);
  r = blimpctl("check " + fixture_path("single_motor.toml"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("motion: FAIL"), std::string::npos);
  EXPECT_EQ(blimpctl("check /nonexistent/design.toml").code, 2);
  EXPECT_EQ(blimpctl("frobnicate").code, 2);
}

TEST(Cli, CheckMatchesLibrary) {
  for (const char* name : {"case1.toml", "case2.toml", "group2_65mm.toml"}) {
    const DesignSpec d = load_fixture(name);
    const auto r = blimpctl("check " + fixture_path(name));
    EXPECT_EQ(r.out, format_feasibility(d, evaluate_feasibility(d))) << name;
  }
}

TEST(Cli, PerfMatchesApi) {
  Fixture f;
  const std::string id = f.add("symmetric.toml");
  const auto api = f.get("/api/designs/" + id + "/evaluation").body;
  const DesignSpec d = load_fixture("symmetric.toml");
  const auto r = blimpctl("perf " + fixture_path("symmetric.toml"));
  ASSERT_EQ(r.code, 0);
  const MaxPerformance perf = max_performance(d);
  EXPECT_EQ(r.out, format_performance(perf));
  EXPECT_EQ(api["performance"], to_json(perf));
  EXPECT_EQ(blimpctl("perf " + fixture_path("single_motor.toml")).code, 1);
}

TEST(Cli, Payload) {
  const auto r = blimpctl("payload " + fixture_path("case1.toml"));
  EXPECT_EQ(r.code, 0);
  const DesignSpec d = load_fixture("case1.toml");
  EXPECT_EQ(r.out, format_payload(d, evaluate_feasibility(d)));
}

TEST(Cli, RemapParse) {
  auto r = blimpctl("remap-parse 1F2U3U4BC4L1R");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, format_command(control::parse_command("1F2U3U4BC4L1R")));
  r = blimpctl("remap-parse 1F2B3U");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("position 7"), std::string::npos);
  EXPECT_NE(r.out.find("\n        ^"), std::string::npos) << r.out;
}

TEST(Cli, SimCsv) {
  const auto r = blimpctl("sim " + fixture_path("case1.toml") + " --duration 1 --duty 1,0,0,0");
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,vx,vy,vz,speed_h,psi,psidot");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 51);

  const fs::path out = fresh_dir("csv");
  const auto w = blimpctl("sim " + fixture_path("case1.toml") + " --duration 1 --duty 1,0,0,0 --csv " + out.string());
  EXPECT_EQ(w.code, 0);
  EXPECT_EQ(read_file(out.string()), r.out);
  fs::remove(out);

  EXPECT_EQ(blimpctl("sim " + fixture_path("case1.toml") + " --duration 1 --duty 2,0,0,0").code, 2);
  EXPECT_EQ(blimpctl("sim " + fixture_path("case1.toml") + " --duration 1 --duty 1,0").code, 2);
  EXPECT_EQ(blimpctl("sim " + fixture_path("case1.toml")).code, 2);
}
