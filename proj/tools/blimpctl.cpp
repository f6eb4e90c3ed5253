// blimpctl: evaluate, simulate and serve blimp designs.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "blimp/design_file.hpp"
#include "blimp/report.hpp"
#include "blimp/service.hpp"
#include "blimp/simulator.hpp"

using namespace blimp;

namespace {

constexpr int kInputError = 2;
constexpr int kInfeasible = 1;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

DesignSpec load(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot open " + file);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_design(text.str());
}

void print_design_error(const std::string& file, const DesignError& e) {
  if (e.kind() == DesignError::Kind::syntax) {
    std::cerr << file << ":" << e.line() << ":" << e.column() << ": " << e.what() << "\n";
    return;
  }
  for (const auto& f : e.errors()) std::cerr << file << ": " << f.path << ": " << f.message << "\n";
}

std::vector<double> parse_duties(const std::string& text, std::size_t n) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw InputError("bad duty value '" + item + "'");
    out.push_back(v);
  }
  if (out.size() != n) {
    throw InputError("--duty needs " + std::to_string(n) + " values, got " + std::to_string(out.size()));
  }
  return out;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Indoor blimp design workbench"};
  app.require_subcommand(1);

  std::string file;
  double tol = 1e-6;
  auto* check = app.add_subcommand("check", "Motion-primitive and payload checks");
  check->add_option("file", file, "Design file")->required();
  check->add_option("--tol", tol, "Feasibility tolerance");

  auto* payload = app.add_subcommand("payload", "Envelope volume, buoyancy and payload");
  payload->add_option("file", file, "Design file")->required();

  auto* perf = app.add_subcommand("perf", "Maximum steady-state velocities");
  perf->add_option("file", file, "Design file")->required();

  double duration = 10.0;
  std::string duty_text;
  std::string csv_path;
  SimConfig sim_config;
  std::string integrator = "rk4";
  auto* sim = app.add_subcommand("sim", "Simulate constant duties and export the trajectory");
  sim->add_option("file", file, "Design file")->required();
  sim->add_option("--duration", duration, "Seconds")->required();
  sim->add_option("--duty", duty_text, "Comma-separated duty per thruster (design order)");
  sim->add_option("--csv", csv_path, "Write the trajectory here instead of stdout");
  sim->add_option("--dt", sim_config.dt, "Time step");
  sim->add_option("--integrator", integrator, "rk4 or euler")->check(CLI::IsMember({"rk4", "euler"}));

  std::string command;
  auto* remap = app.add_subcommand("remap-parse", "Parse a remap command string");
  remap->add_option("command", command, "Command such as 1F2B3U4DN")->required();

  int port = 8080;
  std::string host = "127.0.0.1";
  std::string data_dir;
  auto* srv = app.add_subcommand("serve", "Run the HTTP/JSON service");
  srv->add_option("--port", port, "TCP port");
  srv->add_option("--host", host, "Bind address");
  srv->add_option("--data-dir", data_dir, "Design store directory (default $BLIMP_DATA_DIR or ./blimp-data)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    if (*check) {
      FeasibilityOptions opts;
      opts.tol = tol;
      const DesignSpec d = load(file);
      const FeasibilityReport r = evaluate_feasibility(d, opts);
      std::cout << format_feasibility(d, r);
      return r.all_ok() ? 0 : kInfeasible;
    }
    if (*payload) {
      const DesignSpec d = load(file);
      const FeasibilityReport r = evaluate_feasibility(d);
      std::cout << format_payload(d, r);
      return r.payload_ok ? 0 : kInfeasible;
    }
    if (*perf) {
      const DesignSpec d = load(file);
      try {
        std::cout << format_performance(max_performance(d));
      } catch (const InfeasibleDesign& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInfeasible;
      }
      return 0;
    }
    if (*sim) {
      const DesignSpec d = load(file);
      Actuation a = Actuation::zero(d);
      if (!duty_text.empty()) a.duties = parse_duties(duty_text, d.thrusters.size());
      sim_config.integrator = integrator == "rk4" ? Integrator::rk4 : Integrator::semi_implicit_euler;
      const Trajectory t = run(d, [&](double) { return a; }, duration, sim_config);
      if (csv_path.empty()) {
        write_trajectory_csv(std::cout, t);
      } else {
        std::ofstream out(csv_path);
        write_trajectory_csv(out, t);
        if (!out) throw InputError("cannot write " + csv_path);
        const SimState& last = t.samples.back();
        std::cout << "samples: " << t.samples.size() << "\nfinal_speed_mps: " << last.velocity.norm()
                  << "\nsteady: " << (t.steady ? "yes" : "no") << "\n";
      }
      return 0;
    }
    if (*remap) {
      try {
        std::cout << format_command(control::parse_command(command));
      } catch (const control::CommandError& e) {
        std::cerr << "error: " << e.what() << "\n  " << command << "\n  " << std::string(e.position() - 1, ' ')
                  << "^\n";
        return kInputError;
      }
      return 0;
    }
    if (*srv) {
      DesignStore store(data_dir.empty() ? default_data_dir() : std::filesystem::path(data_dir));
      SessionManager sessions;
      Service service(store, sessions);
      std::cerr << "listening on " << host << ":" << port << " (data: " << store.dir().string() << ")\n";
      if (!serve(service, host, port)) {
        std::cerr << "error: cannot bind " << host << ":" << port << "\n";
        return kInputError;
      }
      return 0;
    }
  } catch (const DesignError& e) {
    print_design_error(file, e);
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInfeasible;
  }
  return 0;
}
