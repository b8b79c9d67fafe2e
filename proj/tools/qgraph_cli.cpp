#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "qgraph/json_io.hpp"
#include "qgraph/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMalformed = 2;
constexpr int kExitNumerical = 3;

namespace fs = std::filesystem;
using namespace qgraph;

int cmd_run(const std::string& file, const fs::path& out, unsigned threads) {
  const scenario::Scenario s = scenario::load(file);
  for (const auto& p : scenario::run(s, out, threads)) std::cout << "wrote " << p.string() << "\n";
  return kExitOk;
}

int cmd_verify(const std::string& file, unsigned threads) {
  const scenario::Scenario s = scenario::load(file);
  const scenario::Report rep = scenario::verify(s, threads);
  std::cout << s.name << " (" << scenario::to_string(s.kind) << ")\n" << rep.text();
  return rep.ok() ? kExitOk : kExitNumerical;
}

int cmd_star(const std::string& a_file, const std::string& b_file, const std::string& w_file,
             const fs::path& out) {
  const ScatteringMatrix a = io::smatrix_from_json(io::read_json_file(a_file), a_file);
  const ScatteringMatrix b = io::smatrix_from_json(io::read_json_file(b_file), b_file);
  const Wiring w = io::wiring_from_json(io::read_json_file(w_file), w_file);
  const ScatteringMatrix ab = star(a, b, w);
  const std::string text = io::to_json(ab).dump(2) + "\n";
  fs::create_directories(out);
  scenario::write_file(out / "star.json", text);
  std::cout << text;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum graph scattering, erasure channels and capacity bounds"};
  app.require_subcommand(1);

  std::string out_dir = "out";
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads for sweeps")->check(CLI::PositiveNumber);

  std::string scenario_file, a_file, b_file, w_file;
  auto* run = app.add_subcommand("run", "Run a scenario and write CSV/SVG/JSON outputs");
  run->add_option("file", scenario_file, "Scenario JSON")->required();
  auto* verify = app.add_subcommand("verify", "Run the oracle cross-checks of a scenario");
  verify->add_option("file", scenario_file, "Scenario JSON")->required();
  auto* starc = app.add_subcommand("star", "Compose two scattering matrices: A star B");
  starc->add_option("a", a_file, "S2 (JSON)")->required();
  starc->add_option("b", b_file, "S1 (JSON)")->required();
  starc->add_option("wiring", w_file, "Wiring (JSON)")->required();
  for (auto* sub : {run, verify, starc}) {
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--threads", threads, "Worker threads for sweeps")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitMalformed;
  }

  try {
    if (*run) return cmd_run(scenario_file, out_dir, threads);
    if (*verify) return cmd_verify(scenario_file, threads);
    if (*starc) return cmd_star(a_file, b_file, w_file, out_dir);
  } catch (const scenario::VerificationFailed& e) {
    std::cerr << "error: " << e.what();
    return kExitNumerical;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMalformed;
  } catch (const io::json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << "\n";
    return kExitMalformed;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitMalformed;
}
