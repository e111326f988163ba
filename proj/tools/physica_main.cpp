// physica: compiles driving-scene layouts into conditioning artifacts
// (instance-flow maps, box/map projection rasters, camera and box
// embeddings, fused condition tensors) and simulates long-tail scenarios.

#include "physica/compiler.hpp"
#include "physica/errors.hpp"
#include "physica/scenario_io.hpp"
#include "physica/scene.hpp"
#include "physica/schedule.hpp"

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitIo = 2;

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw physica::IoError("cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void spill(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw physica::IoError("cannot open for writing: " + path);
  f << text;
  if (!f) throw physica::IoError("write failed: " + path);
}

struct GlobalOpts {
  std::string config_path;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;

  physica::CompileConfig resolve() const {
    physica::CompileConfig cfg;
    if (!config_path.empty()) cfg = physica::CompileConfig::from_json(slurp(config_path));
    if (threads) cfg.threads = *threads;  // CLI wins over config file
    if (seed) cfg.seed = *seed;
    return cfg;
  }
};

int run(int argc, char** argv) {
  CLI::App app{"physica - driving scene condition compiler"};
  app.require_subcommand(1);

  GlobalOpts global;
  app.add_option("--config", global.config_path, "JSON config file mirroring CLI flags");
  int threads_flag = -1;
  app.add_option("--threads", threads_flag, "Worker threads (0 = runtime default)");
  std::uint64_t seed_flag = 0;
  auto* seed_opt = app.add_option("--seed", seed_flag, "Master seed");

  // compile
  auto* compile = app.add_subcommand("compile", "Compile a scene into a condition bundle");
  std::string scene_path, out_dir;
  compile->add_option("scene", scene_path, "Scene JSON path")->required();
  compile->add_option("-o,--out", out_dir, "Output directory")->required();
  double o_max_flag = -1.0;
  compile->add_option("--o-max", o_max_flag, "Flow normalization bound, m/frame");
  bool raw_flow = false;
  compile->add_flag("--emit-raw-flow", raw_flow, "Also write raw trajectory maps");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Generate a scene from a scenario config");
  std::string scenario_path, scene_out;
  simulate->add_option("scenario", scenario_path, "Scenario config JSON")->required();
  simulate->add_option("-o,--out", scene_out, "Output scene JSON path")->required();

  // render
  auto* render = app.add_subcommand("render", "Render an inspection overlay for one cell");
  std::string render_scene, render_cam, render_out;
  int render_frame = 0;
  double flow_alpha = 0.5;
  render->add_option("scene", render_scene, "Scene JSON path")->required();
  render->add_option("--frame", render_frame, "Frame index")->required();
  render->add_option("--cam", render_cam, "Camera name")->required();
  render->add_option("-o,--out", render_out, "Output PNG path")->required();
  render->add_option("--flow-alpha", flow_alpha, "Flow blend weight (0 disables)");

  // validate
  auto* validate = app.add_subcommand("validate", "Check a scene against all invariants");
  std::string validate_scene_path;
  validate->add_option("scene", validate_scene_path, "Scene JSON path")->required();

  // schedule
  auto* schedule = app.add_subcommand("schedule", "Emit the noise schedule as CSV");
  int steps = 1000;
  double beta_start = 1e-4, beta_end = 2e-2;
  std::string schedule_out;
  schedule->add_option("--steps", steps, "Diffusion steps");
  schedule->add_option("--beta-start", beta_start, "First beta");
  schedule->add_option("--beta-end", beta_end, "Last beta");
  schedule->add_option("-o,--out", schedule_out, "CSV path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);
  if (threads_flag >= 0) global.threads = threads_flag;
  if (*seed_opt) global.seed = seed_flag;

  physica::CompileConfig cfg = global.resolve();
#ifdef _OPENMP
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif

  if (compile->parsed()) {
    if (o_max_flag > 0.0) cfg.o_max = o_max_flag;
    if (raw_flow) cfg.emit_raw_flow = true;
    const auto result = physica::compile_scene_file(scene_path, out_dir, cfg);
    std::cout << "compiled " << result.frames << " frames x " << result.cameras
              << " cameras -> " << result.out_dir.string() << "\n";
  } else if (simulate->parsed()) {
    const physica::ScenarioFile file = physica::parse_scenario(slurp(scenario_path));
    const std::uint64_t seed = global.seed ? *global.seed : file.seed.value_or(cfg.seed);
    const physica::Scene scene = physica::run_scenario(file, seed);
    spill(scene_out, physica::serialize_scene(scene));
    std::cout << "simulated " << scene.frame_count() << " frames, "
              << scene.frames.front().instances.size() << " actors -> " << scene_out << "\n";
  } else if (render->parsed()) {
    const physica::Scene scene = physica::parse_scene(slurp(render_scene));
    physica::render_overlay(scene, render_frame, render_cam, render_out, flow_alpha, cfg);
    std::cout << "rendered " << render_out << "\n";
  } else if (validate->parsed()) {
    const physica::Scene scene = physica::parse_scene_unchecked(slurp(validate_scene_path));
    const auto violations = physica::validate_scene(scene);
    for (const auto& v : violations) {
      std::cout << (v.severity == physica::Severity::kError ? "error" : "warning") << " "
                << v.code << " at " << v.location << ": " << v.message << "\n";
    }
    if (physica::has_fatal(violations)) return kExitInput;
    std::cout << "valid (" << violations.size() << " warnings)\n";
  } else if (schedule->parsed()) {
    const auto sched = physica::linear_schedule(steps, beta_start, beta_end);
    const std::string csv = physica::schedule_csv(sched);
    if (schedule_out.empty())
      std::cout << csv;
    else
      spill(schedule_out, csv);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const physica::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const physica::SyntaxError& e) {
    std::cerr << "syntax error (line " << e.line << ", column " << e.column << "): " << e.what()
              << "\n";
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}
