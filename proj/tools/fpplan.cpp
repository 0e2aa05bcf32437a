// fpplan command line: plan, region, batch, validate.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fpplan/fpplan.hpp"

namespace fs = std::filesystem;
using namespace fpplan;

namespace {

enum Exit { kOk = 0, kNoPath = 2, kResource = 3, kInput = 4, kInternal = 5 };

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::parse:
    case ErrorKind::validation:
    case ErrorKind::dimension_mismatch:
    case ErrorKind::invalid_argument:
      return kInput;
    case ErrorKind::resource_limit:
      return kResource;
    default:
      return kInternal;
  }
}

int exit_code(PlanStatus s) {
  switch (s) {
    case PlanStatus::success: return kOk;
    case PlanStatus::no_feasible_path: return kNoPath;
    case PlanStatus::resource_limit: return kResource;
  }
  return kInternal;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorKind::parse, "cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) fail(ErrorKind::invalid_argument, "cannot write " + p.string());
  out << text;
}

Scenario load(const fs::path& path, const std::vector<std::string>& overrides) {
  Scenario s = parse_scenario(read_file(path));
  for (const auto& o : overrides) s = apply_override(s, o);
  if (s.name.empty()) s.name = path.stem().string();
  return s;
}

struct Options {
  std::vector<std::string> scenarios;
  std::string out = "out";
  bool svg = false;
  std::string metrics;
  std::vector<std::string> overrides;
};

PlanResult run_plan(const Scenario& s, const fs::path& out, bool svg) {
  const auto truth = make_truth(s);
  const Configuration start(s.start);
  const Configuration target(s.target);
  const auto r = plan(truth, start, target, planner_config(s));
  fs::create_directories(out);
  write_file(out / "trajectory.csv", trajectory_csv(r));
  write_file(out / "metrics.csv", metrics_csv(r));
  write_file(out / "escape_events.csv", escape_events_csv(r));
  for (std::size_t i = 0; i < r.segments.size(); ++i) {
    write_file(out / ("graph_" + std::to_string(i) + ".txt"), graph_dump(r.segments[i].graph.graph));
    if (svg && s.dim == 2) write_file(out / ("segment_" + std::to_string(i) + ".svg"), segment_svg(r, i, target));
  }
  return r;
}

std::string summary(const Scenario& s, const PlanResult& r) {
  const auto m = r.metrics();
  std::ostringstream o;
  o << s.name << ": " << to_string(r.status) << " graphs=" << m.num_graphs << " max_vertices=" << m.max_vertices
    << " avg_vertices=" << fixed(m.avg_vertices, 1);
  if (!r.message.empty() && r.status != PlanStatus::success) o << " (" << r.message << ")";
  return o.str();
}

int cmd_plan(const Options& opt) {
  const Scenario s = load(opt.scenarios.at(0), opt.overrides);
  const auto r = run_plan(s, opt.out, opt.svg);
  if (!opt.metrics.empty()) write_file(opt.metrics, metrics_csv(r));
  std::cout << summary(s, r) << '\n';
  return exit_code(r.status);
}

std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(in)) {
        if (e.path().extension() == ".scn") found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.emplace_back(in);
    }
  }
  return out;
}

int cmd_validate(const Options& opt) {
  for (const auto& path : expand_inputs(opt.scenarios)) {
    const Scenario s = load(path, opt.overrides);
    std::cout << path.string() << ": ok (" << s.robots << " robot(s), dim " << s.dim << ", " << s.obstacles.size()
              << " obstacle(s))\n";
  }
  return kOk;
}

int cmd_region(const Options& opt) {
  const Scenario s = load(opt.scenarios.at(0), opt.overrides);
  if (s.config_dim() > kMaxLatticeDim) {
    std::cerr << "region: configuration dimension " << s.config_dim() << " exceeds " << kMaxLatticeDim
              << "; refusing\n";
    return kInput;
  }
  const auto c = check_region(s);
  const fs::path out = opt.out;
  fs::create_directories(out);
  write_file(out / "trajectory.csv", trajectory_csv(c.plan));
  if (!opt.metrics.empty()) write_file(opt.metrics, metrics_csv(c.plan));
  if (c.plan.status != PlanStatus::success) {
    std::cout << summary(s, c.plan) << '\n';
    return exit_code(c.plan.status);
  }

  const auto& lat = *c.lattice;
  const auto& build = *c.build;
  DensityField uniform{std::vector<double>(lat.size(), 1.0 / static_cast<double>(lat.size())), build.beta};
  const auto steady = evolve_to_steady(uniform, lat, diffusion_weights(lat));
  write_file(out / "region.txt", region_dump(lat, build.region, steady.field.rho));

  std::ostringstream v;
  v << "contains_path " << (c.contains ? "true" : "false") << "\nregion_nodes " << build.region.size()
    << "\nlattice_nodes " << lat.size() << "\nrounds " << build.rounds.size() << "\nbeta " << fixed(build.beta)
    << '\n';
  write_file(out / "verdict.txt", v.str());
  if (opt.svg && s.dim == 2 && s.robots == 1) {
    write_file(out / "region.svg", region_svg(c.plan.known->truth(), *c.boxes, c.plan, Configuration(s.start),
                                              Configuration(s.target)));
  }
  std::cout << s.name << ": region " << build.region.size() << "/" << lat.size() << " nodes, contains_path "
            << (c.contains ? "true" : "false") << '\n';
  return c.contains ? kOk : kInternal;
}

int cmd_batch(const Options& opt) {
  int worst = kOk;
  std::ostringstream table;
  table << "scenario,status," << metrics_header() << '\n';
  for (const auto& path : expand_inputs(opt.scenarios)) {
    int code = kOk;
    try {
      const Scenario s = load(path, opt.overrides);
      const auto r = run_plan(s, fs::path(opt.out) / s.name, opt.svg);
      table << s.name << ',' << to_string(r.status) << ',' << metrics_row(r.metrics()) << '\n';
      std::cout << summary(s, r) << '\n';
      code = exit_code(r.status);
    } catch (const Error& e) {
      std::cerr << path.string() << ": " << e.what() << '\n';
      table << path.stem().string() << ",error,,,,,,,\n";
      code = exit_code(e.kind());
    }
    worst = std::max(worst, code);
  }
  const fs::path metrics = opt.metrics.empty() ? fs::path(opt.out) / "batch_metrics.csv" : fs::path(opt.metrics);
  fs::create_directories(metrics.has_parent_path() ? metrics.parent_path() : fs::path("."));
  write_file(metrics, table.str());
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Potential-guided lattice path planner"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub, bool many) {
    auto* s = sub->add_option("--scenario", opt.scenarios, many ? "Scenario files or directories" : "Scenario file")
                  ->required();
    if (!many) s->expected(1);
    sub->add_option("--override", opt.overrides, "KEY=VALUE applied after parsing (lists comma separated)");
  };
  auto add_outputs = [&](CLI::App* sub) {
    sub->add_option("--out", opt.out, "Output directory");
    sub->add_flag("--svg", opt.svg, "Write SVG renderings (2D only)");
    sub->add_option("--metrics", opt.metrics, "Extra metrics CSV path");
  };

  auto* plan_cmd = app.add_subcommand("plan", "Run the replanning loop on one scenario");
  add_common(plan_cmd, false);
  add_outputs(plan_cmd);
  auto* region_cmd = app.add_subcommand("region", "Build the search region and check trajectory containment");
  add_common(region_cmd, false);
  add_outputs(region_cmd);
  auto* batch_cmd = app.add_subcommand("batch", "Plan several scenarios");
  add_common(batch_cmd, true);
  add_outputs(batch_cmd);
  auto* validate_cmd = app.add_subcommand("validate", "Parse and validate scenarios");
  add_common(validate_cmd, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInput;
  }

  try {
    if (plan_cmd->parsed()) return cmd_plan(opt);
    if (region_cmd->parsed()) return cmd_region(opt);
    if (batch_cmd->parsed()) return cmd_batch(opt);
    if (validate_cmd->parsed()) return cmd_validate(opt);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}
