#include "liplab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "liplab/io.hpp"
#include "liplab/sard.hpp"
#include "liplab/spacegen.hpp"

namespace liplab::cli {
namespace {

enum class Command { Gen, Validate, LengthMetric, Lip, Perturb, Verify, Demo };
enum class Format { Json, Csv };

struct RunConfig {
  Command command = Command::Gen;
  std::string space_path;
  std::string field_path;
  std::string perturbed_path;
  std::string report_path;
  std::string out_path;
  std::string base_path;
  Format format = Format::Csv;

  GenSpec gen;
  std::string kind = "path";

  double delta = 1.0;
  double r = 0.5;
  double tau = 0.0;
  double scale = 1.0;
  std::optional<double> epsilon;
  int steps = 0;
};

/// Thrown for argument combinations CLI11 cannot express.
struct UsageError : Error {
  using Error::Error;
};

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty())
    out << content;
  else
    io::write_file_atomic(path, content);
}

template <typename Fn>
std::string render(Fn&& fn) {
  std::ostringstream buf;
  fn(buf);
  return buf.str();
}

PerturbParams<double> perturb_params(const RunConfig& cfg) {
  PerturbParams<double> params{cfg.delta, cfg.r, cfg.tau, Scale<double>(cfg.scale), cfg.epsilon};
  params.validate();
  return params;
}

int cmd_gen(RunConfig& cfg, std::ostream& out) {
  static const std::map<std::string, GenKind> kinds{{"path", GenKind::Path},
                                                    {"grid", GenKind::Grid},
                                                    {"random_geometric", GenKind::RandomGeometric},
                                                    {"sierpinski", GenKind::Sierpinski},
                                                    {"snowflake", GenKind::Snowflake}};
  cfg.gen.kind = kinds.at(cfg.kind);
  std::optional<MetricSpace<double>> base;
  if (cfg.gen.kind == GenKind::Snowflake) {
    if (cfg.base_path.empty()) throw UsageError("snowflake needs --base");
    base = io::read_space_file(cfg.base_path);
  }
  const auto space = generate(cfg.gen, base ? &*base : nullptr);
  emit(cfg.out_path, render([&](std::ostream& o) { io::write_space(o, space); }), out);
  return kOk;
}

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
  const auto space = io::read_space_file(cfg.space_path);
  const auto report = analyze_space(space);
  emit(cfg.out_path, render([&](std::ostream& o) { io::write_space_report(o, report); }), out);
  return report.metric.metric_ok && report.quasi_convexity.connected ? kOk : kVerificationFailed;
}

int cmd_lengthmetric(const RunConfig& cfg, std::ostream& out) {
  const auto space = io::read_space_file(cfg.space_path);
  const auto dL = length_distance(space);
  const std::string content = render([&](std::ostream& o) {
    if (cfg.format == Format::Csv) {
      io::write_matrix_csv(o, dL);
      return;
    }
    o << "{\n  \"dL\": [\n";
    for (Index i = 0; i < dL.rows(); ++i) {
      o << "    [";
      for (Index j = 0; j < dL.cols(); ++j)
        o << (j ? ", " : "") << (std::isfinite(dL(i, j)) ? io::format_double(dL(i, j)) : "null");
      o << (i + 1 < dL.rows() ? "],\n" : "]\n");
    }
    o << "  ]\n}\n";
  });
  emit(cfg.out_path, content, out);
  return kOk;
}

int cmd_lip(const RunConfig& cfg, std::ostream& out) {
  const auto space = io::read_space_file(cfg.space_path);
  const auto f = io::read_field_file(cfg.field_path, space.size());
  const auto profile = lip_field(space, f, Scale<double>(cfg.scale));
  emit(cfg.out_path, render([&](std::ostream& o) { io::write_lip_profile(o, profile); }), out);
  return kOk;
}

int cmd_perturb(const RunConfig& cfg, std::ostream& out) {
  const auto space = io::read_space_file(cfg.space_path);
  const auto f = io::read_field_file(cfg.field_path, space.size());
  const auto params = perturb_params(cfg);
  const auto result = perturb(space, f, params);
  if (!cfg.out_path.empty())
    io::write_file_atomic(cfg.out_path, render([&](std::ostream& o) { io::write_field(o, result.g); }));
  emit(cfg.report_path, render([&](std::ostream& o) { io::write_perturb_report(o, params, result); }), out);
  return result.verification.all_ok() ? kOk : kVerificationFailed;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const auto space = io::read_space_file(cfg.space_path);
  const auto f = io::read_field_file(cfg.field_path, space.size());
  const auto g = io::read_field_file(cfg.perturbed_path, space.size());
  const auto params = perturb_params(cfg);
  PerturbResult<double> claimed;
  if (cfg.epsilon)
    claimed.epsilon = *cfg.epsilon;
  else if (!cfg.report_path.empty())
    claimed.epsilon = io::read_report_epsilon(cfg.report_path);
  else
    throw UsageError("verify needs --epsilon or --report");
  if (!(claimed.epsilon > 0)) throw UsageError("epsilon must be positive");
  const auto report = verify(space, f, g, params, claimed);
  emit(cfg.out_path,
       render([&](std::ostream& o) { io::write_verify_report(o, params, claimed.epsilon, report); }), out);
  return report.all_ok() ? kOk : kVerificationFailed;
}

int cmd_demo(const RunConfig& cfg, std::ostream& out) {
  const auto space = io::read_space_file(cfg.space_path);
  const auto f = io::read_field_file(cfg.field_path, space.size());
  if (cfg.steps < 0) throw UsageError("--steps must be nonnegative");
  std::vector<std::pair<double, double>> schedule;
  for (int k = 1; k <= cfg.steps; ++k) schedule.emplace_back(std::ldexp(cfg.delta, -k), std::ldexp(1.0, -k));
  const auto steps = residual_demo(space, f, schedule, cfg.tau, Scale<double>(cfg.scale));

  int code = kOk;
  const std::string table = render([&](std::ostream& o) {
    o << "k,r_k,delta_k,singular_measure,dinf_distance,status\n";
    for (std::size_t k = 0; k < steps.size(); ++k) {
      const auto& step = steps[k];
      o << k + 1 << ',' << io::format_double(step.r) << ',' << io::format_double(step.delta) << ',';
      switch (step.status) {
        case StepStatus::Ok:
        case StepStatus::FlagsFailed: {
          const auto& v = step.result->verification;
          o << io::format_double(v.singular_measure_after) << ',' << io::format_double(v.dinf_distance) << ','
            << (step.status == StepStatus::Ok ? "ok" : "flags_failed");
          if (!v.measure_ok) code = std::max(code, static_cast<int>(kVerificationFailed));
          break;
        }
        case StepStatus::ThresholdTooCoarse:
          o << ",,threshold_too_coarse";
          code = kThresholdTooCoarse;
          break;
        case StepStatus::Failed:
          o << ",,failed";
          code = std::max(code, static_cast<int>(kVerificationFailed));
          break;
      }
      o << '\n';
    }
  });
  emit(cfg.out_path, table, out);
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"liplab: Lipschitz constants, length metrics and singular-set perturbations on finite spaces"};
  app.require_subcommand(1);

  auto add_space = [&](CLI::App* sub) { sub->add_option("--space", cfg.space_path, "Space file (JSON)")->required(); };
  auto add_field = [&](CLI::App* sub) { sub->add_option("--field", cfg.field_path, "Field file (CSV)")->required(); };
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", cfg.out_path, "Output path (default: stdout)"); };
  auto add_scale = [&](CLI::App* sub) {
    sub->add_option("--scale", cfg.scale, "Radius h of the punctured ball")->required()->check(CLI::PositiveNumber);
  };
  auto add_perturb_params = [&](CLI::App* sub) {
    sub->add_option("--delta", cfg.delta, "D-infinity budget delta")->required()->check(CLI::PositiveNumber);
    sub->add_option("--r", cfg.r, "Singular measure bound r")->required()->check(CLI::Range(0.0, 1.0));
    sub->add_option("--tau", cfg.tau, "Singularity threshold tau")->check(CLI::NonNegativeNumber);
    add_scale(sub);
    sub->add_option("--epsilon", cfg.epsilon, "Override the neighborhood radius epsilon")->check(CLI::PositiveNumber);
  };

  auto* gen = app.add_subcommand("gen", "Generate a test space");
  gen->add_option("--kind", cfg.kind, "path | grid | random_geometric | sierpinski | snowflake")
      ->required()
      ->check(CLI::IsMember({"path", "grid", "random_geometric", "sierpinski", "snowflake"}));
  gen->add_option("--n", cfg.gen.n, "Point count")->check(CLI::PositiveNumber);
  gen->add_option("--rows", cfg.gen.rows)->check(CLI::PositiveNumber);
  gen->add_option("--cols", cfg.gen.cols)->check(CLI::PositiveNumber);
  gen->add_option("--radius", cfg.gen.radius)->check(CLI::PositiveNumber);
  gen->add_option("--seed", cfg.gen.seed);
  gen->add_option("--level", cfg.gen.level)->check(CLI::NonNegativeNumber);
  gen->add_option("--alpha", cfg.gen.alpha)->check(CLI::Range(0.0, 1.0));
  gen->add_option("--base", cfg.base_path, "Base space file for snowflake");
  add_out(gen);

  auto* validate = app.add_subcommand("validate", "Check metric axioms and quasi-convexity");
  add_space(validate);
  add_out(validate);

  auto* lengthmetric = app.add_subcommand("lengthmetric", "All-pairs length metric d_L");
  add_space(lengthmetric);
  add_out(lengthmetric);
  lengthmetric->add_option("--format", cfg.format, "csv | json")
      ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{{"csv", Format::Csv}, {"json", Format::Json}}));

  auto* lip = app.add_subcommand("lip", "Pointwise Lipschitz profile at scale h");
  add_space(lip);
  add_field(lip);
  add_scale(lip);
  add_out(lip);

  auto* perturb_cmd = app.add_subcommand("perturb", "Shrink the singular set within a D-infinity budget");
  add_space(perturb_cmd);
  add_field(perturb_cmd);
  add_perturb_params(perturb_cmd);
  perturb_cmd->add_option("--out", cfg.out_path, "Perturbed field output (CSV)");
  perturb_cmd->add_option("--report", cfg.report_path, "Report output (default: stdout)");

  auto* verify_cmd = app.add_subcommand("verify", "Recompute the verification report for f and g");
  add_space(verify_cmd);
  add_field(verify_cmd);
  verify_cmd->add_option("--perturbed", cfg.perturbed_path, "Perturbed field g (CSV)")->required();
  add_perturb_params(verify_cmd);
  verify_cmd->add_option("--report", cfg.report_path, "Perturb report to take epsilon from");
  add_out(verify_cmd);

  auto* demo = app.add_subcommand("demo", "Perturb with r_k = 2^-k, delta_k = delta 2^-k for k = 1..steps");
  add_space(demo);
  add_field(demo);
  demo->add_option("--steps", cfg.steps)->required()->check(CLI::NonNegativeNumber);
  demo->add_option("--delta", cfg.delta)->check(CLI::PositiveNumber);
  demo->add_option("--tau", cfg.tau)->check(CLI::NonNegativeNumber);
  add_scale(demo);
  add_out(demo);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kInvalidFlags;
  }

  const std::vector<std::pair<CLI::App*, Command>> commands{
      {gen, Command::Gen},         {validate, Command::Validate},  {lengthmetric, Command::LengthMetric},
      {lip, Command::Lip},         {perturb_cmd, Command::Perturb}, {verify_cmd, Command::Verify},
      {demo, Command::Demo}};
  for (const auto& [sub, command] : commands)
    if (*sub) cfg.command = command;

  try {
    switch (cfg.command) {
      case Command::Gen: return cmd_gen(cfg, out);
      case Command::Validate: return cmd_validate(cfg, out);
      case Command::LengthMetric: return cmd_lengthmetric(cfg, out);
      case Command::Lip: return cmd_lip(cfg, out);
      case Command::Perturb: return cmd_perturb(cfg, out);
      case Command::Verify: return cmd_verify(cfg, out);
      case Command::Demo: return cmd_demo(cfg, out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidFlags;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidFlags;
  } catch (const io::IdMismatch& e) {
    err << "error: " << e.what() << '\n';
    return kIdMismatch;
  } catch (const io::IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const io::FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const ThresholdTooCoarse& e) {
    err << "error: " << e.what() << '\n';
    return kThresholdTooCoarse;
  } catch (const NotQuasiConvex& e) {
    err << "error: " << e.what() << '\n';
    return kVerificationFailed;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidFlags;
  }
  return kInvalidFlags;
}

}  // namespace liplab::cli
