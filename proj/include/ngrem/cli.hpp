#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "ngrem/chain.hpp"
#include "ngrem/error.hpp"
#include "ngrem/free_energy.hpp"
#include "ngrem/model_io.hpp"
#include "ngrem/report.hpp"
#include "ngrem/simulator.hpp"
#include "ngrem/variational.hpp"

namespace ngrem::cli {

enum ExitCode : int { kOk = 0, kValidationError = 1, kCapacityError = 2 };

struct RunConfig {
  std::string command;  // validate | chain | curve | oracle | simulate | ultrametric
  std::string model_path;
  double beta_min = 0.0;
  double beta_max = 3.0;
  int beta_steps = 61;
  std::vector<int> sizes{12};
  int replicas = 16;
  std::uint64_t seed = 1;
  std::string output_path;  // empty: stdout
  std::string format = "csv";
  bool exact = false;
  unsigned threads = 1;
  unsigned partitions = 64;
  double tol = 1e-8;
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"validate", "chain", "curve", "oracle", "simulate", "ultrametric"};
  return names;
}

// beta_steps evenly spaced points from beta_min to beta_max inclusive.
inline std::vector<double> beta_grid(const RunConfig& config) {
  std::vector<double> grid;
  if (config.beta_steps == 1) return {config.beta_min};
  for (int i = 0; i < config.beta_steps; ++i)
    grid.push_back(config.beta_min + (config.beta_max - config.beta_min) * i / (config.beta_steps - 1));
  return grid;
}

inline void check_config(const RunConfig& config) {
  if (std::find(commands().begin(), commands().end(), config.command) == commands().end())
    throw Error(ErrorCode::InvalidArgument, "unknown command '" + config.command + "'");
  if (config.model_path.empty()) throw Error(ErrorCode::InvalidArgument, "--model is required");
  if (!(config.beta_min >= 0.0) || !(config.beta_max >= config.beta_min))
    throw Error(ErrorCode::InvalidArgument, "need 0 <= beta-min <= beta-max");
  if (config.beta_steps < 1) throw Error(ErrorCode::InvalidArgument, "beta-steps must be at least 1");
  if (config.replicas < 1) throw Error(ErrorCode::InvalidArgument, "replicas must be at least 1");
  if (config.format != "csv" && config.format != "json")
    throw Error(ErrorCode::InvalidArgument, "format must be csv or json");
  if (config.sizes.empty()) throw Error(ErrorCode::InvalidArgument, "at least one --N is required");
}

namespace detail {

inline Arithmetic mode_of(const RunConfig& config) {
  return config.exact ? Arithmetic::exact : Arithmetic::floating;
}

inline void emit_table(const RunConfig& config, const Table& table, std::ostream& out) {
  if (config.format == "json")
    out << table.to_json().dump(2) << '\n';
  else
    table.write_csv(out);
}

// Segment table path next to the sampled curve: curve.csv -> curve.segments.csv.
inline std::string segments_path(const std::string& path) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + ".segments";
  return path.substr(0, dot) + ".segments" + path.substr(dot);
}

inline int run_validate(const RunConfig&, const ModelSpec& m, std::ostream& out, std::ostream& err) {
  if (m.gamma_deviation() != 0.0 || m.weight_deviation() != 0.0)
    err << "renormalized: gamma sum deviation " << format_real(m.gamma_deviation()) << ", weight sum deviation "
        << format_real(m.weight_deviation()) << '\n';
  out << model_to_json(m).dump(2) << '\n';
  return kOk;
}

inline int run_chain(const RunConfig& config, const ModelSpec& m, std::ostream& out) {
  emit_table(config, chain_table(build_optimal_chain(m, mode_of(config))), out);
  return kOk;
}

inline int run_curve(const RunConfig& config, const ModelSpec& m, std::ostream& out) {
  const Chain chain = build_optimal_chain(m, mode_of(config));
  const FreeEnergyCurve curve = curve_from_optimal_chain(m, chain);
  std::vector<double> grid = beta_grid(config);
  grid.insert(grid.end(), chain.betas.begin(), chain.betas.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  const Table segments = segment_table(curve);
  const Table samples = curve_samples_table(curve, grid);

  if (config.format == "json") {
    nlohmann::ordered_json doc{{"segments", segments.to_json()}, {"samples", samples.to_json()}};
    out << doc.dump(2) << '\n';
    return kOk;
  }
  if (config.output_path.empty()) {
    segments.write_csv(out);
    out << '\n';
    samples.write_csv(out);
    return kOk;
  }
  std::ofstream seg_file(segments_path(config.output_path));
  if (!seg_file) throw Error(ErrorCode::InvalidArgument, "cannot write " + segments_path(config.output_path));
  segments.write_csv(seg_file);
  samples.write_csv(out);
  return kOk;
}

inline int run_oracle(const RunConfig& config, const ModelSpec& m, std::ostream& out) {
  const FreeEnergyCurve closed = closed_form_free_energy(m, mode_of(config));
  std::vector<FreeEnergyCurve> chain_curves;
  const bool enumerate = m.n() <= kEnumerationCap;
  if (enumerate)
    for_each_chain(m, [&](std::span<const SubsetMask> sets) {
      chain_curves.push_back(
          chain_free_energy_curve(m, make_chain(m, std::vector<SubsetMask>(sets.begin(), sets.end()))));
    });

  Table table{{"beta", "closed_form", "variational", "min_over_chains", "max_abs_gap"}, {}};
  for (double beta : beta_grid(config)) {
    const double cf = closed(beta);
    const double var = solve_variational(m, beta, config.tol).value;
    double gap = std::abs(var - cf);
    double min_chain = std::nan("");
    if (enumerate) {
      min_chain = kInfinity;
      for (const auto& c : chain_curves) min_chain = std::min(min_chain, c(beta));
      gap = std::max(gap, std::abs(min_chain - cf));
    }
    table.rows.push_back({beta, cf, var, min_chain, gap});
  }
  emit_table(config, table, out);
  return kOk;
}

inline int run_simulate(const RunConfig& config, const ModelSpec& m, std::ostream& out) {
  const FreeEnergyCurve limit = closed_form_free_energy(m, mode_of(config));
  SimulationOptions options;
  options.threads = config.threads;
  options.partitions = config.partitions;
  const std::vector<double> betas = beta_grid(config);
  Table table{{"N", "beta", "replicas", "mean_F", "std_F", "f_limit", "gap"}, {}};
  for (int n_total : config.sizes) {
    for (const auto& e : estimate_quenched(m, n_total, betas, config.replicas, config.seed, options)) {
      const double f = limit(e.beta);
      table.rows.push_back({static_cast<std::int64_t>(e.size.n_effective), e.beta,
                            static_cast<std::int64_t>(e.replicas), e.mean_f, e.std_f, f, e.mean_f - f});
    }
  }
  emit_table(config, table, out);
  return kOk;
}

inline int run_ultrametric(const RunConfig& config, const ModelSpec& m, std::ostream& out) {
  const SizeAssignment size = assign_sizes(m, config.sizes.front());
  const auto found = find_ultrametric_violation(m, size);
  if (config.format == "json") {
    nlohmann::ordered_json doc;
    doc["ultrametric"] = !found.has_value();
    if (found) {
      doc["witness"] = {{"x", found->x}, {"y", found->y}, {"z", found->z}, {"d_xy", found->d_xy},
                        {"d_yz", found->d_yz}, {"d_xz", found->d_xz}, {"N", size.n_effective}};
    }
    out << doc.dump(2) << '\n';
    return kOk;
  }
  if (!found) {
    out << "ultrametric\n";
    return kOk;
  }
  auto line = [&](const char* name, const Configuration& c) {
    out << name;
    for (auto v : c) out << ' ' << v;
    out << '\n';
  };
  out << "violation N=" << size.n_effective << '\n';
  line("x", found->x);
  line("y", found->y);
  line("z", found->z);
  out << "d_xy " << format_real(found->d_xy) << '\n';
  out << "d_yz " << format_real(found->d_yz) << '\n';
  out << "d_xz " << format_real(found->d_xz) << '\n';
  return kOk;
}

}  // namespace detail

// Dispatches one command. Diagnostics go to err; results to out, or to output_path when set.
inline int run(const RunConfig& config, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  try {
    check_config(config);
    const ModelSpec m = load_model(config.model_path);
    std::ofstream file;
    std::ostream* sink = &out;
    if (!config.output_path.empty()) {
      file.open(config.output_path);
      if (!file) throw Error(ErrorCode::InvalidArgument, "cannot write '" + config.output_path + "'");
      sink = &file;
    }
    const std::string& cmd = config.command;
    if (cmd == "validate") return detail::run_validate(config, m, *sink, err);
    if (cmd == "chain") return detail::run_chain(config, m, *sink);
    if (cmd == "curve") return detail::run_curve(config, m, *sink);
    if (cmd == "oracle") return detail::run_oracle(config, m, *sink);
    if (cmd == "simulate") return detail::run_simulate(config, m, *sink);
    return detail::run_ultrametric(config, m, *sink);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::CapExceeded:
      case ErrorCode::BudgetExceeded:
      case ErrorCode::GroupTooSmall:
        return kCapacityError;
      default:
        return kValidationError;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  }
}

}  // namespace ngrem::cli
