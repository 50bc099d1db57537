#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "llespec/fuchsian_series.hpp"
#include "llespec/levy_driver.hpp"
#include "llespec/loewner_system.hpp"

namespace llespec::cli {

enum class OutputFormat { Csv, Json };

/// Parsed invocation of one subcommand.
struct ExperimentConfig {
  std::string command;

  // eta source: driver flags or a JSON file, never both.
  std::optional<double> kappa;
  std::optional<double> uniform_rate;
  std::vector<Atom> atoms;
  std::optional<std::string> eta_file;

  Variant variant = Variant::Unbounded;
  std::optional<int> n;
  int n_max = 10;
  std::optional<int> m_max;
  LadderSpec ladder;
  FitMethod method = FitMethod::Auto;
  std::vector<double> lambdas;
  std::vector<double> delta_kappas;
  std::optional<double> eta1;
  std::vector<double> xi;

  std::optional<OutputFormat> format;
  std::optional<std::string> out;
  int threads = 1;

  bool has_driver_flags() const { return kappa || uniform_rate || !atoms.empty(); }
};

using Cell = std::variant<std::monostate, double, long, std::string, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Both renderings of a command result; the dispatcher picks one.
struct Report {
  nlohmann::ordered_json json;
  Table table;
  OutputFormat default_format = OutputFormat::Csv;
};

/// Shortest decimal that round-trips to the same double.
std::string format_number(double x);

std::string render_csv(const Table& t);
std::string render_json(const nlohmann::ordered_json& j);

/// Driver from {"kappa", "uniform_rate", "atoms": [{"angle", "rate"}]}.
LevyDriver parse_driver_json(const nlohmann::json& j);

/// eta_1..eta_{n_max} from the configured source. A formal file supplies its
/// own length and ignores n_max.
EtaSequence resolve_eta(const ExperimentConfig& config, int n_max);

Report cmd_eta(const ExperimentConfig& config);
Report cmd_spectrum(const ExperimentConfig& config);
Report cmd_beta2(const ExperimentConfig& config);
Report cmd_fuchs(const ExperimentConfig& config);
Report cmd_theorem1(const ExperimentConfig& config);
Report cmd_ple_curve(const ExperimentConfig& config);
Report cmd_sle_converge(const ExperimentConfig& config);
Report cmd_perturbation(const ExperimentConfig& config);

/// Worker count from LLESPEC_THREADS (default: hardware concurrency).
int threads_from_environment();

/// Entry point behind the `llespec` binary. Returns the process exit code:
/// 0 success, 2 input validation, 3 numerical failure, 4 capacity.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace llespec::cli
