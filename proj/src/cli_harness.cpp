#include "llespec/cli_harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "llespec/closed_forms.hpp"
#include "llespec/errors.hpp"
#include "llespec/special_functions.hpp"
#include "llespec/spectral_solver.hpp"

namespace llespec::cli {

using json = nlohmann::ordered_json;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string format_cell(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(double d) const { return format_number(d); }
    std::string operator()(long v) const { return std::to_string(v); }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
  };
  return std::visit(Visitor{}, c);
}

json number_or_null(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

// Runs f(i) for i in [0, count) on up to `threads` workers; results keep
// their index order whatever the completion order.
template <class R>
std::vector<R> parallel_map(std::size_t count, int threads,
                            const std::function<R(std::size_t)>& f) {
  std::vector<std::optional<R>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(f(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto n = static_cast<std::size_t>(std::max(1, threads));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::min(n, count); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::vector<R> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

json complex_json(std::complex<double> z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

}  // namespace

std::string render_csv(const Table& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
    os << '\n';
  }
  return os.str();
}

std::string render_json(const json& j) { return j.dump(2) + "\n"; }

LevyDriver parse_driver_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("driver JSON must be an object");
  LevyDriver d;
  try {
    if (j.contains("kappa")) d.kappa = j.at("kappa").get<double>();
    if (j.contains("uniform_rate")) d.uniform_rate = j.at("uniform_rate").get<double>();
    if (j.contains("atoms")) {
      for (const auto& a : j.at("atoms")) {
        d.atoms.push_back({a.at("angle").get<double>(), a.at("rate").get<double>()});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed driver JSON: ") + e.what());
  }
  d.validate();
  return d;
}

EtaSequence resolve_eta(const ExperimentConfig& config, int n_max) {
  if (config.eta_file && config.has_driver_flags()) {
    throw ValidationError("give either driver flags or --eta-file, not both");
  }
  if (config.eta_file) {
    std::ifstream in(*config.eta_file);
    if (!in) throw ValidationError("cannot read eta file '" + *config.eta_file + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("eta file is not valid JSON: " + std::string(e.what()));
    }
    if (j.is_object() && j.contains("eta")) {
      std::vector<double> values;
      try {
        values = j.at("eta").get<std::vector<double>>();
      } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("\"eta\" must be a list of numbers: ") + e.what());
      }
      if (values.empty()) throw ValidationError("\"eta\" must not be empty");
      return validate_eta(values);
    }
    return eta_sequence(parse_driver_json(j), n_max);
  }
  if (!config.has_driver_flags()) {
    throw ValidationError("no eta source: pass --kappa/--uniform-rate/--atom or --eta-file");
  }
  LevyDriver d;
  d.kappa = config.kappa.value_or(0.0);
  d.uniform_rate = config.uniform_rate.value_or(0.0);
  d.atoms = config.atoms;
  return eta_sequence(d, n_max);
}

namespace {

constexpr int kDefaultMMax = 200;

// eta for commands that need indices up to m_max; formal input caps m_max
// at its own length unless m_max was given explicitly.
std::pair<EtaSequence, int> eta_for_window(const ExperimentConfig& config, int default_m_max) {
  const int requested = config.m_max.value_or(default_m_max);
  if (requested < 1) throw ValidationError("--m-max must be >= 1");
  auto eta = resolve_eta(config, requested);
  int m_max = requested;
  if (eta.formal() && !config.m_max) m_max = std::min(requested, eta.n_max());
  return {std::move(eta), m_max};
}

int dimension_for(const ExperimentConfig& config, const EtaSequence& eta) {
  if (config.n) return *config.n;
  if (auto n = truncation_order(eta, config.variant)) return *n;
  std::string msg = "eta does not truncate within 1.." + std::to_string(eta.n_max()) +
                    "; pass --n to choose the matrix size";
  if (auto near = nearest_truncation(eta, config.variant); near && near->distance < 1e-6) {
    msg += " (eta_" + std::to_string(near->n) + " is within " + format_number(near->distance) +
           " of truncation; supply exact values, e.g. --kappa p/q)";
  }
  throw ValidationError(msg);
}

json spectrum_json(const SpectrumResult& s) {
  json eigen = json::array();
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
    auto e = complex_json(s.eigenvalues[i]);
    e["multiplicity"] = s.multiplicity_of(i);
    eigen.push_back(std::move(e));
  }
  json clusters = json::array();
  for (const auto& c : s.clusters) {
    auto e = complex_json(c.value);
    e["multiplicity"] = c.multiplicity;
    clusters.push_back(std::move(e));
  }
  return json{{"eigenvalues", std::move(eigen)},
              {"max_real", number_or_null(s.max_real)},
              {"n_nonneg_real", s.n_nonneg_real},
              {"all_real", s.all_real},
              {"resonant", s.resonant},
              {"solver", s.symmetric_path ? "symmetric-tridiagonal" : "hessenberg-qr"},
              {"clusters", std::move(clusters)}};
}

Table spectrum_table(const SpectrumResult& s) {
  Table t{{"index", "re", "im", "multiplicity"}, {}};
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
    t.rows.push_back({static_cast<long>(i), s.eigenvalues[i].real(), s.eigenvalues[i].imag(),
                      static_cast<long>(s.multiplicity_of(i))});
  }
  return t;
}

}  // namespace

Report cmd_eta(const ExperimentConfig& config) {
  if (config.n_max < 1) throw ValidationError("--n-max must be >= 1");
  const auto eta = resolve_eta(config, config.n_max);
  Report r;
  r.json = json{{"eta", std::vector<double>(eta.values().begin(), eta.values().end())}};
  r.table.columns = {"n", "eta"};
  for (int n = 1; n <= eta.n_max(); ++n) r.table.rows.push_back({static_cast<long>(n), eta[n]});
  return r;
}

Report cmd_spectrum(const ExperimentConfig& config) {
  const auto [eta, m_max] = eta_for_window(config, kDefaultMMax);
  const auto window = eta.prefix(std::min(m_max, eta.n_max()));
  const int n = dimension_for(config, window);
  const auto matrices = build_matrices(eta, n, config.variant);
  const auto rec = recurrence_coefficients(eta, n, config.variant);
  const auto spec = eigen_spectrum(matrices);

  Report r;
  r.json = json{{"variant", to_string(config.variant)}, {"N", n}};
  r.json["orthogonal_regime"] = classify_regime(rec);
  r.json.update(spectrum_json(spec));
  r.table = spectrum_table(spec);
  return r;
}

Report cmd_beta2(const ExperimentConfig& config) {
  const auto [eta, m_max] = eta_for_window(config, kDefaultMMax);
  Beta2Options opts;
  opts.with_sequence = config.m_max.has_value();
  const auto rep = beta2(eta, config.variant, m_max, opts);

  Report r;
  r.default_format = OutputFormat::Json;
  r.json = json{{"variant", to_string(config.variant)},
                {"mode", rep.truncated() ? "truncated" : "sequence"}};
  if (rep.truncated()) r.json["N"] = *rep.truncation;
  r.json["beta2"] = number_or_null(rep.beta2);
  r.json["converged"] = rep.converged;
  r.json["convergence_gap"] = rep.convergence_gap;

  if (rep.truncated()) {
    // Second route: largest real root of the recurrence polynomial.
    const auto rec = recurrence_coefficients(eta, *rep.truncation, config.variant);
    const auto root = max_real_root(rec);
    r.json["charpoly_max_root"] = root.value;
    r.json["charpoly_root_fallback"] = root.used_fallback;
    if (rec.size() <= kDefaultCoefficientLimit) {
      const auto coeffs = charpoly_coefficients(rec);
      r.json["descartes_sign_changes"] =
          coeffs.exact ? descartes_positive_count(*coeffs.exact)
                       : descartes_positive_count(coeffs.values);
      r.json["exact_coefficients"] = coeffs.exact.has_value();
    }
  }

  json seq = json::array();
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (const auto& p : rep.sequence) {
    json e{{"M", p.m}, {"beta_max", number_or_null(p.beta_max)}};
    e["gap"] = std::isnan(prev) ? json(nullptr) : number_or_null(std::fabs(p.beta_max - prev));
    prev = p.beta_max;
    seq.push_back(std::move(e));
  }
  if (!rep.sequence.empty()) r.json["sequence"] = std::move(seq);

  r.table.columns = {"variant", "mode", "N", "beta2", "converged", "convergence_gap"};
  r.table.rows.push_back({std::string(to_string(config.variant)),
                          std::string(rep.truncated() ? "truncated" : "sequence"),
                          rep.truncated() ? Cell(static_cast<long>(*rep.truncation)) : Cell{},
                          rep.beta2, rep.converged, rep.convergence_gap});
  return r;
}

Report cmd_fuchs(const ExperimentConfig& config) {
  const auto [eta, m_max] = eta_for_window(config, kDefaultMMax);
  const auto window = eta.prefix(std::min(m_max, eta.n_max()));
  const int n = dimension_for(config, window);
  FitOptions opts;
  opts.method = config.method;
  const FuchsianSystem sys(build_matrices(eta, n, config.variant));
  const auto fit = blowup_exponent(sys, config.ladder, opts);
  const auto spec = eigen_spectrum(sys.matrices);

  Report r;
  r.default_format = OutputFormat::Json;
  r.json = json{{"variant", to_string(config.variant)},
                {"N", n},
                {"beta_est", number_or_null(fit.beta_est)},
                {"xi_near", fit.xi_near},
                {"xi_far", fit.xi_far},
                {"residual", number_or_null(fit.residual)},
                {"oscillation_detected", fit.oscillation_detected},
                {"reliable", fit.reliable()},
                {"method", to_string(fit.method_used)},
                {"series_terms", fit.series_terms},
                {"max_real_eigenvalue", number_or_null(spec.max_real)}};
  if (std::isfinite(spec.max_real) && spec.max_real != 0.0) {
    r.json["relative_difference"] =
        number_or_null(std::fabs(fit.beta_est - spec.max_real) / std::fabs(spec.max_real));
  }
  json ladder = json::array();
  r.table.columns = {"xi", "mean_rho", "slope"};
  for (std::size_t j = 0; j < fit.xi.size(); ++j) {
    const double slope = j < fit.slopes.size() ? fit.slopes[j] : std::nan("");
    ladder.push_back(json{{"xi", fit.xi[j]},
                          {"mean_rho", number_or_null(fit.mean_rho[j])},
                          {"slope", number_or_null(slope)}});
    r.table.rows.push_back({fit.xi[j], fit.mean_rho[j],
                            j < fit.slopes.size() ? Cell(slope) : Cell{}});
  }
  r.json["ladder"] = std::move(ladder);
  return r;
}

Report cmd_theorem1(const ExperimentConfig& config) {
  if (!config.eta1) throw ValidationError("theorem1 needs --eta1");
  const auto p = HypergeometricParams::from_eta1(*config.eta1);
  std::vector<double> grid = config.xi;
  if (grid.empty()) {
    for (int i = 0; i <= 9; ++i) grid.push_back(i / 10.0);
  }

  Report r;
  r.default_format = OutputFormat::Json;
  r.json = json{{"eta1", *config.eta1}, {"beta", p.beta}, {"a", p.a}, {"b", p.b}, {"c", p.c}};
  if (p.c - p.a - p.b > 0.0) r.json["f0_at_one"] = gauss_at_one(p.a, p.b, p.c);
  r.table.columns = {"xi", "f0", "f1", "theta0", "theta1"};
  json rows = json::array();
  for (double xi : grid) {
    const auto v = theorem1_solution(*config.eta1, xi);
    rows.push_back(json{{"xi", xi}, {"f0", v.f0}, {"f1", v.f1},
                        {"theta0", v.theta0}, {"theta1", v.theta1}});
    r.table.rows.push_back({xi, v.f0, v.f1, v.theta0, v.theta1});
  }
  r.json["rows"] = std::move(rows);
  return r;
}

Report cmd_ple_curve(const ExperimentConfig& config) {
  if (config.lambdas.empty()) throw ValidationError("ple-curve needs --lambda values");
  for (double l : config.lambdas) {
    if (!(l > 0.0) || !std::isfinite(l)) throw ValidationError("lambda values must be > 0");
  }
  const int m_default = config.m_max.value_or(kDefaultMMax);
  struct Point {
    double lambda;
    Beta2Report report;
  };
  const auto points = parallel_map<Point>(
      config.lambdas.size(), config.threads, [&](std::size_t i) {
        const double lambda = config.lambdas[i];
        int m_max = m_default;
        // Integer lambda truncates at N = lambda + 2 (bounded) or lambda - 2.
        if (lambda == std::floor(lambda) && lambda < 1e6) {
          m_max = std::max(m_max, static_cast<int>(lambda) + 2);
        }
        LevyDriver d;
        d.uniform_rate = lambda;
        return Point{lambda, beta2(eta_sequence(d, m_max), config.variant, m_max)};
      });

  Report r;
  r.table.columns = {"lambda", "beta2", "mode", "N", "converged"};
  json arr = json::array();
  for (const auto& p : points) {
    const auto& rep = p.report;
    const std::string mode = rep.truncated() ? "truncated" : "sequence";
    r.table.rows.push_back({p.lambda, rep.beta2, mode,
                            rep.truncated() ? Cell(static_cast<long>(*rep.truncation)) : Cell{},
                            rep.converged});
    json e{{"lambda", p.lambda}, {"beta2", number_or_null(rep.beta2)}, {"mode", mode}};
    if (rep.truncated()) e["N"] = *rep.truncation;
    e["converged"] = rep.converged;
    arr.push_back(std::move(e));
  }
  r.json = json{{"variant", to_string(config.variant)}, {"points", std::move(arr)}};
  return r;
}

Report cmd_sle_converge(const ExperimentConfig& config) {
  const auto [eta, m_max] = eta_for_window(config, 60);
  Beta2Options opts;
  opts.with_sequence = true;
  const auto rep = beta2(eta, config.variant, m_max, opts);

  Report r;
  r.table.columns = {"M", "beta_max", "gap"};
  json arr = json::array();
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (const auto& p : rep.sequence) {
    const double gap = std::fabs(p.beta_max - prev);
    r.table.rows.push_back({static_cast<long>(p.m), p.beta_max,
                            std::isnan(prev) ? Cell{} : Cell(gap)});
    arr.push_back(json{{"M", p.m}, {"beta_max", number_or_null(p.beta_max)},
                       {"gap", std::isnan(prev) ? json(nullptr) : number_or_null(gap)}});
    prev = p.beta_max;
  }
  r.json = json{{"variant", to_string(config.variant)}, {"sequence", std::move(arr)}};
  if (rep.truncated()) r.json["N"] = *rep.truncation;
  return r;
}

Report cmd_perturbation(const ExperimentConfig& config) {
  std::vector<double> dks = config.delta_kappas;
  if (dks.empty()) dks = {1e-6, 1e-5, 1e-4};
  for (double dk : dks) {
    if (!(dk > 0.0 && dk <= 1e-3)) throw ValidationError("--delta-kappa values must lie in (0, 1e-3]");
  }
  const auto spectra = parallel_map<SpectrumResult>(dks.size(), config.threads, [&](std::size_t i) {
    const auto eta = eta_sequence(perturbed_n6_driver(dks[i]), 6);
    return eigen_spectrum(build_matrices(eta, 6, Variant::Unbounded));
  });

  Report r;
  r.table.columns = {"delta_kappa", "source", "re", "im"};
  json arr = json::array();
  for (std::size_t i = 0; i < dks.size(); ++i) {
    json computed = json::array();
    json predicted = json::array();
    for (const auto& z : spectra[i].eigenvalues) {
      r.table.rows.push_back({dks[i], std::string("computed"), z.real(), z.imag()});
      computed.push_back(complex_json(z));
    }
    for (const auto& z : perturbed_n6_pairs(dks[i])) {
      r.table.rows.push_back({dks[i], std::string("predicted"), z.real(), z.imag()});
      predicted.push_back(complex_json(z));
    }
    arr.push_back(json{{"delta_kappa", dks[i]},
                       {"computed", std::move(computed)},
                       {"predicted", std::move(predicted)}});
  }
  r.json = json{{"variant", "unbounded"}, {"N", 6}, {"points", std::move(arr)}};
  return r;
}

int threads_from_environment() {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("LLESPEC_THREADS")) {
    int v = 0;
    const std::string s(env);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || v < 1) {
      throw ValidationError("LLESPEC_THREADS must be a positive integer");
    }
    n = std::min(n, v);
  }
  return n;
}

namespace {

double parse_number(const std::string& text) { return to_double(parse_rational(text)); }

double parse_angle(std::string text) {
  // Accepts plain numbers, "pi", "pi/k" and "r*pi".
  const auto pos = text.find("pi");
  if (pos == std::string::npos) return parse_number(text);
  std::string before = text.substr(0, pos);
  std::string after = text.substr(pos + 2);
  double factor = 1.0;
  if (!before.empty()) {
    if (before.back() != '*') throw ValidationError("cannot parse angle '" + text + "'");
    before.pop_back();
    factor = parse_number(before);
  }
  if (!after.empty()) {
    if (after.front() != '/') throw ValidationError("cannot parse angle '" + text + "'");
    factor /= parse_number(after.substr(1));
  }
  return factor * std::numbers::pi;
}

Atom parse_atom(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw ValidationError("--atom expects angle:rate, got '" + text + "'");
  }
  return {parse_angle(text.substr(0, colon)), parse_number(text.substr(colon + 1))};
}

std::vector<double> parse_list(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string piece;
    while (std::getline(ss, piece, ',')) {
      if (!piece.empty()) out.push_back(parse_number(piece));
    }
  }
  return out;
}

struct RawFlags {
  std::string kappa, uniform_rate, eta1;
  std::vector<std::string> atoms, lambdas, delta_kappas, xi;
  std::string variant;
  std::string method = "auto";
  bool json = false, csv = false;
};

void add_source_flags(CLI::App* sub, RawFlags& raw, ExperimentConfig& cfg) {
  sub->add_option("--kappa", raw.kappa, "Brownian temperature (accepts p/q)");
  sub->add_option("--uniform-rate", raw.uniform_rate,
                  "rate of jumps uniform on the circle (accepts p/q)");
  sub->add_option("--atom", raw.atoms, "symmetric jump pair angle:rate (repeatable)");
  sub->add_option("--eta-file", cfg.eta_file, "JSON driver or {\"eta\": [...]} file");
}

void add_output_flags(CLI::App* sub, RawFlags& raw, ExperimentConfig& cfg) {
  auto* j = sub->add_flag("--json", raw.json, "emit JSON");
  auto* c = sub->add_flag("--csv", raw.csv, "emit CSV");
  j->excludes(c);
  sub->add_option("--out", cfg.out, "write output to PATH instead of stdout");
}

void add_variant_flag(CLI::App* sub, RawFlags& raw, const std::string& fallback) {
  sub->add_option("--variant", raw.variant, "unbounded | bounded (default " + fallback + ")");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Integral-means spectrum beta(2) of whole-plane Levy-Loewner evolutions", "llespec"};
  app.require_subcommand(1);
  ExperimentConfig cfg;
  RawFlags raw;

  auto* eta = app.add_subcommand("eta", "characteristic exponents eta_n of a driver");
  add_source_flags(eta, raw, cfg);
  eta->add_option("--n-max", cfg.n_max, "last index")->capture_default_str();
  add_output_flags(eta, raw, cfg);

  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of the residue matrix B");
  add_source_flags(spectrum, raw, cfg);
  add_variant_flag(spectrum, raw, "unbounded");
  spectrum->add_option("--n", cfg.n, "matrix size (default: truncation order)");
  spectrum->add_option("--m-max", cfg.m_max, "truncation search range");
  add_output_flags(spectrum, raw, cfg);

  auto* b2 = app.add_subcommand("beta2", "beta(2) as the maximal real eigenvalue");
  add_source_flags(b2, raw, cfg);
  add_variant_flag(b2, raw, "unbounded");
  b2->add_option("--m-max", cfg.m_max, "largest submatrix; also reports beta_max(M)");
  add_output_flags(b2, raw, cfg);

  auto* fuchs = app.add_subcommand("fuchs", "blowup-exponent fit of the analytic solution");
  add_source_flags(fuchs, raw, cfg);
  add_variant_flag(fuchs, raw, "unbounded");
  fuchs->add_option("--n", cfg.n, "system size (default: truncation order)");
  fuchs->add_option("--m-max", cfg.m_max, "truncation search range");
  fuchs->add_option("--j-min", cfg.ladder.j_min, "ladder start, xi = 1 -+ 2^-j")->capture_default_str();
  fuchs->add_option("--j-max", cfg.ladder.j_max, "ladder end")->capture_default_str();
  fuchs->add_option("--method", raw.method, "auto | series | ode")->capture_default_str();
  add_output_flags(fuchs, raw, cfg);

  auto* th1 = app.add_subcommand("theorem1", "closed-form N = 2 unbounded solution");
  th1->add_option("--eta1", raw.eta1, "eta_1 >= 0")->required();
  th1->add_option("--xi", raw.xi, "evaluation points (comma separated)");
  add_output_flags(th1, raw, cfg);

  auto* ple = app.add_subcommand("ple-curve", "beta(2) of PLE_lambda over a lambda grid");
  ple->add_option("--lambda", raw.lambdas, "jump rates (comma separated, repeatable)")->required();
  add_variant_flag(ple, raw, "bounded");
  ple->add_option("--m-max", cfg.m_max, "largest submatrix for non-truncating lambda");
  add_output_flags(ple, raw, cfg);

  auto* sle = app.add_subcommand("sle-converge", "beta_max(M) sequence and successive gaps");
  add_source_flags(sle, raw, cfg);
  add_variant_flag(sle, raw, "unbounded");
  sle->add_option("--m-max", cfg.m_max, "largest submatrix (default 60)");
  add_output_flags(sle, raw, cfg);

  auto* pert = app.add_subcommand("perturbation", "perturbed N = 6 truncated SLE spectrum");
  pert->add_option("--delta-kappa", raw.delta_kappas, "perturbations (comma separated)");
  add_output_flags(pert, raw, cfg);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    const auto* sub = app.get_subcommands().front();
    cfg.command = sub->get_name();
    if (!raw.kappa.empty()) cfg.kappa = parse_number(raw.kappa);
    if (!raw.uniform_rate.empty()) cfg.uniform_rate = parse_number(raw.uniform_rate);
    for (const auto& a : raw.atoms) cfg.atoms.push_back(parse_atom(a));
    if (!raw.eta1.empty()) cfg.eta1 = parse_number(raw.eta1);
    cfg.lambdas = parse_list(raw.lambdas);
    cfg.delta_kappas = parse_list(raw.delta_kappas);
    cfg.xi = parse_list(raw.xi);
    cfg.variant = parse_variant(raw.variant.empty()
                                    ? (cfg.command == "ple-curve" ? "bounded" : "unbounded")
                                    : raw.variant);
    cfg.method = parse_fit_method(raw.method);
    if (raw.json) cfg.format = OutputFormat::Json;
    if (raw.csv) cfg.format = OutputFormat::Csv;
    cfg.threads = threads_from_environment();

    static const std::map<std::string, Report (*)(const ExperimentConfig&)> commands = {
        {"eta", cmd_eta},           {"spectrum", cmd_spectrum},
        {"beta2", cmd_beta2},       {"fuchs", cmd_fuchs},
        {"theorem1", cmd_theorem1}, {"ple-curve", cmd_ple_curve},
        {"sle-converge", cmd_sle_converge}, {"perturbation", cmd_perturbation}};
    const Report report = commands.at(cfg.command)(cfg);

    const auto format = cfg.format.value_or(report.default_format);
    const std::string text =
        format == OutputFormat::Json ? render_json(report.json) : render_csv(report.table);
    if (cfg.out) {
      std::ofstream file(*cfg.out, std::ios::binary);
      if (!file) throw ValidationError("cannot write output file '" + *cfg.out + "'");
      file << text;
      if (!file) throw ValidationError("failed writing output file '" + *cfg.out + "'");
    } else {
      out << text;
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace llespec::cli
