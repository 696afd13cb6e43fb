#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "stabaaa/dataset.hpp"
#include "stabaaa/errors.hpp"
#include "stabaaa/fit.hpp"
#include "stabaaa/io.hpp"

namespace fs = std::filesystem;
using namespace stabaaa;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitTolerance = 3;

struct FitFlags {
  std::string algorithm = "stabaaa";
  double tol = 1e-3;
  double theta = 0.1;
  int mmax = 5;
  std::size_t max_order = 0;
  std::string freq_unit = "hz";
  std::string error_mode = "abs";
  bool no_normalize = false;
  bool trace = false;
};

void add_fit_flags(CLI::App* cmd, FitFlags& f) {
  cmd->add_option("--tol", f.tol, "Target max error")->check(CLI::PositiveNumber);
  cmd->add_option("--theta", f.theta, "Tolerance decreasing factor in (0, 1)")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--mmax", f.mmax, "Stabilization retries")->check(CLI::NonNegativeNumber);
  cmd->add_option("--max-order", f.max_order, "Support-point cap, 0 = floor(V/4)");
  cmd->add_option("--freq-unit", f.freq_unit, "Frequency unit of CSV input and output")
      ->check(CLI::IsMember({"hz", "rad_s"}));
  cmd->add_option("--error-mode", f.error_mode, "Greedy selection error")->check(CLI::IsMember({"abs", "rel"}));
  cmd->add_flag("--no-normalize", f.no_normalize, "Fit the raw data");
  cmd->add_flag("--trace", f.trace, "Print greedy iterations to stderr");
}

FrequencyUnit unit_of(const std::string& s) { return s == "hz" ? FrequencyUnit::kHertz : FrequencyUnit::kRadPerSecond; }

double to_user_unit(double omega, FrequencyUnit u) {
  return u == FrequencyUnit::kHertz ? omega / (2.0 * std::numbers::pi) : omega;
}

double from_user_unit(double f, FrequencyUnit u) { return u == FrequencyUnit::kHertz ? 2.0 * std::numbers::pi * f : f; }

FitRequest make_request(const FitFlags& f, Algorithm algorithm) {
  FitRequest req;
  req.algorithm = algorithm;
  req.stabaaa.tolerance = f.tol;
  req.stabaaa.theta = f.theta;
  req.stabaaa.m_max = f.mmax;
  req.stabaaa.max_iter = f.max_order;
  req.stabaaa.error_mode = f.error_mode == "rel" ? ErrorMode::kRelative : ErrorMode::kAbsolute;
  if (f.trace) {
    req.stabaaa.trace = [](const IterationRecord& r) {
      std::cerr << "iter " << r.iter << " freq " << r.chosen_freq << " max_err " << r.max_err << " sigma_min "
                << r.sigma_min << '\n';
    };
  }
  req.stabaaa.validate();
  return req;
}

NormalizedDataset prepare(const FrequencyDataset& raw, bool no_normalize) {
  if (no_normalize) return {raw, NormalizationRecord{}};
  return normalize(raw);
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw ValidationError("cannot open '" + p.string() + "' for writing");
  f << std::setprecision(17);
  return f;
}

void write_plot(const fs::path& p, const FrequencyDataset& raw, const StoredModel& sm, FrequencyUnit u) {
  std::ofstream f = open_out(p);
  f << "freq,data_abs,model_abs,error_abs\n";
  for (std::size_t v = 0; v < raw.size(); ++v) {
    const cplx h = sm.response(raw.freqs()[v]);
    f << to_user_unit(raw.freqs()[v], u) << ',' << std::abs(raw.values()[v]) << ',' << std::abs(h) << ','
      << std::abs(h - raw.values()[v]) << '\n';
  }
}

std::uint64_t diagnostic_seed() {
  if (const char* s = std::getenv("STABAAA_SEED")) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      throw ValidationError(std::string("STABAAA_SEED must be a non-negative integer, got '") + s + "'");
    }
  }
  return std::random_device{}();
}

int cmd_fit(const FitFlags& f, const fs::path& input, const fs::path& out_dir) {
  const FitRequest req = make_request(f, parse_algorithm(f.algorithm));
  const FrequencyUnit unit = unit_of(f.freq_unit);
  const FrequencyDataset raw = load_dataset(input, unit);
  const NormalizedDataset nd = prepare(raw, f.no_normalize);
  const FitResult res = run_fit(nd.data, req);

  fs::create_directories(out_dir);
  write_json(out_dir / "model.json", fit_result_to_json(res, nd.record));
  write_json(out_dir / "stability.json", stability_to_json(res.stability));
  write_json(out_dir / "metrics.json", metrics_to_json(res.metrics));
  write_plot(out_dir / "plot.csv", raw, StoredModel{res.model, nd.record}, unit);

  std::cout << to_string(res.algorithm) << ": order " << res.model.order() << ", "
            << (res.stability.stable ? "stable" : "unstable") << " (" << res.stability.unstable_count
            << " unstable poles), e_inf " << res.metrics.e_inf << ", e_2 " << res.metrics.e_2 << '\n';
  if (res.algorithm == Algorithm::kStabAaa && !res.met_tolerance) {
    std::cerr << "warning: stable model returned but tolerance " << f.tol << " was not met\n";
    return kExitTolerance;
  }
  return kExitOk;
}

std::vector<double> read_frequency_list(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ValidationError("cannot open '" + p.string() + "'");
  std::vector<double> out;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    const auto comma = line.find(',');
    std::string cell = line.substr(0, comma);
    if (cell.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
    } catch (const std::exception&) {
      if (n == 1) continue;  // header
      throw ParseError(n, "not a frequency: '" + cell + "'");
    }
  }
  return out;
}

std::vector<double> grid(const std::vector<double>& spec, bool linear) {
  const double lo = spec[0], hi = spec[1];
  const double count = spec[2];
  if (!(lo > 0.0) || !(hi >= lo) || !(count >= 1.0) || count != std::floor(count)) {
    throw ValidationError("--grid expects LO HI N with 0 < LO <= HI and integer N >= 1");
  }
  const auto n = static_cast<std::size_t>(count);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    out[i] = linear ? lo + t * (hi - lo) : lo * std::pow(hi / lo, t);
  }
  return out;
}

int cmd_eval(const fs::path& model_path, const fs::path& freqs_path, const std::vector<double>& grid_spec,
             bool linear, const std::string& freq_unit, const fs::path& out) {
  const FrequencyUnit unit = unit_of(freq_unit);
  const StoredModel sm = model_from_json(read_json(model_path));
  const std::vector<double> freqs = grid_spec.empty() ? read_frequency_list(freqs_path) : grid(grid_spec, linear);
  std::ostringstream buf;
  buf << std::setprecision(17) << "freq,re,im\n";
  for (double f : freqs) {
    const cplx h = sm.response(from_user_unit(f, unit));
    buf << f << ',' << h.real() << ',' << h.imag() << '\n';
  }
  if (out.empty() || out == "-") {
    std::cout << buf.str();
  } else {
    std::ofstream o = open_out(out);
    o << buf.str();
  }
  return kExitOk;
}

void emit_json(const ordered_json& j, const fs::path& out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    write_json(out, j);
  }
}

int cmd_poles(const fs::path& model_path, bool normalized, const fs::path& out) {
  const StoredModel sm = model_from_json(read_json(model_path));
  ordered_json j = pole_residue_to_json(normalized ? pole_residue_form(sm.model) : sm.physical_pole_residue());
  j["units"] = normalized ? "normalized" : "rad_s";
  emit_json(j, out);
  return kExitOk;
}

int cmd_export(const fs::path& model_path, const std::string& format, const fs::path& out) {
  const StoredModel sm = model_from_json(read_json(model_path));
  ordered_json j;
  if (format == "pole-residue") {
    j = pole_residue_to_json(pole_residue_form(sm.model));
  } else {
    const DescriptorRealization r = realization_of(sm.model);
    j = realization_to_json(r);
    const RealizationCheck chk = check_realization(sm.model, r, diagnostic_seed());
    j["check"] = {{"seed", chk.seed}, {"points", chk.points}, {"max_rel_diff", chk.max_rel_diff}};
  }
  j["normalization"] = {{"f_max", sm.normalization.f_max}, {"h_max", sm.normalization.h_max}};
  emit_json(j, out);
  return kExitOk;
}

std::vector<Algorithm> parse_algorithm_list(const std::string& list) {
  std::vector<Algorithm> out;
  std::stringstream ss(list);
  for (std::string name; std::getline(ss, name, ',');) out.push_back(parse_algorithm(name));
  if (out.empty()) throw ValidationError("--algorithms is empty");
  return out;
}

struct CompareRow {
  FitResult result;
  std::string status = "ok";
  double seconds = 0.0;
};

int cmd_compare(const FitFlags& f, const std::string& algorithms, const fs::path& input, const fs::path& out,
                bool timing) {
  const std::vector<Algorithm> algs = parse_algorithm_list(algorithms);
  std::vector<FitRequest> requests;
  for (Algorithm a : algs) requests.push_back(make_request(f, a));
  const NormalizedDataset nd = prepare(load_dataset(input, unit_of(f.freq_unit)), f.no_normalize);

  std::vector<std::future<CompareRow>> jobs;
  for (const FitRequest& req : requests) {
    jobs.push_back(std::async(std::launch::async, [&nd, req] {
      CompareRow row;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        row.result = run_fit(nd.data, req);
      } catch (const Error& e) {
        row.result.algorithm = req.algorithm;
        row.status = std::string("error: ") + e.what();
      }
      row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      return row;
    }));
  }

  std::ostringstream buf;
  buf << std::setprecision(17) << "algorithm,order,stable,unstable_poles,e_inf,e_2,e_rms,met_tolerance,status";
  if (timing) buf << ",seconds";
  buf << '\n';
  int code = kExitOk;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const CompareRow row = jobs[i].get();
    buf << to_string(algs[i]) << ',';
    if (row.status == "ok") {
      const FitResult& r = row.result;
      buf << r.model.order() << ',' << (r.stability.stable ? "true" : "false") << ',' << r.stability.unstable_count
          << ',' << r.metrics.e_inf << ',' << r.metrics.e_2 << ',' << r.metrics.e_rms << ','
          << (r.met_tolerance ? "true" : "false") << ",ok";
    } else {
      std::cerr << to_string(algs[i]) << ": " << row.status << '\n';
      buf << ",,,,,,,error";
      code = kExitNumerical;
    }
    if (timing) buf << ',' << row.seconds;
    buf << '\n';
  }
  if (out.empty() || out == "-") {
    std::cout << buf.str();
  } else {
    std::ofstream o = open_out(out);
    o << buf.str();
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stable rational approximation of frequency response data"};
  app.require_subcommand(1, 1);

  FitFlags fit_flags;
  fs::path fit_input, fit_out = ".";
  CLI::App* fit = app.add_subcommand("fit", "Fit a model to a freq,re,im CSV");
  fit->add_option("input", fit_input, "Input CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("-o,--output", fit_out, "Output directory");
  fit->add_option("--algorithm", fit_flags.algorithm, "Fitting algorithm")
      ->check(CLI::IsMember({"aaa", "stabaaa", "loewner", "truncate-refit"}));
  add_fit_flags(fit, fit_flags);

  fs::path eval_model, eval_freqs, eval_out;
  std::vector<double> eval_grid;
  bool eval_linear = false;
  std::string eval_unit = "hz";
  CLI::App* eval = app.add_subcommand("eval", "Evaluate a stored model on a frequency grid");
  eval->add_option("model", eval_model, "Model JSON")->required()->check(CLI::ExistingFile);
  auto* freqs_opt = eval->add_option("--freqs", eval_freqs, "File with one frequency per line")
                        ->check(CLI::ExistingFile);
  auto* grid_opt = eval->add_option("--grid", eval_grid, "LO HI N, log-spaced unless --linear")->expected(3);
  freqs_opt->excludes(grid_opt);
  eval->add_flag("--linear", eval_linear, "Linear grid spacing");
  eval->add_option("--freq-unit", eval_unit, "Frequency unit")->check(CLI::IsMember({"hz", "rad_s"}));
  eval->add_option("-o,--output", eval_out, "Output CSV (stdout when omitted)");

  fs::path poles_model, poles_out;
  bool poles_normalized = false;
  CLI::App* poles_cmd = app.add_subcommand("poles", "Print poles and residues of a stored model");
  poles_cmd->add_option("model", poles_model, "Model JSON")->required()->check(CLI::ExistingFile);
  poles_cmd->add_flag("--normalized", poles_normalized, "Report in normalized units");
  poles_cmd->add_option("-o,--output", poles_out, "Output JSON (stdout when omitted)");

  fs::path export_model, export_out;
  std::string export_format = "realization";
  CLI::App* export_cmd = app.add_subcommand("export", "Export a stored model in another representation");
  export_cmd->add_option("model", export_model, "Model JSON")->required()->check(CLI::ExistingFile);
  export_cmd->add_option("--format", export_format, "Target representation")
      ->check(CLI::IsMember({"realization", "pole-residue"}));
  export_cmd->add_option("-o,--output", export_out, "Output JSON (stdout when omitted)");

  FitFlags cmp_flags;
  fs::path cmp_input, cmp_out;
  std::string cmp_algorithms = "aaa,stabaaa,truncate-refit";
  bool cmp_timing = false;
  CLI::App* compare = app.add_subcommand("compare", "Run several algorithms on one dataset");
  compare->add_option("input", cmp_input, "Input CSV")->required()->check(CLI::ExistingFile);
  compare->add_option("--algorithms", cmp_algorithms, "Comma-separated algorithm list");
  compare->add_option("-o,--output", cmp_out, "Output CSV (stdout when omitted)");
  compare->add_flag("--timing", cmp_timing, "Add a wall-clock seconds column");
  add_fit_flags(compare, cmp_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*fit) return cmd_fit(fit_flags, fit_input, fit_out);
    if (*eval) {
      if (eval_grid.empty() && eval_freqs.empty()) throw ValidationError("eval: give --freqs or --grid");
      return cmd_eval(eval_model, eval_freqs, eval_grid, eval_linear, eval_unit, eval_out);
    }
    if (*poles_cmd) return cmd_poles(poles_model, poles_normalized, poles_out);
    if (*export_cmd) return cmd_export(export_model, export_format, export_out);
    if (*compare) return cmd_compare(cmp_flags, cmp_algorithms, cmp_input, cmp_out, cmp_timing);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DegenerateDataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}
