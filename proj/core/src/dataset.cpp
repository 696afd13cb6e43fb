#include "stabaaa/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>

#include "stabaaa/errors.hpp"

namespace stabaaa {

FrequencyDataset FrequencyDataset::from_samples(std::vector<double> freqs, std::vector<cplx> values) {
  if (freqs.size() != values.size()) {
    throw ValidationError("dataset: " + std::to_string(freqs.size()) + " frequencies but " +
                          std::to_string(values.size()) + " values");
  }
  if (freqs.empty()) throw ValidationError("dataset: no samples");

  std::vector<std::size_t> order(freqs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return freqs[a] < freqs[b]; });

  std::vector<double> f(freqs.size());
  std::vector<cplx> h(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    f[i] = freqs[order[i]];
    h[i] = values[order[i]];
    if (!std::isfinite(f[i]) || !std::isfinite(h[i].real()) || !std::isfinite(h[i].imag())) {
      throw ValidationError("dataset: non-finite sample");
    }
    if (f[i] <= 0.0) throw ValidationError("dataset: frequency must be positive");
    if (i > 0 && f[i] == f[i - 1]) throw ValidationError("dataset: duplicate frequency");
  }
  return FrequencyDataset(std::move(f), std::move(h));
}

NormalizedDataset normalize(const FrequencyDataset& ds) {
  NormalizationRecord rec{0.0, 0.0};
  for (double l : ds.freqs()) rec.f_max = std::max(rec.f_max, std::abs(l / (2.0 * std::numbers::pi)));
  for (const cplx& h : ds.values()) rec.h_max = std::max(rec.h_max, std::abs(h));
  if (rec.h_max == 0.0) throw DegenerateDataError("normalize: all responses are zero");

  std::vector<double> f(ds.freqs());
  std::vector<cplx> h(ds.values());
  for (double& l : f) l /= rec.f_max;
  for (cplx& v : h) v /= rec.h_max;
  return {FrequencyDataset::from_samples(std::move(f), std::move(h)), rec};
}

FrequencyDataset denormalize(const FrequencyDataset& ds, const NormalizationRecord& rec) {
  std::vector<double> f(ds.freqs());
  std::vector<cplx> h(ds.values());
  for (double& l : f) l *= rec.f_max;
  for (cplx& v : h) v *= rec.h_max;
  return FrequencyDataset::from_samples(std::move(f), std::move(h));
}

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

double parse_field(std::string_view field, std::size_t line, const char* name) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(line, std::string("cannot parse ") + name + " value '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

FrequencyDataset load_dataset(std::istream& in, FrequencyUnit unit) {
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  std::vector<double> freqs;
  std::vector<cplx> values;

  while (std::getline(in, line)) {
    ++lineno;
    std::string_view row = trim(line);
    if (row.empty()) continue;
    if (!header_seen) {
      std::string lowered;
      for (char c : row) {
        if (c != ' ' && c != '\t') lowered += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
      if (lowered != "freq,re,im") throw ParseError(lineno, "expected header 'freq,re,im'");
      header_seen = true;
      continue;
    }
    const auto c1 = row.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : row.find(',', c1 + 1);
    if (c2 == std::string_view::npos || row.find(',', c2 + 1) != std::string_view::npos) {
      throw ParseError(lineno, "expected 3 comma-separated fields");
    }
    double f = parse_field(row.substr(0, c1), lineno, "freq");
    const double re = parse_field(row.substr(c1 + 1, c2 - c1 - 1), lineno, "re");
    const double im = parse_field(row.substr(c2 + 1), lineno, "im");
    if (unit == FrequencyUnit::kHertz) f *= 2.0 * std::numbers::pi;
    freqs.push_back(f);
    values.emplace_back(re, im);
  }
  if (!header_seen) throw ParseError(lineno + 1, "empty input, expected header 'freq,re,im'");
  return FrequencyDataset::from_samples(std::move(freqs), std::move(values));
}

FrequencyDataset load_dataset(const std::filesystem::path& path, FrequencyUnit unit) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return load_dataset(in, unit);
}

void write_dataset(std::ostream& out, const FrequencyDataset& ds, FrequencyUnit unit) {
  const auto old_precision = out.precision(17);
  out << "freq,re,im\n";
  for (std::size_t v = 0; v < ds.size(); ++v) {
    double f = ds.freqs()[v];
    if (unit == FrequencyUnit::kHertz) f /= 2.0 * std::numbers::pi;
    out << f << ',' << ds.values()[v].real() << ',' << ds.values()[v].imag() << '\n';
  }
  out.precision(old_precision);
}

ErrorReport error_metrics(const std::vector<cplx>& model_values, const FrequencyDataset& ds) {
  if (model_values.size() != ds.size()) throw ValidationError("error_metrics: size mismatch");
  ErrorReport rep;
  double sum_sq = 0.0;
  for (std::size_t v = 0; v < ds.size(); ++v) {
    const double e = std::abs(model_values[v] - ds.values()[v]);
    sum_sq += e * e;
    if (e > rep.e_inf) {
      rep.e_inf = e;
      rep.argmax_index = v;
    }
  }
  rep.e_2 = std::max(std::sqrt(sum_sq), rep.e_inf);
  rep.e_rms = rep.e_2 / std::sqrt(static_cast<double>(ds.size()));
  return rep;
}

ErrorReport error_metrics(const TransferFunction& model_eval, const FrequencyDataset& ds) {
  std::vector<cplx> vals(ds.size());
  for (std::size_t v = 0; v < ds.size(); ++v) vals[v] = model_eval(cplx(0.0, ds.freqs()[v]));
  return error_metrics(vals, ds);
}

}  // namespace stabaaa
