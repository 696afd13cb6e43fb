#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <vector>

namespace stabaaa {

using cplx = std::complex<double>;

enum class FrequencyUnit { kHertz, kRadPerSecond };

/// Frequency response samples H(j*lambda_v) on the positive imaginary axis.
///
/// Frequencies are angular (rad/s, or dimensionless after normalization),
/// strictly positive and strictly increasing.
class FrequencyDataset {
 public:
  /// Sorts the samples by frequency. Throws ValidationError on size mismatch,
  /// an empty input, non-finite entries, non-positive or duplicate frequencies.
  static FrequencyDataset from_samples(std::vector<double> freqs, std::vector<cplx> values);

  const std::vector<double>& freqs() const { return freqs_; }
  const std::vector<cplx>& values() const { return values_; }
  std::size_t size() const { return freqs_.size(); }

 private:
  FrequencyDataset(std::vector<double> f, std::vector<cplx> h)
      : freqs_(std::move(f)), values_(std::move(h)) {}

  std::vector<double> freqs_;
  std::vector<cplx> values_;
};

struct NormalizationRecord {
  double f_max = 1.0;  // Hz
  double h_max = 1.0;
};

struct NormalizedDataset {
  FrequencyDataset data;
  NormalizationRecord record;
};

/// lambda <- lambda / f_max, h <- h / h_max with f_max = max |lambda / 2pi|
/// and h_max = max |h|. Throws DegenerateDataError when every h is zero.
NormalizedDataset normalize(const FrequencyDataset& ds);

/// Inverse of normalize().
FrequencyDataset denormalize(const FrequencyDataset& ds, const NormalizationRecord& rec);

/// Reads a `freq,re,im` CSV. Frequencies are converted to rad/s.
FrequencyDataset load_dataset(std::istream& in, FrequencyUnit unit);
FrequencyDataset load_dataset(const std::filesystem::path& path, FrequencyUnit unit);

/// Writes a `freq,re,im` CSV with 17 significant digits.
void write_dataset(std::ostream& out, const FrequencyDataset& ds, FrequencyUnit unit);

struct ErrorReport {
  double e_inf = 0.0;
  double e_2 = 0.0;
  double e_rms = 0.0;
  std::size_t argmax_index = 0;
};

using TransferFunction = std::function<cplx(cplx)>;

ErrorReport error_metrics(const TransferFunction& model_eval, const FrequencyDataset& ds);

/// Same metrics from precomputed model responses, one per sample.
ErrorReport error_metrics(const std::vector<cplx>& model_values, const FrequencyDataset& ds);

}  // namespace stabaaa
