#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>

#include "stabaaa/barycentric.hpp"
#include "stabaaa/dataset.hpp"
#include "stabaaa/fit.hpp"

namespace stabaaa {

using ordered_json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

struct StoredModel {
  FittedModel model;
  NormalizationRecord normalization;

  /// Response at a physical angular frequency (rad/s), denormalized.
  cplx response(double omega) const;

  /// Pole-residue form in physical units: p f_max, r f_max h_max, d h_max.
  PoleSet physical_pole_residue() const;
};

/// Model document: schema, kind, normalization and the representation fields.
ordered_json model_to_json(const FittedModel& m, const NormalizationRecord& rec);
/// Throws ValidationError on schema mismatch or malformed content.
StoredModel model_from_json(const ordered_json& j);

/// Model document plus a "fit" object with the algorithm and outcome fields.
ordered_json fit_result_to_json(const FitResult& r, const NormalizationRecord& rec);

ordered_json realization_to_json(const DescriptorRealization& r);
ordered_json pole_residue_to_json(const PoleSet& ps);
ordered_json stability_to_json(const ModelStability& st);
ordered_json metrics_to_json(const ErrorReport& e);

void write_json(const std::filesystem::path& path, const ordered_json& j);
ordered_json read_json(const std::filesystem::path& path);

}  // namespace stabaaa
