#include "stabaaa/io.hpp"

#include <cmath>
#include <fstream>

#include "stabaaa/errors.hpp"

namespace stabaaa {

namespace {

ordered_json pair(const cplx& z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json pairs(const std::vector<cplx>& v) {
  ordered_json a = ordered_json::array();
  for (const cplx& z : v) a.push_back(pair(z));
  return a;
}

// JSON has no infinity; non-finite numbers are written as null.
ordered_json number(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

ordered_json entry(const cplx& z, bool real) { return real ? ordered_json(z.real()) : pair(z); }

template <typename Derived>
ordered_json matrix(const Eigen::MatrixBase<Derived>& M, bool real) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(entry(M(i, j), real));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename Derived>
ordered_json vector(const Eigen::MatrixBase<Derived>& v, bool real) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(entry(v(i), real));
  return a;
}

[[noreturn]] void fail(const std::string& what) { throw ValidationError("model JSON: " + what); }

cplx read_entry(const ordered_json& e, bool real, const char* field) {
  if (real) {
    if (!e.is_number()) fail(std::string("'") + field + "' entries must be numbers");
    return {e.get<double>(), 0.0};
  }
  if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
    fail(std::string("'") + field + "' entries must be [re, im]");
  }
  return {e[0].get<double>(), e[1].get<double>()};
}

std::vector<cplx> read_pairs(const ordered_json& j, const char* field) {
  if (!j.is_array()) fail(std::string("'") + field + "' must be an array");
  std::vector<cplx> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(read_entry(e, false, field));
  return out;
}

Eigen::MatrixXcd read_matrix(const ordered_json& j, Eigen::Index rows, Eigen::Index cols, bool real,
                             const char* field) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) fail(std::string("'") + field + "' has wrong shape");
  Eigen::MatrixXcd M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) fail(std::string("'") + field + "' has wrong shape");
    for (Eigen::Index c = 0; c < cols; ++c) M(i, c) = read_entry(row[static_cast<std::size_t>(c)], real, field);
  }
  return M;
}

Eigen::VectorXcd read_vector(const ordered_json& j, Eigen::Index n, bool real, const char* field) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n) fail(std::string("'") + field + "' has wrong length");
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = read_entry(j[static_cast<std::size_t>(i)], real, field);
  return v;
}

void put_realization(ordered_json& j, const DescriptorRealization& r) {
  const bool real = r.kind == FieldKind::kReal;
  j["field"] = real ? "real" : "complex";
  j["n"] = r.size();
  j["E"] = matrix(r.E, real);
  j["A"] = matrix(r.A, real);
  j["B"] = vector(r.B, real);
  j["C"] = vector(r.C.transpose(), real);
}

DescriptorRealization read_realization(const ordered_json& j) {
  const std::string field = j.at("field").get<std::string>();
  if (field != "real" && field != "complex") fail("'field' must be \"real\" or \"complex\"");
  const bool real = field == "real";
  const auto n = j.at("n").get<Eigen::Index>();
  if (n < 1) fail("'n' must be positive");
  DescriptorRealization r;
  r.kind = real ? FieldKind::kReal : FieldKind::kComplex;
  r.E = read_matrix(j.at("E"), n, n, real, "E");
  r.A = read_matrix(j.at("A"), n, n, real, "A");
  r.B = read_vector(j.at("B"), n, real, "B");
  r.C = read_vector(j.at("C"), n, real, "C").transpose();
  return r;
}

}  // namespace

cplx StoredModel::response(double omega) const {
  return model(cplx(0.0, omega / normalization.f_max)) * normalization.h_max;
}

PoleSet StoredModel::physical_pole_residue() const {
  PoleSet ps = pole_residue_form(model);
  for (cplx& p : ps.finite_poles) p *= normalization.f_max;
  for (cplx& r : ps.residues) r *= normalization.f_max * normalization.h_max;
  ps.feedthrough *= normalization.h_max;
  return ps;
}

ordered_json model_to_json(const FittedModel& m, const NormalizationRecord& rec) {
  ordered_json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = to_string(m.kind());
  j["normalization"] = {{"f_max", rec.f_max}, {"h_max", rec.h_max}};
  switch (m.kind()) {
    case ModelKind::kBarycentric: {
      const BarycentricModel& b = m.barycentric();
      j["k"] = b.order();
      j["support"] = b.support();
      j["values"] = pairs(b.values());
      j["weights"] = pairs(b.weights());
      if (b.order() == 0) j["constant"] = b.constant_term();
      break;
    }
    case ModelKind::kPoleResidue: {
      const PoleSet& ps = m.pole_residue();
      j["poles"] = pairs(ps.finite_poles);
      j["residues"] = pairs(ps.residues);
      j["feedthrough"] = ps.feedthrough;
      break;
    }
    case ModelKind::kDescriptor:
      put_realization(j, m.descriptor());
      break;
  }
  return j;
}

StoredModel model_from_json(const ordered_json& j) {
  try {
    if (!j.is_object()) fail("expected an object");
    if (!j.contains("schema") || j["schema"] != kSchemaVersion) fail("unsupported schema version");
    StoredModel sm;
    const auto& n = j.at("normalization");
    sm.normalization.f_max = n.at("f_max").get<double>();
    sm.normalization.h_max = n.at("h_max").get<double>();
    if (!(sm.normalization.f_max > 0.0) || !(sm.normalization.h_max > 0.0)) {
      fail("normalization factors must be positive");
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "barycentric") {
      const auto k = j.at("k").get<std::size_t>();
      auto support = j.at("support").get<std::vector<double>>();
      auto values = read_pairs(j.at("values"), "values");
      auto weights = read_pairs(j.at("weights"), "weights");
      if (support.size() != k || values.size() != k || weights.size() != k) fail("k does not match array lengths");
      sm.model = FittedModel(k == 0 ? BarycentricModel::constant(j.value("constant", 0.0))
                                    : BarycentricModel(std::move(support), std::move(values), std::move(weights)));
    } else if (kind == "pole_residue") {
      PoleSet ps;
      ps.finite_poles = read_pairs(j.at("poles"), "poles");
      ps.residues = read_pairs(j.at("residues"), "residues");
      ps.feedthrough = j.at("feedthrough").get<double>();
      if (ps.residues.size() != ps.finite_poles.size()) fail("poles and residues differ in length");
      sm.model = FittedModel(std::move(ps));
    } else if (kind == "descriptor") {
      sm.model = FittedModel(read_realization(j));
    } else {
      fail("unknown kind '" + kind + "'");
    }
    return sm;
  } catch (const nlohmann::json::exception& e) {
    fail(e.what());
  }
}

ordered_json fit_result_to_json(const FitResult& r, const NormalizationRecord& rec) {
  ordered_json j = model_to_json(r.model, rec);
  j["fit"] = {{"algorithm", to_string(r.algorithm)},
              {"order", r.model.order()},
              {"stable", r.stability.stable},
              {"met_tolerance", r.met_tolerance},
              {"rounds", r.rounds},
              {"sdp_calls", r.sdp_calls},
              {"final_eps", r.final_eps}};
  return j;
}

ordered_json realization_to_json(const DescriptorRealization& r) {
  ordered_json j;
  j["schema"] = kSchemaVersion;
  put_realization(j, r);
  return j;
}

ordered_json pole_residue_to_json(const PoleSet& ps) {
  ordered_json j;
  j["schema"] = kSchemaVersion;
  j["poles"] = pairs(ps.finite_poles);
  j["residues"] = pairs(ps.residues);
  j["feedthrough"] = ps.feedthrough;
  j["infinite_count"] = ps.infinite_count;
  return j;
}

ordered_json stability_to_json(const ModelStability& st) {
  ordered_json j;
  j["schema"] = kSchemaVersion;
  j["stable"] = st.stable;
  j["margin"] = number(st.margin);
  j["poles"] = pairs(st.poles);
  j["unstable_count"] = st.unstable_count;
  j["infinite_count"] = st.infinite_count;
  if (st.barycentric) {
    j["cb"] = st.barycentric->cb_sign;
    j["characterization"] = st.barycentric->characterization == Characterization::kExact ? "exact" : "sufficient";
  }
  return j;
}

ordered_json metrics_to_json(const ErrorReport& e) {
  ordered_json j;
  j["schema"] = kSchemaVersion;
  j["e_inf"] = e.e_inf;
  j["e_2"] = e.e_2;
  j["e_rms"] = e.e_rms;
  j["argmax_index"] = e.argmax_index;
  return j;
}

void write_json(const std::filesystem::path& path, const ordered_json& j) {
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot open '" + path.string() + "' for writing");
  f << j.dump(2) << '\n';
}

ordered_json read_json(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open '" + path.string() + "'");
  try {
    return ordered_json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("'" + path.string() + "': " + e.what());
  }
}

}  // namespace stabaaa
