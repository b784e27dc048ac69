#include "resokit/serialize.hpp"

#include "resokit/error.hpp"

#include <fmt/format.h>

namespace resokit {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorKind::SchemaError, fmt::format("missing key '{}'", key));
  }
  return j.at(key);
}

double number(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_number()) {
    throw Error(ErrorKind::SchemaError, fmt::format("key '{}' must be a number", key));
  }
  return v.get<double>();
}

std::optional<double> optional_number(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return number(j, key);
}

void check_version(const json& j) {
  const json& v = require(j, "schema_version");
  if (!v.is_number_integer() || v.get<int>() != kSchemaVersion) {
    throw Error(ErrorKind::SchemaError,
                fmt::format("unsupported schema_version {} (expected {})", v.dump(),
                            kSchemaVersion));
  }
}

json band_json(const FrequencyBand& b) { return json::array({b.lo, b.hi}); }

FrequencyBand band_from(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw Error(ErrorKind::SchemaError, fmt::format("key '{}' must be [lo, hi]", key));
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

json params_to_json(const MbvdParams& p) {
  return json{{"r_s_ohm", p.r_s}, {"r_0_ohm", p.r_0}, {"r_m_ohm", p.r_m},
              {"l_m_h", p.l_m},   {"c_m_f", p.c_m},   {"c_0_f", p.c_0}};
}

MbvdParams params_from_json(const json& j) {
  if (j.is_object() && j.contains("schema_version")) check_version(j);
  MbvdParams p;
  p.r_s = number(j, "r_s_ohm");
  p.r_0 = number(j, "r_0_ohm");
  p.r_m = number(j, "r_m_ohm");
  p.l_m = number(j, "l_m_h");
  p.c_m = number(j, "c_m_f");
  p.c_0 = number(j, "c_0_f");
  try {
    validate(p);
  } catch (const Error& e) {
    throw Error(ErrorKind::SchemaError, e.what());
  }
  return p;
}

json fit_result_to_json(const FitResult& r) {
  return json{{"schema_version", kSchemaVersion},
              {"params", params_to_json(r.params)},
              {"rms_residual_s", r.rms_residual},
              {"relative_residual", r.relative_residual},
              {"iterations", r.iterations},
              {"converged", r.converged},
              {"aligned_seed", r.aligned_seed},
              {"f_s_hz", derived_fs(r.params)},
              {"f_p_hz", derived_fp(r.params)},
              {"keff2_mbvd", model_keff2(r.params)},
              {"motional_q", motional_q(r.params)}};
}

FitResult fit_result_from_json(const json& j) {
  check_version(j);
  FitResult r;
  r.params = params_from_json(require(j, "params"));
  r.rms_residual = number(j, "rms_residual_s");
  r.relative_residual = number(j, "relative_residual");
  const json& it = require(j, "iterations");
  const json& conv = require(j, "converged");
  if (!it.is_number_integer() || !conv.is_boolean()) {
    throw Error(ErrorKind::SchemaError, "iterations must be an integer and converged a boolean");
  }
  r.iterations = it.get<int>();
  r.converged = conv.get<bool>();
  r.aligned_seed = j.value("aligned_seed", false);
  return r;
}

json report_to_json(const ExtractionReport& r) {
  json freq = json::array();
  json q = json::array();
  for (const auto& p : r.q_bode.points) {
    freq.push_back(p.frequency);
    q.push_back(p.q);
  }
  return json{
      {"schema_version", kSchemaVersion},
      {"device", r.device},
      {"lambda_m", r.lambda_m ? json(*r.lambda_m) : json(nullptr)},
      {"f_s_hz", r.f_s},
      {"f_p_hz", r.f_p},
      {"keff2", r.keff2},
      {"keff2_mbvd", r.keff2_mbvd ? json(*r.keff2_mbvd) : json(nullptr)},
      {"y_ratio", r.y_ratio},
      {"y_ratio_db", r.y_ratio_db},
      {"fit_band_hz", band_json(r.fit_band)},
      {"q_band_hz", band_json(r.q_band)},
      {"z0_input_ohm", r.z0_input},
      {"z0_star_ohm", r.z0_star},
      {"tuned_circle",
       {{"center_re", r.tuned_circle.center.real()},
        {"center_im", r.tuned_circle.center.imag()},
        {"radius", r.tuned_circle.radius},
        {"rms_residual", r.tuned_circle.rms_residual}}},
      {"q_max", r.q_max},
      {"fom", r.fom},
      {"q_bode", {{"frequency_hz", std::move(freq)}, {"q", std::move(q)}}},
      {"flagged_hz", r.q_bode.flagged},
  };
}

ExtractionReport report_from_json(const json& j) {
  check_version(j);
  ExtractionReport r;
  const json& dev = require(j, "device");
  if (!dev.is_string()) throw Error(ErrorKind::SchemaError, "key 'device' must be a string");
  r.device = dev.get<std::string>();
  r.lambda_m = optional_number(j, "lambda_m");
  r.f_s = number(j, "f_s_hz");
  r.f_p = number(j, "f_p_hz");
  r.keff2 = number(j, "keff2");
  r.keff2_mbvd = optional_number(j, "keff2_mbvd");
  r.y_ratio = number(j, "y_ratio");
  r.y_ratio_db = number(j, "y_ratio_db");
  r.fit_band = band_from(j, "fit_band_hz");
  r.q_band = band_from(j, "q_band_hz");
  r.z0_input = number(j, "z0_input_ohm");
  r.z0_star = number(j, "z0_star_ohm");
  const json& c = require(j, "tuned_circle");
  r.tuned_circle.center = {number(c, "center_re"), number(c, "center_im")};
  r.tuned_circle.radius = number(c, "radius");
  r.tuned_circle.rms_residual = number(c, "rms_residual");
  r.q_max = number(j, "q_max");
  r.fom = number(j, "fom");
  const json& qb = require(j, "q_bode");
  const json& fq = require(qb, "frequency_hz");
  const json& qq = require(qb, "q");
  if (!fq.is_array() || !qq.is_array() || fq.size() != qq.size()) {
    throw Error(ErrorKind::SchemaError, "q_bode arrays must be equal-length arrays");
  }
  for (std::size_t i = 0; i < fq.size(); ++i) {
    if (!fq[i].is_number() || !qq[i].is_number()) {
      throw Error(ErrorKind::SchemaError, "q_bode entries must be numbers");
    }
    r.q_bode.points.push_back({fq[i].get<double>(), qq[i].get<double>()});
  }
  if (j.contains("flagged_hz")) {
    for (const auto& v : j.at("flagged_hz")) {
      if (!v.is_number()) throw Error(ErrorKind::SchemaError, "flagged_hz must hold numbers");
      r.q_bode.flagged.push_back(v.get<double>());
    }
  }
  if (!(r.f_p > r.f_s && r.f_s > 0.0)) {
    throw Error(ErrorKind::SchemaError, "report violates f_p > f_s > 0");
  }
  return r;
}

json geometry_to_json(const DeviceGeometry& g) {
  return json{{"schema_version", kSchemaVersion},
              {"lambda_m", g.lambda},
              {"h_ln_m", g.h_ln},
              {"h_elec_m", g.h_elec},
              {"duty", g.duty},
              {"n_e", g.n_e},
              {"n_r", g.n_r},
              {"aperture_lambda", g.aperture}};
}

DeviceGeometry geometry_from_json(const json& j) {
  if (j.is_object() && j.contains("schema_version")) check_version(j);
  auto count = [&](const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer()) {
      throw Error(ErrorKind::SchemaError, fmt::format("key '{}' must be an integer", key));
    }
    return v.get<int>();
  };
  DeviceGeometry g;
  g.lambda = number(j, "lambda_m");
  g.h_ln = number(j, "h_ln_m");
  g.h_elec = number(j, "h_elec_m");
  g.duty = optional_number(j, "duty").value_or(g.duty);
  g.n_e = count("n_e", g.n_e);
  g.n_r = count("n_r", g.n_r);
  g.aperture = optional_number(j, "aperture_lambda").value_or(g.aperture);
  try {
    validate(g);
  } catch (const Error& e) {
    throw Error(ErrorKind::SchemaError, e.what());
  }
  return g;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::SchemaError, fmt::format("invalid JSON: {}", e.what()));
  }
}

}  // namespace resokit
