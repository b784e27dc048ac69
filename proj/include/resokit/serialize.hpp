#pragma once

// JSON forms of the file-level records. Readers throw Error{SchemaError} on
// missing or mistyped keys and on a schema_version other than 1.

#include "resokit/design.hpp"
#include "resokit/extract.hpp"
#include "resokit/fit.hpp"
#include "resokit/mbvd.hpp"

#include <json.hpp>

namespace resokit {

inline constexpr int kSchemaVersion = 1;

/// Flat object: r_s_ohm, r_0_ohm, r_m_ohm, l_m_h, c_m_f, c_0_f. The writer
/// leaves out schema_version so the object can be embedded; the reader
/// accepts it.
nlohmann::json params_to_json(const MbvdParams& p);
MbvdParams params_from_json(const nlohmann::json& j);

nlohmann::json fit_result_to_json(const FitResult& r);
FitResult fit_result_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const ExtractionReport& r);
ExtractionReport report_from_json(const nlohmann::json& j);

/// lambda_m, h_ln_m, h_elec_m, and optionally duty (0.5), n_e (2), n_r (0),
/// aperture_lambda (1).
nlohmann::json geometry_to_json(const DeviceGeometry& g);
DeviceGeometry geometry_from_json(const nlohmann::json& j);

/// Parses text, mapping syntax errors to SchemaError.
nlohmann::json parse_json(std::string_view text);

}  // namespace resokit
