#pragma once

#include "tdl/bounds.hpp"
#include "tdl/covariance.hpp"
#include "tdl/montecarlo.hpp"
#include "tdl/pdp.hpp"
#include "tdl/pilots.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <string_view>

namespace tdl::io {

/// Formats with 12 significant digits ("%.12g"); NaN prints as "nan".
std::string fmt12(double value);

/// Parses {"kind": ..., "tau_ds": ..., "tau_m": ...} or a bare kind name.
/// `default_tau_m` applies to the truncated exponential when the text does
/// not set tau_m (<= 0 means 6 tau_ds). Throws UsageError.
PdpSpec parse_pdp(std::string_view text, double default_tau_m = 0.0);
PdpSpec pdp_from_json(const nlohmann::json& j, double default_tau_m = 0.0);
nlohmann::json to_json(const PdpSpec& spec);

/// One "re,im" pair per line; '#' lines and blank lines are skipped.
PilotSequence read_pilot_csv(std::istream& in, std::int64_t first_index, double px, double fs);
PilotSequence read_pilot_file(const std::string& path, std::int64_t first_index, double px,
                              double fs);
void write_pilot_csv(std::ostream& out, const PilotSequence& x);

/// Row-major "l,p,re,im" lines.
void write_covariance_csv(std::ostream& out, const TapCovariance& cov);
nlohmann::json to_json(const TapCovariance& cov);

/// Header "snr_db,beta,bcrb,bcrb_wideband".
void write_bound_curve_csv(std::ostream& out, const BoundCurve& curve);
nlohmann::json to_json(const BoundCurve& curve);

} // namespace tdl::io
