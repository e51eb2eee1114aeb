#pragma once

#include <nlohmann/json.hpp>

#include "qfi/engine.hpp"
#include "qfi/optimizer.hpp"
#include "qfi/oracle.hpp"
#include "qfi/pulse.hpp"

namespace qfi {

// {"family": ..., "params": {...}, "alpha_sq": x, "carrier_detuning": d}
// or {"basis": {...}, "coeffs": [[re, im], ...], "alpha_sq": x, ...}
nlohmann::json pulse_to_json(const PulseSpec& spec);
PulseSpec pulse_from_json(const nlohmann::json& j);

nlohmann::json basis_to_json(const BasisSpec& basis);
BasisSpec basis_from_json(const nlohmann::json& j);

nlohmann::json breakdown_to_json(const QfiBreakdown& b, double gamma);
nlohmann::json fd_estimate_to_json(const FdEstimate& e);
nlohmann::json opt_result_to_json(const OptResult& r);

} // namespace qfi
