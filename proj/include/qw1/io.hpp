#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "qw1/bounds.hpp"

namespace qw1 {

using Json = nlohmann::json;

// Operator format: {"q": int, "sites": [[int,...],...], "re": [[...]], "im": [[...]]},
// row-major, first listed site most significant.
Json operator_to_json(const HermitianOperator& op);
HermitianOperator operator_from_json(const Json& j);

Json state_to_json(const DensityMatrix& rho);
DensityMatrix state_from_json(const Json& j);

// {"primal","dual","gap","iterations","converged","witness","decomposition"}
Json certificate_to_json(const TransportCertificate& cert);

// {"q": int, "sites": [...], "probs": [...]}
Json distribution_to_json(const ClassicalDistribution& mu);
ClassicalDistribution distribution_from_json(const Json& j);

// {"kind": "iid"|"markov", "q": int, "p": [...] | "P": [[...]], "pi": [...]}
Json process_to_json(const StationaryProcess& proc);
StationaryProcess process_from_json(const Json& j);

// {"d": int, "q": int, "terms": [{"sites": [[...],...], "op": operator-json}]}
Json interaction_to_json(const Interaction& phi);
Interaction interaction_from_json(const Json& j);

Json check_result_to_json(const CheckResult& r);

// parse helpers (throw ParseError with a diagnostic)
Json parse_json_text(const std::string& text, const std::string& what);
Json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

} // namespace qw1
