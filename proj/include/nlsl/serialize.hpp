#pragma once

#include <json.hpp>

#include "nlsl/inversion.hpp"
#include "nlsl/scenarios.hpp"
#include "nlsl/spectrum.hpp"

namespace nlsl {

using Json = nlohmann::ordered_json;

/// [re, im]
Json to_json(cplx z);
Json to_json(const SearchBox& b);
Json to_json(const Potential& q);
Json to_json(const LinearForm& f);
Json to_json(const SeparationReport& s);
/// Eigenvalues as [re, im, multiplicity].
Json to_json(const Spectrum& s);
/// Readable back with parse_target.
Json to_json(const InverseTarget& t);
Json to_json(const ReconstructionResult& r);
Json to_json(const CounterexampleReport& r);
Json to_json(const OverlapReport& r);

}  // namespace nlsl
