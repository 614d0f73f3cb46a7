#pragma once

#include <json.hpp>

#include "conelab/opsys.hpp"
#include "conelab/polycone.hpp"
#include "conelab/selfdual.hpp"
#include "conelab/tpfactory.hpp"

namespace conelab {

using Json = nlohmann::json;

/// Dimension guard for inputs, from CONELAB_MAX_DIM (default 16).
std::size_t max_dim_guard();

// rationals travel as strings "p/q" (or "p" when q = 1)
Json rat_to_json(const Rat& r);
Rat rat_from_json(const Json& j);

Json vec_to_json(const RatVec& v);
RatVec vec_from_json(const Json& j);

/// {"dim": n, "generators": [[..], ..], "facets": [[..], ..]};
/// either representation key may be absent.
Json cone_to_json(const PolyCone& c);
PolyCone cone_from_json(const Json& j);

// complex entries as [re, im]
Json herm_to_json(const HermMat& M);
HermMat herm_from_json(const Json& j);

Json element_to_json(const SystemElement& x);
SystemElement element_from_json(const Json& j);

/// realized: {"space_dim": d, "k": k, "matrices": [..]}
/// generated: {"space_dim": d, "generators": [{"level": n, "coeffs": [..]}]}
Json system_to_json(const OperatorSystem& s);
OperatorSystem system_from_json(const Json& j);

Json trace_to_json(const ExtensionTrace& t);

/// {"stem": "simplex"|"operator", "entries": [{"D":…, "E":…, "level": n,
///  "x": …}], "clamp_max": bool}
Json product_to_json(const ConstructedProduct& p);
ConstructedProduct product_from_json(const Json& j);

}  // namespace conelab
