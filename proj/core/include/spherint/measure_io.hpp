#pragma once

#include <string>

#include <json.hpp>

#include "spherint/measure.hpp"

namespace spherint {

// JSON shape, either explicit atoms or a named builtin:
//   {"atoms": [{"x": -1.0, "w": 0.5}, ...], "support": [lo, hi]}   (support optional)
//   {"builtin": "semicircle", "params": {"n": 200}}
// Builtins: dirac{x}, bernoulli{a,b,p}, uniform{a,b,n}, semicircle{n},
//           trimmed_bernoulli{s,edge}, trimmed_semicircle{n,scale}.
AtomicMeasure measure_from_json(const nlohmann::json& j);
nlohmann::json measure_to_json(const AtomicMeasure& m);

AtomicMeasure load_measure_file(const std::string& path);

} // namespace spherint
