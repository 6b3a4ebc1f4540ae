#include "spherint/measure_io.hpp"

#include <fstream>

#include "spherint/errors.hpp"

namespace spherint {

namespace {

double need_num(const nlohmann::json& p, const char* key) {
    if (!p.contains(key) || !p[key].is_number())
        throw DomainError(std::string("measure json: missing numeric param '") + key + "'");
    return p[key].get<double>();
}

double opt_num(const nlohmann::json& p, const char* key, double fallback) {
    if (!p.contains(key)) return fallback;
    if (!p[key].is_number())
        throw DomainError(std::string("measure json: param '") + key + "' must be numeric");
    return p[key].get<double>();
}

int need_int(const nlohmann::json& p, const char* key) {
    if (!p.contains(key) || !p[key].is_number_integer())
        throw DomainError(std::string("measure json: missing integer param '") + key + "'");
    return p[key].get<int>();
}

AtomicMeasure builtin_from_json(const std::string& name, const nlohmann::json& params) {
    if (name == "dirac")
        return AtomicMeasure::dirac(need_num(params, "x"));
    if (name == "bernoulli")
        return AtomicMeasure::bernoulli(need_num(params, "a"), need_num(params, "b"),
                                        opt_num(params, "p", 0.5));
    if (name == "uniform")
        return AtomicMeasure::uniform_grid(need_num(params, "a"), need_num(params, "b"),
                                           need_int(params, "n"));
    if (name == "semicircle")
        return AtomicMeasure::semicircle_grid(need_int(params, "n"));
    if (name == "trimmed_bernoulli")
        return AtomicMeasure::trimmed_bernoulli(opt_num(params, "s", 0.5),
                                                opt_num(params, "edge", 1.0));
    if (name == "trimmed_semicircle")
        return AtomicMeasure::trimmed_semicircle(need_int(params, "n"),
                                                 opt_num(params, "scale", 0.8));
    throw DomainError("measure json: unknown builtin '" + name + "'");
}

} // namespace

AtomicMeasure measure_from_json(const nlohmann::json& j) {
    if (!j.is_object())
        throw DomainError("measure json: top level must be an object");

    if (j.contains("builtin")) {
        if (!j["builtin"].is_string())
            throw DomainError("measure json: 'builtin' must be a string");
        const nlohmann::json params =
            j.contains("params") ? j["params"] : nlohmann::json::object();
        return builtin_from_json(j["builtin"].get<std::string>(), params);
    }

    if (!j.contains("atoms") || !j["atoms"].is_array() || j["atoms"].empty())
        throw DomainError("measure json: need non-empty 'atoms' array or 'builtin'");
    std::vector<double> xs, ws;
    xs.reserve(j["atoms"].size());
    ws.reserve(j["atoms"].size());
    for (const auto& a : j["atoms"]) {
        if (!a.is_object() || !a.contains("x") || !a.contains("w") ||
            !a["x"].is_number() || !a["w"].is_number())
            throw DomainError("measure json: each atom needs numeric 'x' and 'w'");
        xs.push_back(a["x"].get<double>());
        ws.push_back(a["w"].get<double>());
    }
    AtomicMeasure m = AtomicMeasure::from_atoms(xs, ws);
    if (j.contains("support")) {
        const auto& s = j["support"];
        if (!s.is_array() || s.size() != 2 || !s[0].is_number() || !s[1].is_number())
            throw DomainError("measure json: 'support' must be [lo, hi]");
        m = m.with_support(s[0].get<double>(), s[1].get<double>());
    }
    return m;
}

nlohmann::json measure_to_json(const AtomicMeasure& m) {
    nlohmann::json atoms = nlohmann::json::array();
    for (const Atom& a : m.atoms())
        atoms.push_back({{"x", a.x}, {"w", a.w}});
    nlohmann::json out{{"atoms", std::move(atoms)}};
    if (m.has_padded_support())
        out["support"] = {m.lambda_min(), m.lambda_max()};
    return out;
}

AtomicMeasure load_measure_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DomainError("cannot open measure file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError("measure file '" + path + "' is not valid json: " + e.what());
    }
    return measure_from_json(j);
}

} // namespace spherint
