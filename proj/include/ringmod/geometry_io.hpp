#pragma once

// JSON input layer for the command-line tool and tests. A continuum is
//   {"continuum": [primitive...], "contains_infinity": bool}
// with primitives tagged by "type":
//   {"type": "ball", "center": [..], "radius": r, "complement": bool?}
//   {"type": "segment", "a": [..], "b": [..]}
//   {"type": "ray", "origin": [..], "direction": [..]}
//   {"type": "polyline", "vertices": [[..], ..]}
// A ring file pairs two of them as {"C0": {..}, "C1": {..}}; a semiring file
// is tagged by "kind" (canonical | halfspace | image_samples); a point-set
// file is {"points": [[..], ..], "contains_infinity": bool}. Parse errors
// surface as domain_error with the offending field named, so the CLI can
// report them like any other bad input.

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ringmod/errors.hpp"
#include "ringmod/geometry.hpp"

namespace ringmod {

namespace detail {

inline const nlohmann::json& json_field(const nlohmann::json& j, const char* key,
                                        const char* what) {
    if (!j.is_object() || !j.contains(key))
        throw domain_error(std::string(what) + ": missing field \"" + key + "\"");
    return j.at(key);
}

inline double json_number(const nlohmann::json& j, const char* what) {
    if (!j.is_number())
        throw domain_error(std::string(what) + ": expected a number, got " + j.dump());
    return j.get<double>();
}

inline bool json_bool(const nlohmann::json& j, const char* what) {
    if (!j.is_boolean())
        throw domain_error(std::string(what) + ": expected a boolean, got " + j.dump());
    return j.get<bool>();
}

inline Vec json_point(const nlohmann::json& j, const char* what) {
    if (!j.is_array() || j.empty())
        throw domain_error(std::string(what) + ": expected a coordinate array, got " + j.dump());
    Vec v;
    v.reserve(j.size());
    for (const auto& c : j) v.push_back(json_number(c, what));
    return v;
}

inline std::vector<Vec> json_points(const nlohmann::json& j, const char* what) {
    if (!j.is_array())
        throw domain_error(std::string(what) + ": expected an array of points");
    std::vector<Vec> out;
    out.reserve(j.size());
    for (const auto& p : j) out.push_back(json_point(p, what));
    return out;
}

} // namespace detail

inline Primitive primitive_from_json(const nlohmann::json& j) {
    const auto& tag = detail::json_field(j, "type", "primitive");
    const std::string type = tag.is_string() ? tag.get<std::string>() : tag.dump();
    if (type == "ball") {
        Ball b;
        b.center = detail::json_point(detail::json_field(j, "center", "ball"), "ball center");
        b.radius = detail::json_number(detail::json_field(j, "radius", "ball"), "ball radius");
        if (j.contains("complement"))
            b.complement = detail::json_bool(j.at("complement"), "ball complement");
        return b;
    }
    if (type == "segment")
        return Segment{detail::json_point(detail::json_field(j, "a", "segment"), "segment a"),
                       detail::json_point(detail::json_field(j, "b", "segment"), "segment b")};
    if (type == "ray")
        return Ray{detail::json_point(detail::json_field(j, "origin", "ray"), "ray origin"),
                   detail::json_point(detail::json_field(j, "direction", "ray"),
                                      "ray direction")};
    if (type == "polyline")
        return Polyline{detail::json_points(detail::json_field(j, "vertices", "polyline"),
                                            "polyline vertices")};
    throw domain_error("primitive: unknown type \"" + type + "\"");
}

inline Continuum continuum_from_json(const nlohmann::json& j) {
    const auto& prims = detail::json_field(j, "continuum", "continuum");
    if (!prims.is_array() || prims.empty())
        throw domain_error("continuum: \"continuum\" must be a non-empty primitive array");
    std::vector<Primitive> parsed;
    parsed.reserve(prims.size());
    for (const auto& p : prims) parsed.push_back(primitive_from_json(p));
    const bool infinity = detail::json_bool(
        detail::json_field(j, "contains_infinity", "continuum"), "contains_infinity");
    return Continuum(std::move(parsed), infinity);
}

inline RingGeometry ring_from_json(const nlohmann::json& j) {
    return RingGeometry(continuum_from_json(detail::json_field(j, "C0", "ring")),
                        continuum_from_json(detail::json_field(j, "C1", "ring")));
}

inline Semiring semiring_from_json(const nlohmann::json& j) {
    const auto& tag = detail::json_field(j, "kind", "semiring");
    const std::string kind = tag.is_string() ? tag.get<std::string>() : tag.dump();
    if (kind == "canonical")
        return Semiring::canonical(
            detail::json_point(detail::json_field(j, "xi", "semiring"), "semiring xi"),
            detail::json_number(detail::json_field(j, "r0", "semiring"), "semiring r0"),
            detail::json_number(detail::json_field(j, "r1", "semiring"), "semiring r1"));
    if (kind == "halfspace") {
        const double n = detail::json_number(detail::json_field(j, "n", "semiring"),
                                             "semiring n");
        if (n != static_cast<int>(n))
            throw domain_error("semiring: dimension must be an integer");
        return Semiring::halfspace(
            Dimension(static_cast<int>(n)),
            detail::json_number(detail::json_field(j, "ratio", "semiring"), "semiring ratio"));
    }
    if (kind == "image_samples")
        return Semiring::from_samples(
            detail::json_points(detail::json_field(j, "plate0", "semiring"), "plate0"),
            detail::json_points(detail::json_field(j, "plate1", "semiring"), "plate1"));
    throw domain_error("semiring: unknown kind \"" + kind + "\"");
}

struct PointSet {
    std::vector<Vec> points;
    bool contains_infinity = false;
};

inline PointSet points_from_json(const nlohmann::json& j) {
    PointSet ps;
    ps.points = detail::json_points(detail::json_field(j, "points", "point set"), "points");
    if (ps.points.empty()) throw domain_error("point set: needs at least one point");
    ps.contains_infinity = detail::json_bool(
        detail::json_field(j, "contains_infinity", "point set"), "contains_infinity");
    return ps;
}

// Reads and parses a JSON file, folding I/O and syntax problems into the
// library's own input-error type.
inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw domain_error("cannot open \"" + path + "\"");
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw domain_error("\"" + path + "\" is not valid JSON");
    return j;
}

} // namespace ringmod
