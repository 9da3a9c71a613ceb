#include "pam/shadowing.hpp"

namespace pam {

namespace {

const char* kind_name(OrbitKind k) {
    switch (k) {
        case OrbitKind::periodic: return "periodic";
        case OrbitKind::asymptotic: return "asymptotic";
        default: return "plain";
    }
}

const Json& field(const Json& j, const char* name) {
    if (!j.is_object() || !j.contains(name)) throw InputError(std::string("missing field \"") + name + "\"");
    return j.at(name);
}

std::uint64_t unsigned_field(const Json& j, const char* name) {
    const Json& v = field(j, name);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        throw InputError(std::string("\"") + name + "\" must be a non-negative integer");
    return v.get<std::uint64_t>();
}

}  // namespace

Json orbit_to_json(const PseudoOrbit& po) {
    Json j{{"delta", rat_to_json(po.delta)}, {"points", rats_to_json(po.points)}, {"kind", kind_name(po.kind)}};
    if (po.kind == OrbitKind::periodic) j["N"] = po.period;
    if (po.kind == OrbitKind::asymptotic) {
        Json s = Json::array();
        for (const auto& lv : po.schedule) s.push_back({{"start", lv.start}, {"delta", rat_to_json(lv.delta)}});
        j["schedule"] = s;
    }
    return j;
}

PseudoOrbit orbit_from_json(const Json& j) {
    PseudoOrbit po;
    po.delta = rat_from_json(field(j, "delta"));
    po.points = rats_from_json(field(j, "points"));
    if (po.points.empty()) throw InputError("orbit has no points");
    for (const Rat& x : po.points)
        if (x < 0 || x > 1) throw DomainError("orbit point " + str(x) + " outside [0,1]");
    std::string kind = j.contains("kind") ? j.at("kind").get<std::string>() : "plain";
    if (kind == "periodic") {
        po.kind = OrbitKind::periodic;
        po.period = static_cast<unsigned>(unsigned_field(j, "N"));
    } else if (kind == "asymptotic") {
        po.kind = OrbitKind::asymptotic;
        for (const auto& lv : field(j, "schedule"))
            po.schedule.push_back({static_cast<std::size_t>(unsigned_field(lv, "start")), rat_from_json(field(lv, "delta"))});
    } else if (kind != "plain") {
        throw InputError("unknown orbit kind \"" + kind + "\"");
    }
    if (!(po.delta > 0)) throw DomainError("delta must be positive");
    return po;
}

Json kit_to_json(const ShadowingKit& kit) {
    return Json{{"map", map_to_json(kit.F)},
                {"partition", rats_to_json(kit.partition.points)},
                {"gamma", rat_to_json(kit.partition.gamma)},
                {"offset", rat_to_json(kit.partition.offset)},
                {"eps", rat_to_json(kit.eps)},
                {"delta", rat_to_json(kit.delta)},
                {"m", kit.m}};
}

ShadowingKit kit_from_json(const Json& j) {
    PAMap F = map_from_json(field(j, "map"));
    Partition p;
    p.points = rats_from_json(field(j, "partition"));
    if (p.points.size() < 2 || p.points.front() != 0 || p.points.back() != 1)
        throw InvariantError("partition must run from 0 to 1");
    for (std::size_t i = 1; i < p.points.size(); ++i)
        if (!(p.points[i - 1] < p.points[i])) throw InvariantError("partition not increasing at index " + std::to_string(i));
    p.gamma = rat_from_json(field(j, "gamma"));
    p.offset = rat_from_json(field(j, "offset"));
    ShadowingKit kit{std::move(F), std::move(p), rat_from_json(field(j, "eps")), rat_from_json(field(j, "delta")),
                     unsigned_field(j, "m")};
    return kit;
}

}  // namespace pam
