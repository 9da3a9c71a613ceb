#include "pam/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace pam {

Json rat_to_json(const Rat& r) { return str(r); }

Rat rat_from_json(const Json& j) {
    if (j.is_string()) return parse_rat(j.get<std::string>());
    if (j.is_number_integer()) return Rat(j.get<long>());
    throw InputError("expected a rational as \"p/q\" or an integer, got " + j.dump());
}

Json rats_to_json(const std::vector<Rat>& v) {
    Json a = Json::array();
    for (const Rat& r : v) a.push_back(rat_to_json(r));
    return a;
}

std::vector<Rat> rats_from_json(const Json& j) {
    if (!j.is_array()) throw InputError("expected an array of rationals");
    std::vector<Rat> out;
    out.reserve(j.size());
    for (const auto& e : j) out.push_back(rat_from_json(e));
    return out;
}

Json map_to_json(const PAMap& f) { return Json{{"breakpoints", rats_to_json(f.xs())}, {"values", rats_to_json(f.ys())}}; }

PAMap map_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("breakpoints") || !j.contains("values"))
        throw InputError("map JSON needs \"breakpoints\" and \"values\"");
    auto xs = rats_from_json(j.at("breakpoints"));
    auto ys = rats_from_json(j.at("values"));
    if (xs.size() != ys.size()) throw InvariantError("breakpoints and values differ in length");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i - 1] < xs[i])) throw InvariantError("breakpoints not strictly increasing at index " + std::to_string(i));
    if (!Pwl::is_canonical(xs, ys)) {
        for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
            Rat s0 = (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
            Rat s1 = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
            if (s0 == s1) throw InvariantError("non-canonical map: collinear node at " + str(xs[i]));
        }
        throw InvariantError("non-canonical map");
    }
    return PAMap(std::move(xs), std::move(ys));
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    // write beside the target, then rename, so readers never see a partial file
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw InputError("cannot write " + path);
        out << text;
        if (!out) throw InputError("write failed for " + path);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw InputError("cannot move " + tmp + " to " + path + ": " + ec.message());
}

PAMap load_map(const std::string& path) { return map_from_json(read_json_file(path)); }

void save_map(const std::string& path, const PAMap& f) { write_text_file(path, map_to_json(f).dump(2) + "\n"); }

}  // namespace pam
