#include "pam/catalog.hpp"

namespace pam {

namespace {

std::vector<Rat> rats(std::initializer_list<const char*> v) {
    std::vector<Rat> out;
    for (const char* s : v) out.push_back(parse_rat(s));
    return out;
}

}  // namespace

PAMap transverse_base() {
    return PAMap(rats({"0", "1/200000", "25001/400000", "1/8", "25001/200000", "75001/400000", "115001/400000",
                       "155001/400000", "9/20", "11/20", "244999/400000", "284999/400000", "324999/400000",
                       "174999/200000", "7/8", "374999/400000", "199999/200000", "1"}),
                 rats({"55001/100000", "44999/100000", "1/5", "44999/100000", "55001/100000", "4/5", "1", "4/5",
                       "55001/100000", "44999/100000", "1/5", "0", "1/5", "44999/100000", "55001/100000", "4/5",
                       "55001/100000", "44999/100000"}));
}

std::vector<std::string> catalog_names() { return {"tent", "valley", "identity", "transverse-base"}; }

PAMap catalog_map(const std::string& name) {
    if (name == "tent") return PAMap::tent();
    if (name == "valley") return PAMap::valley();
    if (name == "identity") return PAMap::identity();
    if (name == "transverse-base") return transverse_base();
    throw InputError("unknown map name '" + name + "'");
}

}  // namespace pam
