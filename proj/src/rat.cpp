#include "pam/rat.hpp"

#include <cctype>

namespace pam {

namespace {

bool valid_int(std::string_view s) {
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

}  // namespace

Rat parse_rat(std::string_view s) {
    auto slash = s.find('/');
    std::string_view num = s.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? std::string_view("1") : s.substr(slash + 1);
    if (!valid_int(num) || !valid_int(den) || den[0] == '-' || den[0] == '+')
        throw InputError("not a rational: '" + std::string(s) + "'");
    std::string n(num);
    if (n[0] == '+') n.erase(0, 1);
    Int p(n, 10), q(std::string(den), 10);
    if (q == 0) throw InputError("zero denominator: '" + std::string(s) + "'");
    Rat r(p, q);
    r.canonicalize();
    return r;
}

std::string str(const Rat& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

Rat make_rat(long p, long q) {
    Rat r(p, q);
    r.canonicalize();
    return r;
}

Int floor_int(const Rat& r) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return q;
}

Rat frac(const Rat& r) { return r - Rat(floor_int(r)); }

double to_double(const Rat& r) { return r.get_d(); }

Rat pow2_at_most(const Rat& x) {
    if (x <= 0) throw DomainError("pow2_at_most: non-positive argument");
    Rat p(1);
    while (p > x) p /= 2;
    while (p * 2 <= x) p *= 2;
    return p;
}

Rat pow_rat(const Rat& b, unsigned long e) {
    Rat r(1);
    for (unsigned long i = 0; i < e; ++i) r *= b;
    return r;
}

}  // namespace pam
