#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>

namespace pam {

using Rat = mpq_class;
using Int = mpz_class;

// Error families. The CLI maps InputError to exit code 2; everything that
// signals a violated mathematical property is reported as exit code 1.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InputError : Error {
    using Error::Error;
};
struct DomainError : InputError {
    using InputError::InputError;
};
struct InvariantError : InputError {
    using InputError::InputError;
};
struct PreconditionError : InputError {
    using InputError::InputError;
};
struct ContinuityError : InputError {
    using InputError::InputError;
};
struct WindowError : InputError {
    using InputError::InputError;
};
struct EquivalenceError : InputError {
    using InputError::InputError;
};
struct BoundaryError : InputError {
    using InputError::InputError;
};
// unsupported or ill-formed measure representation, atoms where none are allowed
struct MeasureError : InputError {
    using InputError::InputError;
};
struct FlatPieceError : Error {
    using Error::Error;
};
struct ResourceError : Error {
    using Error::Error;
};
// search failed, budget exhausted, chain broke, ...
struct ConstructionError : Error {
    using Error::Error;
};

Rat parse_rat(std::string_view s);
std::string str(const Rat& r);
Rat make_rat(long p, long q = 1);

inline Rat rabs(const Rat& r) { return r < 0 ? Rat(-r) : r; }
inline int sgn(const Rat& r) { return ::sgn(r); }
Int floor_int(const Rat& r);
Rat frac(const Rat& r);
double to_double(const Rat& r);

// Largest power of two (2^e, e any integer) that is <= x. Requires x > 0.
Rat pow2_at_most(const Rat& x);
Rat pow_rat(const Rat& b, unsigned long e);

}  // namespace pam
