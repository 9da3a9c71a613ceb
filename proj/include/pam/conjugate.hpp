#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pam/io.hpp"
#include "pam/map.hpp"
#include "pam/report.hpp"

namespace pam {

struct WeightedMeasure;

// Borel probability measure on [0,1] in one of a few exact forms.  Build with
// the factory functions; they validate the invariants.
struct MeasureRep {
    enum class Kind { lebesgue, pa_density, atomic, cantor, mixture, pushforward };
    Kind kind = Kind::lebesgue;

    std::optional<PAMap> cdf;                    // pa_density
    std::vector<std::pair<Rat, Rat>> atoms;      // atomic: (point, weight), sorted by point
    std::vector<std::vector<IntervalQ>> levels;  // cantor: nested levels, level 0 first
    std::vector<Rat> masses;                     // cantor: mass of each deepest interval (uniform inside)
    std::vector<WeightedMeasure> parts;          // mixture
    std::optional<PAMap> map;                    // pushforward: map_* base
    std::shared_ptr<const MeasureRep> base;      // pushforward

    static MeasureRep lebesgue();
    static MeasureRep pa_density(PAMap cdf);
    static MeasureRep atomic(std::vector<std::pair<Rat, Rat>> atoms);
    static MeasureRep cantor(std::vector<std::vector<IntervalQ>> levels, std::vector<Rat> masses);
    static MeasureRep mixture(std::vector<WeightedMeasure> parts);
    // image measure A -> base(f^{-1}(A)); base must be non-atomic
    static MeasureRep pushforward(PAMap f, MeasureRep base);

    bool has_atoms() const;
    bool is_atomic() const { return kind == Kind::atomic; }
    // true if some component is a finite-depth Cantor surrogate
    bool depth_limited() const;
};

struct WeightedMeasure {
    Rat weight;
    MeasureRep measure;
};

// Mass of the interval between a and b (clipped to [0,1]) with the given
// endpoint closedness.
Rat mass(const MeasureRep& mu, const Rat& a, const Rat& b, bool closed_lo = true, bool closed_hi = true);

// Points where the distribution function may fail to be affine.
std::vector<Rat> breakpoints(const MeasureRep& mu);

// t -> mu([0,t]) as a PA map; requires a non-atomic measure.
PAMap distribution(const MeasureRep& mu);

Json measure_to_json(const MeasureRep& mu);
MeasureRep measure_from_json(const Json& j);

// Uniform atoms on the orbit of x; x must satisfy f^k(x) = x.
MeasureRep co_measure(const PAMap& f, const Rat& x, unsigned k);

struct ProhorovEnclosure {
    Rat lo, hi;
    std::string family;  // candidate family used by the inner test
};

// sup over the candidate family of mu(A) - nu(B(A,eps)).
Rat prohorov_defect(const MeasureRep& mu, const MeasureRep& nu, const Rat& eps);
ProhorovEnclosure prohorov(const MeasureRep& mu, const MeasureRep& nu, const Rat& tol);

struct Homeo {
    PAMap forward = PAMap::identity();
    PAMap inverse = PAMap::identity();
    bool approximate = false;  // built from depth-limited surrogates
};

Homeo cdf_homeo(const MeasureRep& nu);
Homeo homeo_from_map(const PAMap& forward);
Json homeo_to_json(const Homeo& h);
Homeo homeo_from_json(const Json& j);

// h o f o h^{-1}
PAMap conjugate(const PAMap& f, const Homeo& h);
// f preserves nu, decided by conjugating with the distribution of nu
bool preserves(const PAMap& f, const MeasureRep& nu);

struct CantorSmoothing {
    MeasureRep nu;      // (1/k) sum of pushforwards of nu_hat by f^i
    MeasureRep nu_hat;  // depth-limited measure on the nested system around x
    std::vector<std::vector<IntervalQ>> system;  // levels, system[0] = {J}
    std::vector<IntervalQ> orbit_images;         // f^i(J), i < k
    std::vector<ClauseResult> certificate;
    bool approximate = true;

    bool ok() const { return all_ok(certificate); }
};

CantorSmoothing cantor_smooth(const PAMap& f, const Rat& x, unsigned k, const Rat& eps, unsigned depth);

struct DemoCarrier {
    unsigned k = 1;
    Rat x;
    Rat weight;                      // 2^-k after renormalization
    std::vector<IntervalQ> carrier;  // f^i(J_k)
};

struct DemoRow {
    Rat eps;
    Rat rho;                  // rho(g_eps, f)
    bool lebesgue = false;    // verify_lebesgue(g_eps)
    bool approximate = false;
    std::vector<Rat> carrier_mass;  // lambda(h(carrier_k)) = nu_eps(carrier_k)
    std::vector<Rat> lower_bound;   // eps * weight_k
    bool interval_identity = true;        // lambda(h(A)) = nu(A) on every carrier interval
};

struct DemoReport {
    std::vector<DemoCarrier> carriers;
    std::vector<DemoRow> rows;
    Rat truncated_tail;  // 2^-K dropped before renormalizing
    bool rho_monotone = true;
    std::vector<std::string> flags;
};

DemoReport full_measure_demo(const PAMap& f, unsigned K, const std::vector<Rat>& eps_schedule, unsigned depth,
                             const Rat& cantor_eps = Rat(1, 8));
Json demo_to_json(const DemoReport& r);

}  // namespace pam
