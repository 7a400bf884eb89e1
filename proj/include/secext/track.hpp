#pragma once

#include "secext/algebra.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace secext::track {

using alg::AlgebraPtr;
using alg::FreeModule;
using alg::Mat;
using alg::ModuleMap;
using alg::ModulePtr;

// Two additive track instantiations share one vocabulary. Pair: objects are
// boundaries M1 -> M0 over a prime algebra, maps are commuting pairs, tracks
// are chain homotopies. Square: objects are free modules over a Z/p^2 lift
// algebra, maps are matrices over the lift, and a track f => f' is an exact
// lift h with p*h = f - f'. In both, vertical composition adds track data,
// so hom-groupoids are torsors over Aut(0) and the sigma-action is explicit.
enum class Kind { pair, square };

struct TrackInstance {
    Kind kind;
    AlgebraPtr algebra; // prime for pair, Z/p^2 for square
    AlgebraPtr reduced; // square: algebra mod p; pair: same as algebra

    int64_t p() const { return algebra->mod().p; }
};

TrackInstance pair_instance(AlgebraPtr prime_algebra);
TrackInstance square_instance(AlgebraPtr lift_algebra);

// ---------------------------------------------------------------- pair side

// A boundary map d: M1 -> M0 of degree 0. pi0 = coker d and pi1 = ker d are
// computed on demand. free0 names generators of M0 when the object is a
// b-object (M1 = 0, M0 free); resolutions rely on that bookkeeping.
struct PairObject {
    ModuleMap boundary;
    std::optional<FreeModule> free0;

    const ModulePtr& m1() const { return boundary.src(); }
    const ModulePtr& m0() const { return boundary.dst(); }
    int total_dim() const { return m1()->dim() + m0()->dim(); }
    bool is_b_object() const { return m1()->dim() == 0 && free0.has_value(); }
    bool same_as(const PairObject& o) const { return boundary == o.boundary; }

    alg::Quotient pi0() const;
    alg::Submodule pi1() const;
};

PairObject pair_object(ModuleMap boundary);
PairObject b_object(FreeModule f); // 0 -> F
PairObject zero_pair_object(AlgebraPtr a);

// Map of pair objects: components of one common internal degree with
// d_dst * f1 = f0 * d_src (validated at construction).
struct PairMap {
    PairObject src, dst;
    ModuleMap f1, f0;

    PairMap(PairObject s, PairObject d, ModuleMap f1_in, ModuleMap f0_in);
    int t() const { return f0.t(); }
    bool is_zero() const { return f1.is_zero() && f0.is_zero(); }
    bool is_identity() const;
    bool operator==(const PairMap& o) const { return f1 == o.f1 && f0 == o.f0; }
    PairMap operator*(const PairMap& g) const; // this after g
    PairMap operator+(const PairMap& g) const;
    PairMap operator-(const PairMap& g) const;
};

PairMap pair_identity(const PairObject& x);
PairMap pair_zero(const PairObject& x, const PairObject& y, int t = 0);

// Track src => dst between parallel maps, carried by phi: M0(src object) ->
// M1(dst object) with phi*d = f1 - f1' and d*phi = f0 - f0' (validated).
struct PairTrack {
    PairMap src, dst;
    ModuleMap phi;

    PairTrack(PairMap f, PairMap f2, ModuleMap datum);
};

// -------------------------------------------------------------- square side

// Free cover over the lift algebra plus an echelonized action-closed span of
// relation columns. rel empty <=> a free object (an object of the track
// instance proper); presented objects appear only as resolution targets.
struct SqObject {
    FreeModule cover;
    Mat rel;

    const ModulePtr& module() const { return cover.module; }
    bool is_free() const { return rel.cols() == 0; }
    bool same_as(const SqObject& o) const;
};

SqObject sq_object(FreeModule cover);
// closes the span under the algebra action and echelonizes
SqObject sq_presented(FreeModule cover, const Mat& relations);
SqObject zero_sq_object(AlgebraPtr lift);

// Track src => dst between parallel maps of free square objects: hat with
// p*hat = src - dst exactly. Self-tracks of f are p*Hom, so Aut(0) matches
// Hom over the reduced algebra.
struct SqTrack {
    ModuleMap src, dst, hat;

    SqTrack(ModuleMap f, ModuleMap f2, ModuleMap hat_in);
};

// ---------------------------------------------------------- groupoid calculus

PairTrack identity_track(const PairMap& f);
PairTrack vcomp(const PairTrack& b, const PairTrack& a); // b after a
PairTrack vinverse(const PairTrack& a);
PairTrack whisker_left(const PairMap& g, const PairTrack& a);
PairTrack whisker_right(const PairTrack& a, const PairMap& e);
// horizontal composite b * a via the left-then-right decomposition; the
// other decomposition agrees (interchange), which the verifier checks
PairTrack hcomp(const PairTrack& b, const PairTrack& a);

SqTrack identity_track(const ModuleMap& f);
SqTrack vcomp(const SqTrack& b, const SqTrack& a);
SqTrack vinverse(const SqTrack& a);
SqTrack whisker_left(const ModuleMap& g, const SqTrack& a);
SqTrack whisker_right(const SqTrack& a, const ModuleMap& e);
SqTrack hcomp(const SqTrack& b, const SqTrack& a);

// ------------------------------------------------------------- sigma and D

// D(X,Y) elements are kept in coordinate form. Pair: phi: M0 X -> M1 Y with
// phi*d = 0 and d*phi = 0, i.e. a map pi0 X -> pi1 Y read in ambient
// coordinates. Square: a map of reduced covers over the reduced algebra.

// bifunctor actions g.a and b.f
ModuleMap d_act_left(const PairMap& g, const ModuleMap& a);
ModuleMap d_act_right(const ModuleMap& b, const PairMap& f);
ModuleMap d_act_left(const ModuleMap& g, const ModuleMap& a);  // square: gbar * a
ModuleMap d_act_right(const ModuleMap& b, const ModuleMap& f); // square: b * fbar

// sigma_f: D(X,Y) -> Aut(f) and its inverse. Pair: the datum is the
// coordinate form itself (independent of f). Square: p times an entrywise
// lift of the reduced map; the inverse divides the datum by p.
PairTrack sigma(const PairMap& f, const ModuleMap& a);
ModuleMap sigma_inv(const PairTrack& self_track);
SqTrack sigma(const ModuleMap& f, const ModuleMap& abar);
ModuleMap sigma_inv(const SqTrack& self_track);

// Mutually inverse identifications D(X,Y) = Hom(pi0 X, pi1 Y) for the pair
// side: descend a coordinate-form element to the subquotient and back.
ModuleMap pair_d_descend(const PairObject& x, const PairObject& y, const ModuleMap& phi);
ModuleMap pair_d_lift(const PairObject& x, const PairObject& y, const ModuleMap& abar);

// --------------------------------------------------------------- biproducts

struct PairBiproduct {
    PairObject object;
    PairMap in1, in2, pr1, pr2;
};
PairBiproduct pair_biproduct(const PairObject& x, const PairObject& y);

struct SqBiproduct {
    SqObject object;
    ModuleMap in1, in2, pr1, pr2;
};
SqBiproduct sq_biproduct(const SqObject& x, const SqObject& y);

// -------------------------------------------------------------- enumeration

// Exhaustive hom-set and track-set enumeration in one internal degree, in a
// deterministic order. Throws std::invalid_argument past `cap` elements.
inline constexpr int64_t enumeration_cap = 1 << 16;

std::vector<PairMap> all_maps(const PairObject& x, const PairObject& y, int t = 0);
std::vector<PairTrack> all_tracks(const PairMap& f, const PairMap& f2);
std::vector<ModuleMap> all_d_elements(const PairObject& x, const PairObject& y, int t = 0);

std::vector<ModuleMap> all_maps(const SqObject& x, const SqObject& y, int t = 0);
std::vector<SqTrack> all_tracks(const ModuleMap& f, const ModuleMap& f2);
std::vector<ModuleMap> all_d_elements(const SqObject& x, const SqObject& y, int t = 0);

// Pair homotopy classes [X,Y] in degree t: the map space modulo the span of
// track-trivial maps (phi*d, d*phi), with coset representatives.
struct HomotopyClasses {
    int dim = 0;
    std::vector<PairMap> reps; // basis of a complement of the trivial span
};
HomotopyClasses pair_homotopy_classes(const PairObject& x, const PairObject& y, int t = 0);

// ---------------------------------------------------------------- the audit

struct ExtensionReport {
    bool ok = true;
    std::string first_violation; // empty on success
    long checks = 0;             // identities tested before stopping
};

// Replaceable sigma, so tests can inject a corrupted action.
using PairSigma = std::function<PairTrack(const PairMap&, const ModuleMap&)>;
using SqSigma = std::function<SqTrack(const ModuleMap&, const ModuleMap&)>;

// Exhaustively checks, over all degree-0 maps and tracks among the sampled
// objects (plus the zero object): strict-zero laws, groupoid laws,
// interchange, the three sigma equations in order, sigma additivity and
// bijectivity, and biadditivity of D on biproducts. Stops at the first
// violation.
ExtensionReport verify_linear_extension(const TrackInstance& inst,
                                        const std::vector<PairObject>& objects,
                                        const PairSigma& sig = {});
ExtensionReport verify_linear_extension(const TrackInstance& inst,
                                        const std::vector<SqObject>& objects,
                                        const SqSigma& sig = {});

} // namespace secext::track
