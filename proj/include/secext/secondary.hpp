#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "secext/resolution.hpp"
#include "secext/track.hpp"

// Secondary chain complexes: chain complexes in a track category whose
// differentials compose to zero only up to a chosen track, together with the
// calculus that replaces kernels and images at this level (b-cycles and
// b-boundaries probed by maps from the small subcategory b), secondary
// resolutions, lifts of maps through them, and the transfer principle that
// relates b-exactness to ordinary exactness of the image complex in the
// homotopy category.
//
// A complex stores a finite window of positions base..base+count-1; accessors
// extend it by zero objects and zero maps outside the window, so every
// identity can be checked with uniform index arithmetic.  Both track
// instantiations are driven through the same coordinate interface:
//
//   mod0(n)  underlying module carrying the map data (pair: M0; square: cover)
//   mod1(n)  module carrying track data (pair: M1; square: cover again)
//   d0(n), d1(n)  the two levels of the differential A_{n+1} -> A_n
//   bdry(n)  the object's own boundary operator (pair: del; square: p*id)
//   delta(n) datum of the chosen track d_n d_{n+1} => 0, a map
//            mod0(n+2) -> mod1(n)
//   rel0(n), rel1(n)  relation span to quotient by when comparing maps
//            (square presented objects; empty otherwise)
//
// In these terms a complex is valid when, for every n,
//
//   d1(n) d1(n+1) = delta(n) bdry(n+2)      (tracks paste at level 1)
//   d0(n) d0(n+1) = bdry(n) delta(n)        (tracks paste at level 0)
//   d1(n-1) delta(n) = delta(n-1) d0(n+1)   (coherence of adjacent tracks)
//
// all modulo the relation spans.  For the pair instantiation these are
// exactly the strict equations carried by a track d d => 0, and for the
// square instantiation they reduce to d d = p*delta plus coherence of the
// divided lifts.

namespace secext::secondary {

using alg::AlgebraPtr;
using alg::Mat;
using alg::ModuleMap;
using alg::ModulePtr;
using linalg::Modulus;
using track::Kind;

inline constexpr int unbounded = std::numeric_limits<int>::max();

// ---------------------------------------------------------------------------
// The complex

struct SecondaryComplex {
    Kind kind = Kind::pair;
    AlgebraPtr algebra;   // pair: the prime algebra; square: the lift
    int base = 0;         // position of the first stored object

    // Pair storage: objects, differentials (pd[i]: objs[i+1] -> objs[i]).
    std::vector<track::PairObject> pobj;
    std::vector<track::PairMap> pd;

    // Square storage, same shape.
    std::vector<track::SqObject> sobj;
    std::vector<ModuleMap> sd;

    // Track data: del[i] is the datum of delta at position base+i, a map
    // mod0(base+i+2) -> mod1(base+i).  Size count()-2 when count() >= 2.
    std::vector<ModuleMap> del;

    int count() const;
    int top() const { return base + count() - 1; }
    bool in_window(int n) const { return n >= base && n <= top(); }

    // Window-safe accessors; see the header comment for their meaning.
    ModulePtr mod0(int n) const;
    ModulePtr mod1(int n) const;
    ModuleMap d0(int n) const;
    ModuleMap d1(int n) const;
    ModuleMap bdry(int n) const;
    ModuleMap delta(int n) const;
    Mat rel0(int n) const;
    Mat rel1(int n) const;

    Modulus mod() const;

private:
    ModulePtr zero_module() const;
};

// Shape-validating constructors.  Both check source/target matching and that
// every stored map has degree zero; the track equations themselves are left
// to validate_secondary so that deliberately faulty complexes can be built
// and fed to the validator.
SecondaryComplex make_pair_complex(AlgebraPtr algebra, int base,
                                   std::vector<track::PairObject> objects,
                                   std::vector<track::PairMap> diffs,
                                   std::vector<ModuleMap> deltas);
SecondaryComplex make_square_complex(AlgebraPtr lift, int base,
                                     std::vector<track::SqObject> objects,
                                     std::vector<ModuleMap> diffs,
                                     std::vector<ModuleMap> deltas);

// A complex augmented over the object at position -1 (the module being
// resolved); positions 0..top() are the resolving objects.  truncated is set
// when a degree cap forced generators to be dropped.
struct SecondaryAugmented {
    SecondaryComplex c;
    bool truncated = false;
};

struct ValidationReport {
    bool ok = true;
    int first_failure = 0;  // position of the first failed identity
    std::string what;       // which identity failed there
};

// Checks the three identities at every position touching the window.
// Throws std::invalid_argument when the window holds fewer than three
// objects (no track identity is expressible).
ValidationReport validate_secondary(const SecondaryComplex& c);

// ---------------------------------------------------------------------------
// b-cycles and b-boundaries
//
// A candidate at position n is a pair of coordinate columns (c, gamma):
// c in mod0(n) homogeneous of degree t, gamma in mod1(n-1), thought of as a
// map from a rank-one free probe together with a track gamma: d_{n-1} c => 0.

struct BCycle {
    int n = 0;
    int t = 0;
    std::vector<int64_t> c;
    std::vector<int64_t> gamma;
};

struct BoundaryWitness {
    std::vector<int64_t> a;      // in mod0(n+1)
    std::vector<int64_t> alpha;  // in mod1(n), datum of alpha: c => d_n a
};

// The cycle conditions: d0(n-1) c = bdry(n-1) gamma and
// delta(n-2) c = d1(n-2) gamma, modulo the relation spans.
bool is_b_cycle(const SecondaryComplex& c, const BCycle& z);

// Solves d0(n) a + bdry(n) alpha = c and delta(n-1) a + d1(n-1) alpha =
// gamma modulo the relation spans.  The returned witness is homogeneous of
// degree z.t (the system is degree-preserving, so the degree-t part of any
// solution is again a solution).  nullopt certifies no witness exists.
std::optional<BoundaryWitness> is_b_boundary(const SecondaryComplex& c,
                                             const BCycle& z);

// Generators of the space of b-cycles at position n: the homogeneous kernel
// of the stacked cycle system, projected to (c, gamma) coordinates.  Zero
// projections are dropped.
std::vector<BCycle> b_cycle_generators(const SecondaryComplex& c, int n);

struct BExactReport {
    bool exact = true;
    int first_failure = 0;  // position where some cycle is not a boundary
};

// Direct path, both instantiations: every generator of the cycle space at
// each position lo..hi (internal degree <= t_cap) must admit a boundary
// witness.  Rank-one probes suffice: b-cycles from a general free probe
// split into columns, and boundaries are closed under sums.
BExactReport is_b_exact(const SecondaryComplex& c, int lo, int hi,
                        int t_cap = unbounded);

// ---------------------------------------------------------------------------
// Total complex (pair instantiation only)
//
// T_k = mod0(base+k) (+) mod1(base+k-1) with differential
// [[d0, -bdry], [delta, -d1]]; the square of this block matrix vanishes
// exactly by the four strict equations carried by the pair track data, and
// chain-level exactness of T at position k is equivalent to b-exactness at
// position base+k.

homalg::ChainComplex total_complex(const SecondaryComplex& c);

// Equivalent b-exactness test through the total complex, positions base..hi.
BExactReport is_b_exact_total(const SecondaryComplex& c, int hi,
                              int t_cap = unbounded);

// ---------------------------------------------------------------------------
// Secondary resolutions

struct BuildOptions {
    int s_max = 0;
    int t_max = unbounded;
    // Feed cycle candidates to the generator selection in reverse order;
    // produces an equally valid resolution built from different choices.
    bool reverse_candidates = false;
};

// Resolves b by free objects: at each stage the minimal generators of the
// cycle space not already hit (boundaries of existing track data seed the
// excluded span) become the generators of the next object, their c-parts the
// next differential and their gamma-parts the next delta.  The result is
// validated and checked b-exact before being returned.
SecondaryAugmented build_secondary_resolution(const track::TrackInstance& inst,
                                              const track::PairObject& b,
                                              const BuildOptions& opt);
SecondaryAugmented build_secondary_resolution(const track::TrackInstance& inst,
                                              const track::SqObject& b,
                                              const BuildOptions& opt);

// Lifts the classical resolution of b's underlying module into the track
// category instead of resolving by b-cycles.  Differentials lift the reduced
// ones verbatim on generator images, deltas are the divided composites
// (d d)/p with the base relation span absorbing the remainder.  The image
// complex is the classical resolution itself, which is the shape the
// secondary differential consumes.  Over a presented base the result is
// usually not b-exact; the failure is not a defect, it is the obstruction
// the secondary differential measures.  The pair overload delegates to
// build_secondary_resolution, whose output already has both properties.
SecondaryAugmented lift_resolution(const track::TrackInstance& inst,
                                   const track::PairObject& b, const BuildOptions& opt);
SecondaryAugmented lift_resolution(const track::TrackInstance& inst,
                                   const track::SqObject& b, const BuildOptions& opt);

// ---------------------------------------------------------------------------
// Maps of secondary complexes

// f_n: src_n -> dst_n together with tracks phi_n: f_n d_n => d_n f_{n+1},
// stored by their data phi[i]: mod0_src(base+i+1) -> mod1_dst(base+i).
// Validity is the strict track condition on each phi_n plus the pasting
// identity tying f to both deltas:
//
//   f_{n-1} delta_src(n-1) = delta_dst(n-1) f_{n+1}
//                            + d1_dst(n-1) phi_n + phi_{n-1} d0_src(n)
//
// modulo rel1_dst(n-1), for every n.
struct SecondaryMap {
    SecondaryComplex src, dst;
    std::vector<track::PairMap> pf;
    std::vector<ModuleMap> sf;
    std::vector<ModuleMap> phi;

    // Window-safe accessors (zero outside the window).
    ModuleMap fc(int n) const;   // level-0 component of f_n
    ModuleMap fg(int n) const;   // level-1 component of f_n
    ModuleMap track(int n) const;  // datum of phi_n
};

struct MapReport {
    bool ok = true;
    int first_failure = 0;
    std::string what;
};

MapReport validate_secondary_map(const SecondaryMap& m);

SecondaryMap identity_secondary_map(const SecondaryComplex& c);

// (g f)_n = g_n f_n with track g phi^f || phi^g f shifted one stage:
// datum fg_g(n) phi^f(n) + phi^g(n) fc_f(n+1).
SecondaryMap compose_secondary(const SecondaryMap& g, const SecondaryMap& f);

// Lifts the identity of the resolved object through two secondary
// resolutions of it, stage by stage: each generator's image is forced to be
// a b-cycle (std::logic_error otherwise, since that is an identity), and a
// boundary witness in dst provides the next f and phi entries.  Throws
// std::runtime_error naming the failing position when dst is not b-exact
// there.
SecondaryMap secondary_lift(const SecondaryAugmented& src,
                            const SecondaryAugmented& dst);

// ---------------------------------------------------------------------------
// Secondary complexes from coaugmented sequences
//
// Given factorizations d_n = i_n p_n through intermediate objects and tracks
// alpha_n: p_n i_{n+1} => 0, the maps i_n alpha_n p_{n+1} are the deltas of
// a secondary complex; the identity (p i) alpha = alpha (p i), which makes
// adjacent tracks coherent, is a consequence of the interchange law and is
// asserted here directly (std::logic_error on failure, for it is a theorem).

// Pair: i[n]: Y_n -> A_n, p[n]: A_{n+1} -> Y_n, alpha[n] the datum of a
// track p[n] i[n+1] => 0; the objects ride along on the maps.  Square: the
// covers of A_0..A_N are passed explicitly since plain module maps do not
// carry them.  Throws std::invalid_argument when a given alpha is not a
// valid track datum, distinguishing the case where no track p i => 0 exists
// at all.
SecondaryComplex from_sequence(AlgebraPtr algebra,
                               const std::vector<track::PairMap>& i,
                               const std::vector<track::PairMap>& p,
                               const std::vector<ModuleMap>& alpha);
SecondaryComplex from_sequence(AlgebraPtr lift,
                               const std::vector<track::SqObject>& objects,
                               const std::vector<ModuleMap>& i,
                               const std::vector<ModuleMap>& p,
                               const std::vector<ModuleMap>& alpha);

// ---------------------------------------------------------------------------
// Transfer between b-exactness and homotopy exactness

// The image of the complex in the homotopy category: pair objects pass to
// their pi0 with the induced maps, square objects to their mod-p reduction.
// For bounded-below complexes of instance objects (pair: any; square: free),
// exactness of the image complex and b-exactness of the original are
// equivalent, per-position from the bottom up; the report records both
// verdicts and whether they agree.  Presented square objects fall outside
// the instance proper, so hypotheses_met is cleared and agreement is not
// claimed.
struct TransferReport {
    bool hypotheses_met = true;
    bool a_exact = true;
    bool b_exact = true;
    int a_first_failure = 0;  // in complex positions, not image indices
    int b_first_failure = 0;
    bool agree = true;
};

TransferReport hosec_transfer(const SecondaryComplex& c,
                              int t_cap = unbounded);

// Strips an augmented secondary resolution down to the classical resolution
// of the image: pair gives the free M0 row resolving pi0 of the resolved
// object, square gives the mod-p reduction over the reduced algebra.
homalg::Resolution image_resolution(const SecondaryAugmented& a);

// Square instantiation only: replaces every delta by delta + lambda * p *
// lift(delta mod p).  This preserves p*delta = d d and coherence (which
// reduce mod p to identities the original already satisfies), so it walks
// through genuinely different valid choices of divided lift.
SecondaryAugmented perturb_delta(const SecondaryAugmented& a, int64_t lambda);

}  // namespace secext::secondary
