#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "secext/fixtures.hpp"
#include "secext/track.hpp"

#include <string>
#include <vector>

using namespace secext;
using namespace secext::track;
using alg::free_module;
using alg::GradedModule;
using alg::hom_space;
using linalg::Mat;
using linalg::Modulus;

namespace {

Mat scalar(int64_t v, Modulus mod) { return Mat::col_vector({v}, mod); }

// ground field as a pair object 0 -> k
PairObject point(alg::AlgebraPtr a) {
    ModulePtr k = fixtures::ground_module(a);
    return pair_object(ModuleMap::zero(GradedModule::zero(a), k, 0));
}

// k -> k with the given 1x1 boundary entry
PairObject loop(alg::AlgebraPtr a, int64_t d) {
    ModulePtr k = fixtures::ground_module(a);
    return pair_object(ModuleMap(k, k, 0, scalar(d, a->mod())));
}

// all pair objects over E1 of total dimension <= 2
std::vector<PairObject> small_pair_universe(alg::AlgebraPtr e1) {
    ModulePtr k = fixtures::ground_module(e1);
    std::vector<PairObject> univ;
    univ.push_back(point(e1));                                            // 0 -> k
    univ.push_back(pair_object(ModuleMap::zero(k, GradedModule::zero(e1), 0))); // k -> 0
    univ.push_back(loop(e1, 0));                                          // k -> k, d = 0
    univ.push_back(loop(e1, 1));                                          // k -> k, d = 1
    univ.push_back(b_object(free_module(e1, {{"e", 0}})));                // 0 -> E1
    alg::FreeModule f = free_module(e1, {{"e", 0}});
    univ.push_back(pair_object(ModuleMap::zero(f.module, GradedModule::zero(e1), 0))); // E1 -> 0
    return univ;
}

} // namespace

TEST_CASE("pair groupoid calculus on a loop object") {
    auto e1 = fixtures::dual_numbers(Modulus::prime(2));
    PairObject x = loop(e1, 0);
    std::vector<PairMap> maps = all_maps(x, x);
    CHECK(maps.size() == 4); // (f1, f0) independent scalars since d = 0

    // tracks between parallel maps are torsors over D
    std::vector<ModuleMap> d = all_d_elements(x, x);
    CHECK(d.size() == 2);
    for (const PairMap& f : maps)
        for (const PairMap& g : maps) {
            std::vector<PairTrack> ts = all_tracks(f, g);
            // d = 0, so f and g are homotopic iff equal on nothing: any phi
            // has phi*d = 0 and d*phi = 0, hence tracks exist iff f == g
            if (f == g)
                CHECK(ts.size() == d.size());
            else
                CHECK(ts.empty());
        }

    PairMap id = pair_identity(x);
    CHECK(id.is_identity());
    std::vector<PairTrack> self = all_tracks(id, id);
    REQUIRE(self.size() == 2);
    for (const PairTrack& a : self) {
        CHECK(vcomp(a, vinverse(a)).phi.is_zero());
        CHECK(vcomp(vinverse(a), a).phi.is_zero());
        // sigma round trip
        CHECK(sigma(id, sigma_inv(a)).phi == a.phi);
    }
}

TEST_CASE("pair homotopy classes match hom of the homotopy groups") {
    auto e1 = fixtures::dual_numbers(Modulus::prime(2));
    PairObject free1 = b_object(free_module(e1, {{"e", 0}})); // 0 -> E1, pi0 = E1
    PairObject pt = point(e1);                                // 0 -> k
    PairObject l0 = loop(e1, 0);                              // pi0 = k, pi1 = k
    PairObject l1 = loop(e1, 1);                              // pi0 = 0, pi1 = 0

    // for X with M1 = 0, [X, Y] = Hom(pi0 X, pi0 Y)
    auto classes_match = [](const PairObject& x, const PairObject& y) {
        HomotopyClasses h = pair_homotopy_classes(x, y);
        alg::Quotient px = x.pi0();
        alg::Quotient py = y.pi0();
        return h.dim == static_cast<int>(hom_space(px.module, py.module, 0).size());
    };
    CHECK(classes_match(free1, l0));
    CHECK(classes_match(free1, l1));
    CHECK(classes_match(free1, pt));
    CHECK(classes_match(pt, l0));
    CHECK(classes_match(pt, l1));

    // [X, RY] = Hom(pi0 X, pi1 Y) with RY = (0 -> pi1 Y), for every X
    auto loop_shift_match = [&e1](const PairObject& x, const PairObject& y) {
        alg::Submodule s = y.pi1();
        PairObject ry = pair_object(ModuleMap::zero(GradedModule::zero(e1), s.module, 0));
        HomotopyClasses h = pair_homotopy_classes(x, ry);
        alg::Quotient px = x.pi0();
        return h.dim == static_cast<int>(hom_space(px.module, s.module, 0).size());
    };
    CHECK(loop_shift_match(l0, l0));
    CHECK(loop_shift_match(l1, l0));
    CHECK(loop_shift_match(free1, l0));
    CHECK(loop_shift_match(l0, l1));
}

TEST_CASE("pair D elements descend to hom of the homotopy groups") {
    auto e1 = fixtures::dual_numbers(Modulus::prime(2));
    PairObject x = loop(e1, 0);
    for (const PairObject& y : {loop(e1, 0), b_object(free_module(e1, {{"e", 0}}))}) {
        std::vector<ModuleMap> d = all_d_elements(x, y);
        alg::Quotient q = x.pi0();
        alg::Submodule s = y.pi1();
        CHECK(d.size() == (1u << hom_space(q.module, s.module, 0).size()));
        for (const ModuleMap& phi : d) {
            ModuleMap down = pair_d_descend(x, y, phi);
            CHECK(pair_d_lift(x, y, down).mat() == phi.mat());
        }
    }
}

TEST_CASE("pair linear extension verifies on the small universe") {
    auto e1 = fixtures::dual_numbers(Modulus::prime(2));
    TrackInstance inst = pair_instance(e1);
    ExtensionReport rep = verify_linear_extension(inst, small_pair_universe(e1));
    INFO(rep.first_violation);
    CHECK(rep.ok);
    CHECK(rep.checks > 1000);
}

TEST_CASE("corrupted sigma fails the first sigma equation") {
    auto f3 = fixtures::trivial_field(3);
    TrackInstance inst = pair_instance(f3);
    std::vector<PairObject> univ = {loop(f3, 0)};
    // sign flip everywhere except at identities: still lands in Aut(f), but
    // is no longer natural in f
    PairSigma bad = [](const PairMap& f, const ModuleMap& a) {
        return f.is_identity() ? sigma(f, a) : sigma(f, a.negated());
    };
    ExtensionReport rep = verify_linear_extension(inst, univ, bad);
    CHECK_FALSE(rep.ok);
    CHECK(rep.first_violation.substr(0, 16) == "sigma equation 1");
}

TEST_CASE("square rank-one universe verifies") {
    auto lift = fixtures::dual_numbers(Modulus::prime_square(2));
    TrackInstance inst = square_instance(lift);
    std::vector<SqObject> univ = {sq_object(free_module(lift, {{"a", 0}})),
                                  sq_object(free_module(lift, {{"b", 1}}))};
    ExtensionReport rep = verify_linear_extension(inst, univ);
    INFO(rep.first_violation);
    CHECK(rep.ok);
    CHECK(rep.checks > 100);
}

TEST_CASE("square tracks exist exactly mod p") {
    auto lift = fixtures::dual_numbers(Modulus::prime_square(2));
    SqObject f0 = sq_object(free_module(lift, {{"a", 0}}));
    std::vector<ModuleMap> maps = all_maps(f0, f0);
    CHECK(maps.size() == 4); // scalars mod 4 on the generator
    std::vector<ModuleMap> d = all_d_elements(f0, f0);
    CHECK(d.size() == 2);
    int with = 0, without = 0;
    for (const ModuleMap& f : maps)
        for (const ModuleMap& g : maps) {
            std::vector<SqTrack> ts = all_tracks(f, g);
            Mat diff = (f - g).mat().reduced_mod_p();
            if (diff.is_zero()) {
                CHECK(ts.size() == d.size());
                ++with;
            } else {
                CHECK(ts.empty());
                ++without;
            }
            for (const SqTrack& t : ts) CHECK(t.hat.mat().scaled(2) == (f - g).mat());
        }
    CHECK(with == 8);
    CHECK(without == 8);
}

TEST_CASE("square sigma witnesses aut of a map") {
    auto lift = fixtures::dual_numbers(Modulus::prime_square(2));
    SqObject f0 = sq_object(free_module(lift, {{"a", 0}}));
    SqObject f1 = sq_object(free_module(lift, {{"b", 1}}));
    ModuleMap zero = ModuleMap::zero(f1.module(), f0.module(), 0);
    std::vector<SqTrack> aut = all_tracks(zero, zero);
    std::vector<ModuleMap> d = all_d_elements(f1, f0);
    REQUIRE(aut.size() == d.size());
    for (const ModuleMap& abar : d) CHECK(sigma_inv(sigma(zero, abar)) == abar);
    for (const SqTrack& t : aut) CHECK(sigma(zero, sigma_inv(t)).hat == t.hat);
}

TEST_CASE("presented square object closes its relation span") {
    auto lift = fixtures::dual_numbers(Modulus::prime_square(2));
    alg::FreeModule cover = free_module(lift, {{"g", 0}});
    // relations 2g and xg present the ground ring Z/2
    Mat rel(2, 2, Modulus::prime_square(2));
    rel.set(0, 0, 2);
    rel.set(1, 1, 1);
    SqObject b = sq_presented(cover, rel);
    CHECK_FALSE(b.is_free());
    CHECK(b.rel.cols() == 2);
    CHECK(linalg::same_span(b.rel, rel));
    // single homogeneous generator grows to its action closure
    Mat gcol(2, 1, Modulus::prime_square(2));
    gcol.set(0, 0, 1); // the column "g": closure adds xg
    SqObject c = sq_presented(cover, gcol);
    CHECK(c.rel.cols() == 2);
    CHECK(linalg::span_log_size(c.rel) > linalg::span_log_size(gcol));
}

TEST_CASE("homogeneous kernel splits by degree") {
    auto e1 = fixtures::dual_numbers(Modulus::prime(2));
    alg::FreeModule f = free_module(e1, {{"e", 0}});
    // multiplication by x as a degree-1 self map
    ModuleMap byx(f.module, f.module, 1, f.module->action(1));
    Mat k = alg::homogeneous_kernel(byx);
    REQUIRE(k.cols() == 1);
    CHECK(k.at(0, 0) == 0);
    CHECK(k.at(1, 0) == 1);
    CHECK(linalg::same_span(k, linalg::kernel_image(byx.mat()).kernel));
}

TEST_CASE("span basis is canonical and idempotent") {
    Mat g(2, 3, Modulus::prime_square(2));
    g.set(0, 0, 2);
    g.set(1, 1, 1);
    g.set(0, 2, 2);
    g.set(1, 2, 1);
    Mat b = linalg::span_basis(g);
    CHECK(linalg::same_span(b, g));
    CHECK(linalg::span_basis(b) == b);
    CHECK(b.cols() == 2);
}

TEST_CASE("pair biproduct splits maps and D elements") {
    auto e1 = fixtures::dual_numbers(Modulus::prime(2));
    PairObject x = loop(e1, 0);
    PairObject y = point(e1);
    PairBiproduct b = pair_biproduct(x, y);
    CHECK((b.pr1 * b.in1).is_identity());
    CHECK((b.pr2 * b.in2).is_identity());
    CHECK((b.pr1 * b.in2).is_zero());
    CHECK((b.in1 * b.pr1 + b.in2 * b.pr2).is_identity());
    CHECK(all_maps(b.object, x).size() == all_maps(x, x).size() * all_maps(y, x).size());
}

TEST_CASE("zero object is strict in both instances") {
    auto e1 = fixtures::dual_numbers(Modulus::prime(2));
    PairObject z = zero_pair_object(e1);
    PairObject x = loop(e1, 0);
    CHECK(all_maps(x, z).size() == 1);
    CHECK(all_maps(z, x).size() == 1);
    CHECK(all_tracks(pair_zero(x, z), pair_zero(x, z)).size() == 1);

    auto lift = fixtures::dual_numbers(Modulus::prime_square(2));
    SqObject sz = zero_sq_object(lift);
    SqObject sx = sq_object(free_module(lift, {{"a", 0}}));
    CHECK(all_maps(sx, sz).size() == 1);
    CHECK(all_maps(sz, sx).size() == 1);
}
