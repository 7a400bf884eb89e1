#include "secext/track.hpp"

#include <map>
#include <set>
#include <stdexcept>
#include <utility>

namespace secext::track {

using linalg::Echelon;
using linalg::LinearSolution;
using linalg::Modulus;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void append_flat(std::vector<int64_t>& out, const Mat& m) {
    std::vector<int64_t> f = m.flattened();
    out.insert(out.end(), f.begin(), f.end());
}

Mat lin_comb(int rows, int cols, Modulus mod, const std::vector<ModuleMap>& basis,
             const std::vector<int64_t>& c, size_t offset) {
    Mat m(rows, cols, mod);
    for (size_t i = 0; i < basis.size(); ++i)
        if (c[offset + i] != 0) m = m + basis[i].mat().scaled(c[offset + i]);
    return m;
}

} // namespace

TrackInstance pair_instance(AlgebraPtr prime_algebra) {
    if (prime_algebra->mod().square) fail("pair instance: prime algebra required");
    return {Kind::pair, prime_algebra, prime_algebra};
}

TrackInstance square_instance(AlgebraPtr lift_algebra) {
    if (!lift_algebra->mod().square) fail("square instance: Z/p^2 algebra required");
    AlgebraPtr reduced = lift_algebra->reduced_mod_p();
    return {Kind::square, std::move(lift_algebra), std::move(reduced)};
}

// ---------------------------------------------------------------- pair side

alg::Quotient PairObject::pi0() const {
    return alg::quotient_by_span(m0(), boundary.mat());
}

alg::Submodule PairObject::pi1() const {
    return alg::submodule_from_generators(m1(), alg::homogeneous_kernel(boundary));
}

PairObject pair_object(ModuleMap boundary) {
    if (boundary.t() != 0) fail("pair object: boundary must have degree 0");
    if (boundary.mat().mod().square) fail("pair object: prime modulus required");
    return {std::move(boundary), std::nullopt};
}

PairObject b_object(FreeModule f) {
    if (f.module->mod().square) fail("b object: prime modulus required");
    ModulePtr zero = alg::GradedModule::zero(f.module->algebra());
    ModuleMap boundary = ModuleMap::zero(std::move(zero), f.module, 0);
    return {std::move(boundary), std::move(f)};
}

PairObject zero_pair_object(AlgebraPtr a) { return b_object(alg::free_module(std::move(a), {})); }

PairMap::PairMap(PairObject s, PairObject d, ModuleMap f1_in, ModuleMap f0_in)
    : src(std::move(s)), dst(std::move(d)), f1(std::move(f1_in)), f0(std::move(f0_in)) {
    if (!f1.src()->same_as(*src.m1()) || !f1.dst()->same_as(*dst.m1()) ||
        !f0.src()->same_as(*src.m0()) || !f0.dst()->same_as(*dst.m0()))
        fail("pair map: component modules mismatch");
    if (f1.t() != f0.t()) fail("pair map: component degrees differ");
    if (!(dst.boundary * f1 == f0 * src.boundary))
        fail("pair map: boundary square does not commute");
}

bool PairMap::is_identity() const {
    return src.same_as(dst) && t() == 0 &&
           f1.mat() == Mat::identity(src.m1()->dim(), f1.mat().mod()) &&
           f0.mat() == Mat::identity(src.m0()->dim(), f0.mat().mod());
}

PairMap PairMap::operator*(const PairMap& g) const {
    if (!src.same_as(g.dst)) fail("pair map composition: middle objects differ");
    return PairMap(g.src, dst, f1 * g.f1, f0 * g.f0);
}

PairMap PairMap::operator+(const PairMap& g) const {
    if (!src.same_as(g.src) || !dst.same_as(g.dst)) fail("pair map sum: object mismatch");
    return PairMap(src, dst, f1 + g.f1, f0 + g.f0);
}

PairMap PairMap::operator-(const PairMap& g) const {
    if (!src.same_as(g.src) || !dst.same_as(g.dst)) fail("pair map difference: object mismatch");
    return PairMap(src, dst, f1 - g.f1, f0 - g.f0);
}

PairMap pair_identity(const PairObject& x) {
    return PairMap(x, x, ModuleMap::identity(x.m1()), ModuleMap::identity(x.m0()));
}

PairMap pair_zero(const PairObject& x, const PairObject& y, int t) {
    return PairMap(x, y, ModuleMap::zero(x.m1(), y.m1(), t), ModuleMap::zero(x.m0(), y.m0(), t));
}

PairTrack::PairTrack(PairMap f, PairMap f2, ModuleMap datum)
    : src(std::move(f)), dst(std::move(f2)), phi(std::move(datum)) {
    if (!src.src.same_as(dst.src) || !src.dst.same_as(dst.dst) || src.t() != dst.t())
        fail("pair track: maps not parallel");
    if (!phi.src()->same_as(*src.src.m0()) || !phi.dst()->same_as(*src.dst.m1()) ||
        phi.t() != src.t())
        fail("pair track: datum shape mismatch");
    if (!(phi * src.src.boundary == src.f1 - dst.f1))
        fail("pair track: level-1 condition fails");
    if (!(src.dst.boundary * phi == src.f0 - dst.f0))
        fail("pair track: level-0 condition fails");
}

// -------------------------------------------------------------- square side

bool SqObject::same_as(const SqObject& o) const {
    return cover.module->same_as(*o.cover.module) && rel == o.rel;
}

SqObject sq_object(FreeModule cover) {
    if (!cover.module->mod().square) fail("square object: Z/p^2 modulus required");
    Mat none(cover.module->dim(), 0, cover.module->mod());
    return {std::move(cover), std::move(none)};
}

SqObject sq_presented(FreeModule cover, const Mat& relations) {
    ModulePtr m = cover.module;
    if (!m->mod().square) fail("presented object: Z/p^2 modulus required");
    if (relations.rows() != m->dim()) fail("presented object: relation shape mismatch");
    for (int c = 0; c < relations.cols(); ++c) alg::column_degree(*m, relations.col(c));
    Mat closed = linalg::span_basis(relations);
    for (;;) {
        Mat grown = closed;
        for (int g = 1; g < m->algebra()->dim(); ++g)
            grown = Mat::hcat(grown, m->action(g) * closed);
        grown = linalg::span_basis(grown);
        if (linalg::same_span(grown, closed)) break;
        closed = std::move(grown);
    }
    return {std::move(cover), std::move(closed)};
}

SqObject zero_sq_object(AlgebraPtr lift) { return sq_object(alg::free_module(std::move(lift), {})); }

SqTrack::SqTrack(ModuleMap f, ModuleMap f2, ModuleMap hat_in)
    : src(std::move(f)), dst(std::move(f2)), hat(std::move(hat_in)) {
    const Modulus& mod = src.mat().mod();
    if (!mod.square) fail("square track: Z/p^2 maps required");
    if (!src.src()->same_as(*dst.src()) || !src.dst()->same_as(*dst.dst()) || src.t() != dst.t())
        fail("square track: maps not parallel");
    if (!hat.src()->same_as(*src.src()) || !hat.dst()->same_as(*src.dst()) || hat.t() != src.t())
        fail("square track: lift shape mismatch");
    if (hat.mat().scaled(mod.p) != (src - dst).mat())
        fail("square track: p * lift differs from the map difference");
}

// ---------------------------------------------------------- groupoid calculus

PairTrack identity_track(const PairMap& f) {
    return PairTrack(f, f, ModuleMap::zero(f.src.m0(), f.dst.m1(), f.t()));
}

PairTrack vcomp(const PairTrack& b, const PairTrack& a) {
    if (!(b.src == a.dst)) fail("vcomp: tracks not composable");
    return PairTrack(a.src, b.dst, a.phi + b.phi);
}

PairTrack vinverse(const PairTrack& a) { return PairTrack(a.dst, a.src, a.phi.negated()); }

PairTrack whisker_left(const PairMap& g, const PairTrack& a) {
    return PairTrack(g * a.src, g * a.dst, g.f1 * a.phi);
}

PairTrack whisker_right(const PairTrack& a, const PairMap& e) {
    return PairTrack(a.src * e, a.dst * e, a.phi * e.f0);
}

PairTrack hcomp(const PairTrack& b, const PairTrack& a) {
    return vcomp(whisker_right(b, a.dst), whisker_left(b.src, a));
}

SqTrack identity_track(const ModuleMap& f) {
    return SqTrack(f, f, ModuleMap::zero(f.src(), f.dst(), f.t()));
}

SqTrack vcomp(const SqTrack& b, const SqTrack& a) {
    if (!(b.src == a.dst)) fail("vcomp: tracks not composable");
    return SqTrack(a.src, b.dst, a.hat + b.hat);
}

SqTrack vinverse(const SqTrack& a) { return SqTrack(a.dst, a.src, a.hat.negated()); }

SqTrack whisker_left(const ModuleMap& g, const SqTrack& a) {
    return SqTrack(g * a.src, g * a.dst, g * a.hat);
}

SqTrack whisker_right(const SqTrack& a, const ModuleMap& e) {
    return SqTrack(a.src * e, a.dst * e, a.hat * e);
}

SqTrack hcomp(const SqTrack& b, const SqTrack& a) {
    return vcomp(whisker_right(b, a.dst), whisker_left(b.src, a));
}

// ------------------------------------------------------------- sigma and D

ModuleMap d_act_left(const PairMap& g, const ModuleMap& a) { return g.f1 * a; }

ModuleMap d_act_right(const ModuleMap& b, const PairMap& f) { return b * f.f0; }

ModuleMap d_act_left(const ModuleMap& g, const ModuleMap& a) { return g.reduced_mod_p() * a; }

ModuleMap d_act_right(const ModuleMap& b, const ModuleMap& f) { return b * f.reduced_mod_p(); }

PairTrack sigma(const PairMap& f, const ModuleMap& a) {
    // the track constructor checks exactly the two D-element conditions
    return PairTrack(f, f, a);
}

ModuleMap sigma_inv(const PairTrack& self_track) {
    if (!(self_track.src == self_track.dst)) fail("sigma_inv: not a self-track");
    return self_track.phi;
}

SqTrack sigma(const ModuleMap& f, const ModuleMap& abar) {
    const Modulus& mod = f.mat().mod();
    if (!mod.square) fail("sigma: Z/p^2 map required");
    const Mat& am = abar.mat();
    if (am.mod().square || am.mod().p != mod.p) fail("sigma: reduced element required");
    if (am.rows() != f.mat().rows() || am.cols() != f.mat().cols() || abar.t() != f.t())
        fail("sigma: element shape mismatch");
    Mat lift(am.rows(), am.cols(), mod);
    for (int r = 0; r < am.rows(); ++r)
        for (int c = 0; c < am.cols(); ++c) lift.set(r, c, am.at(r, c));
    return SqTrack(f, f, ModuleMap(f.src(), f.dst(), f.t(), lift.scaled(mod.p)));
}

ModuleMap sigma_inv(const SqTrack& self_track) {
    if (!(self_track.src == self_track.dst)) fail("sigma_inv: not a self-track");
    const Mat& h = self_track.hat.mat();
    int64_t p = h.mod().p;
    Mat m(h.rows(), h.cols(), Modulus::prime(p));
    for (int r = 0; r < h.rows(); ++r)
        for (int c = 0; c < h.cols(); ++c) {
            int64_t v = h.at(r, c);
            if (v % p != 0) fail("sigma_inv: datum not p-divisible");
            m.set(r, c, (v / p) % p);
        }
    return ModuleMap(self_track.hat.src()->reduced_mod_p(),
                     self_track.hat.dst()->reduced_mod_p(), self_track.hat.t(), std::move(m));
}

ModuleMap pair_d_descend(const PairObject& x, const PairObject& y, const ModuleMap& phi) {
    if (!(phi * x.boundary).is_zero() || !(y.boundary * phi).is_zero())
        fail("descend: not a D element");
    alg::Quotient q = x.pi0();
    alg::Submodule s = y.pi1();
    Mat img = phi.mat() * q.section;
    Mat w(s.module->dim(), img.cols(), img.mod());
    for (int c = 0; c < img.cols(); ++c) {
        LinearSolution sol = linalg::solve_linear(s.inclusion, img.col(c));
        if (!sol.solvable) fail("descend: datum misses pi1");
        w.set_col(c, sol.particular);
    }
    return ModuleMap(q.module, s.module, phi.t(), std::move(w));
}

ModuleMap pair_d_lift(const PairObject& x, const PairObject& y, const ModuleMap& abar) {
    alg::Quotient q = x.pi0();
    alg::Submodule s = y.pi1();
    if (abar.mat().rows() != s.module->dim() || abar.mat().cols() != q.module->dim())
        fail("lift: element shape mismatch");
    return ModuleMap(x.m0(), y.m1(), abar.t(), s.inclusion * abar.mat() * q.projection);
}

// --------------------------------------------------------------- biproducts

PairBiproduct pair_biproduct(const PairObject& x, const PairObject& y) {
    alg::DirectSum s1 = alg::direct_sum(x.m1(), y.m1());
    alg::DirectSum s0 = alg::direct_sum(x.m0(), y.m0());
    Mat b = s0.in1 * x.boundary.mat() * s1.pr1 + s0.in2 * y.boundary.mat() * s1.pr2;
    PairObject obj = pair_object(ModuleMap(s1.module, s0.module, 0, std::move(b)));
    PairMap in1(x, obj, ModuleMap(x.m1(), s1.module, 0, s1.in1),
                ModuleMap(x.m0(), s0.module, 0, s0.in1));
    PairMap in2(y, obj, ModuleMap(y.m1(), s1.module, 0, s1.in2),
                ModuleMap(y.m0(), s0.module, 0, s0.in2));
    PairMap pr1(obj, x, ModuleMap(s1.module, x.m1(), 0, s1.pr1),
                ModuleMap(s0.module, x.m0(), 0, s0.pr1));
    PairMap pr2(obj, y, ModuleMap(s1.module, y.m1(), 0, s1.pr2),
                ModuleMap(s0.module, y.m0(), 0, s0.pr2));
    return {std::move(obj), std::move(in1), std::move(in2), std::move(pr1), std::move(pr2)};
}

SqBiproduct sq_biproduct(const SqObject& x, const SqObject& y) {
    std::vector<alg::BasisElem> gens;
    for (const auto& g : x.cover.gens) gens.push_back({"l:" + g.name, g.degree});
    for (const auto& g : y.cover.gens) gens.push_back({"r:" + g.name, g.degree});
    FreeModule cover = alg::free_module(x.module()->algebra(), std::move(gens));
    int dx = x.module()->dim(), dy = y.module()->dim();
    Modulus mod = x.module()->mod();
    Mat in1(dx + dy, dx, mod), in2(dx + dy, dy, mod);
    Mat pr1(dx, dx + dy, mod), pr2(dy, dx + dy, mod);
    for (int i = 0; i < dx; ++i) {
        in1.set(i, i, 1);
        pr1.set(i, i, 1);
    }
    for (int i = 0; i < dy; ++i) {
        in2.set(dx + i, i, 1);
        pr2.set(i, dx + i, 1);
    }
    Mat rel(dx + dy, x.rel.cols() + y.rel.cols(), mod);
    for (int c = 0; c < x.rel.cols(); ++c)
        for (int r = 0; r < dx; ++r) rel.set(r, c, x.rel.at(r, c));
    for (int c = 0; c < y.rel.cols(); ++c)
        for (int r = 0; r < dy; ++r) rel.set(dx + r, x.rel.cols() + c, y.rel.at(r, c));
    SqObject obj{cover, std::move(rel)};
    ModulePtr cm = cover.module;
    return {std::move(obj), ModuleMap(x.module(), cm, 0, std::move(in1)),
            ModuleMap(y.module(), cm, 0, std::move(in2)),
            ModuleMap(cm, x.module(), 0, std::move(pr1)),
            ModuleMap(cm, y.module(), 0, std::move(pr2))};
}

// -------------------------------------------------------------- enumeration

namespace {

bool next_tuple(std::vector<int64_t>& t, int64_t m) {
    for (int i = static_cast<int>(t.size()) - 1; i >= 0; --i) {
        if (++t[i] < m) return true;
        t[i] = 0;
    }
    return false;
}

void check_count(int gens, int64_t m) {
    int64_t total = 1;
    for (int i = 0; i < gens; ++i) {
        total *= m;
        if (total > enumeration_cap) fail("enumeration: solution set exceeds the cap");
    }
}

// every particular + combination of homogeneous generators, deduplicated,
// in odometer order (last generator fastest)
std::vector<std::vector<int64_t>> affine_points(const LinearSolution& s, Modulus mod) {
    std::vector<std::vector<int64_t>> out;
    if (!s.solvable) return out;
    int64_t m = mod.value();
    check_count(s.homogeneous.cols(), m);
    std::set<std::vector<int64_t>> seen;
    std::vector<int64_t> t(s.homogeneous.cols(), 0);
    do {
        std::vector<int64_t> x = s.particular;
        for (int g = 0; g < s.homogeneous.cols(); ++g) {
            if (t[g] == 0) continue;
            for (size_t r = 0; r < x.size(); ++r)
                x[r] = linalg::mod_reduce(x[r] + t[g] * s.homogeneous.at(static_cast<int>(r), g),
                                          m);
        }
        if (seen.insert(x).second) out.push_back(std::move(x));
    } while (next_tuple(t, m));
    return out;
}

struct PairHomProblem {
    std::vector<ModuleMap> h1, h0;
    Mat cols; // commuting-square constraint over the coefficient space
    Modulus mod;
};

PairHomProblem pair_hom_problem(const PairObject& x, const PairObject& y, int t) {
    PairHomProblem pr;
    pr.mod = x.m0()->mod();
    pr.h1 = alg::hom_space(x.m1(), y.m1(), t);
    pr.h0 = alg::hom_space(x.m0(), y.m0(), t);
    int rows = y.m0()->dim() * x.m1()->dim();
    pr.cols = Mat(rows, static_cast<int>(pr.h1.size() + pr.h0.size()), pr.mod);
    int c = 0;
    for (const ModuleMap& h : pr.h1) pr.cols.set_col(c++, (y.boundary * h).mat().flattened());
    for (const ModuleMap& h : pr.h0)
        pr.cols.set_col(c++, (h * x.boundary).mat().negated().flattened());
    return pr;
}

PairMap coeffs_to_pair_map(const PairObject& x, const PairObject& y, int t,
                           const PairHomProblem& pr, const std::vector<int64_t>& c) {
    Mat f1 = lin_comb(y.m1()->dim(), x.m1()->dim(), pr.mod, pr.h1, c, 0);
    Mat f0 = lin_comb(y.m0()->dim(), x.m0()->dim(), pr.mod, pr.h0, c, pr.h1.size());
    return PairMap(x, y, ModuleMap(x.m1(), y.m1(), t, std::move(f1)),
                   ModuleMap(x.m0(), y.m0(), t, std::move(f0)));
}

} // namespace

std::vector<PairMap> all_maps(const PairObject& x, const PairObject& y, int t) {
    PairHomProblem pr = pair_hom_problem(x, y, t);
    LinearSolution s;
    s.solvable = true;
    s.particular.assign(pr.cols.cols(), 0);
    s.homogeneous = linalg::kernel_image(pr.cols).kernel;
    std::vector<PairMap> out;
    for (const auto& c : affine_points(s, pr.mod)) out.push_back(coeffs_to_pair_map(x, y, t, pr, c));
    return out;
}

std::vector<PairTrack> all_tracks(const PairMap& f, const PairMap& f2) {
    if (!f.src.same_as(f2.src) || !f.dst.same_as(f2.dst) || f.t() != f2.t())
        fail("all_tracks: maps not parallel");
    const PairObject& x = f.src;
    const PairObject& y = f.dst;
    Modulus mod = x.m0()->mod();
    std::vector<ModuleMap> h = alg::hom_space(x.m0(), y.m1(), f.t());
    int r1 = y.m1()->dim() * x.m1()->dim();
    int r0 = y.m0()->dim() * x.m0()->dim();
    Mat cols(r1 + r0, static_cast<int>(h.size()), mod);
    for (size_t i = 0; i < h.size(); ++i) {
        std::vector<int64_t> v;
        append_flat(v, (h[i] * x.boundary).mat());
        append_flat(v, (y.boundary * h[i]).mat());
        cols.set_col(static_cast<int>(i), v);
    }
    std::vector<int64_t> rhs;
    append_flat(rhs, (f.f1 - f2.f1).mat());
    append_flat(rhs, (f.f0 - f2.f0).mat());
    std::vector<PairTrack> out;
    for (const auto& c : affine_points(linalg::solve_linear(cols, rhs), mod)) {
        Mat phi = lin_comb(y.m1()->dim(), x.m0()->dim(), mod, h, c, 0);
        out.push_back(PairTrack(f, f2, ModuleMap(x.m0(), y.m1(), f.t(), std::move(phi))));
    }
    return out;
}

std::vector<ModuleMap> all_d_elements(const PairObject& x, const PairObject& y, int t) {
    PairMap z = pair_zero(x, y, t);
    std::vector<ModuleMap> out;
    for (const PairTrack& tr : all_tracks(z, z)) out.push_back(tr.phi);
    return out;
}

std::vector<ModuleMap> all_maps(const SqObject& x, const SqObject& y, int t) {
    if (!x.is_free() || !y.is_free()) fail("all_maps: free square objects required");
    std::vector<ModuleMap> h = alg::hom_space(x.module(), y.module(), t);
    Modulus mod = x.module()->mod();
    LinearSolution s;
    s.solvable = true;
    s.particular.assign(h.size(), 0);
    s.homogeneous = Mat::identity(static_cast<int>(h.size()), mod);
    std::vector<ModuleMap> out;
    std::set<std::vector<int64_t>> seen;
    for (const auto& c : affine_points(s, mod)) {
        Mat m = lin_comb(y.module()->dim(), x.module()->dim(), mod, h, c, 0);
        if (seen.insert(m.flattened()).second)
            out.push_back(ModuleMap(x.module(), y.module(), t, std::move(m)));
    }
    return out;
}

std::vector<SqTrack> all_tracks(const ModuleMap& f, const ModuleMap& f2) {
    Modulus mod = f.mat().mod();
    if (!mod.square) fail("all_tracks: Z/p^2 maps required");
    Mat diff = (f - f2).mat(); // also validates that the maps are parallel
    std::vector<ModuleMap> h = alg::hom_space(f.src(), f.dst(), f.t());
    Mat cols(f.dst()->dim() * f.src()->dim(), static_cast<int>(h.size()), mod);
    for (size_t i = 0; i < h.size(); ++i)
        cols.set_col(static_cast<int>(i), h[i].mat().scaled(mod.p).flattened());
    std::vector<SqTrack> out;
    std::set<std::vector<int64_t>> seen;
    for (const auto& c : affine_points(linalg::solve_linear(cols, diff.flattened()), mod)) {
        Mat hat = lin_comb(f.dst()->dim(), f.src()->dim(), mod, h, c, 0);
        if (seen.insert(hat.flattened()).second)
            out.push_back(SqTrack(f, f2, ModuleMap(f.src(), f.dst(), f.t(), std::move(hat))));
    }
    return out;
}

std::vector<ModuleMap> all_d_elements(const SqObject& x, const SqObject& y, int t) {
    if (!x.is_free() || !y.is_free()) fail("all_d_elements: free square objects required");
    ModulePtr xr = x.module()->reduced_mod_p();
    ModulePtr yr = y.module()->reduced_mod_p();
    std::vector<ModuleMap> h = alg::hom_space(xr, yr, t);
    Modulus mod = xr->mod();
    LinearSolution s;
    s.solvable = true;
    s.particular.assign(h.size(), 0);
    s.homogeneous = Mat::identity(static_cast<int>(h.size()), mod);
    std::vector<ModuleMap> out;
    for (const auto& c : affine_points(s, mod))
        out.push_back(ModuleMap(xr, yr, t, lin_comb(yr->dim(), xr->dim(), mod, h, c, 0)));
    return out;
}

HomotopyClasses pair_homotopy_classes(const PairObject& x, const PairObject& y, int t) {
    PairHomProblem pr = pair_hom_problem(x, y, t);
    Mat k = linalg::kernel_image(pr.cols).kernel;
    Modulus mod = pr.mod;
    int flat_dim = y.m1()->dim() * x.m1()->dim() + y.m0()->dim() * x.m0()->dim();
    std::vector<ModuleMap> h = alg::hom_space(x.m0(), y.m1(), t);
    Mat span(flat_dim, static_cast<int>(h.size()), mod);
    for (size_t i = 0; i < h.size(); ++i) {
        std::vector<int64_t> v;
        append_flat(v, (h[i] * x.boundary).mat());
        append_flat(v, (y.boundary * h[i]).mat());
        span.set_col(static_cast<int>(i), v);
    }
    HomotopyClasses out;
    for (int c = 0; c < k.cols(); ++c) {
        PairMap m = coeffs_to_pair_map(x, y, t, pr, k.col(c));
        std::vector<int64_t> v;
        append_flat(v, m.f1.mat());
        append_flat(v, m.f0.mat());
        if (linalg::in_span(span, v)) continue;
        out.reps.push_back(std::move(m));
        span = Mat::hcat(span, Mat::col_vector(v, mod));
    }
    out.dim = static_cast<int>(out.reps.size());
    return out;
}

// ---------------------------------------------------------------- the audit

namespace {

bool eq(const PairTrack& a, const PairTrack& b) {
    return a.src == b.src && a.dst == b.dst && a.phi == b.phi;
}

bool eq(const SqTrack& a, const SqTrack& b) {
    return a.src == b.src && a.dst == b.dst && a.hat == b.hat;
}

std::string at(int i, int j) { return "(" + std::to_string(i) + "," + std::to_string(j) + ")"; }

std::string at(int i, int j, int k) {
    return "(" + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(k) + ")";
}

} // namespace

ExtensionReport verify_linear_extension(const TrackInstance& inst,
                                        const std::vector<PairObject>& objects,
                                        const PairSigma& sig) {
    if (inst.kind != Kind::pair) fail("verify: pair instance required");
    PairSigma sg = sig ? sig : [](const PairMap& f, const ModuleMap& a) { return sigma(f, a); };
    ExtensionReport rep;
    auto viol = [&rep](std::string msg) {
        rep.ok = false;
        rep.first_violation = std::move(msg);
    };

    std::vector<PairObject> univ = objects;
    univ.push_back(zero_pair_object(inst.algebra));
    int n = static_cast<int>(univ.size());
    int z = n - 1;

    std::vector<std::vector<std::vector<PairMap>>> maps(n);
    std::vector<std::vector<std::vector<ModuleMap>>> dels(n);
    std::vector<std::vector<std::map<std::pair<int, int>, std::vector<PairTrack>>>> tracks(n);
    for (int i = 0; i < n; ++i) {
        maps[i].resize(n);
        dels[i].resize(n);
        tracks[i].resize(n);
        for (int j = 0; j < n; ++j) {
            maps[i][j] = all_maps(univ[i], univ[j]);
            dels[i][j] = all_d_elements(univ[i], univ[j]);
            int m = static_cast<int>(maps[i][j].size());
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    tracks[i][j][{a, b}] = all_tracks(maps[i][j][a], maps[i][j][b]);
        }
    }

    // strict zero: one map and one track in every hom-groupoid touching 0
    for (int i = 0; i < n && rep.ok; ++i) {
        ++rep.checks;
        if (maps[i][z].size() != 1 || tracks[i][z][{0, 0}].size() != 1) {
            viol("strict zero: hom" + at(i, z) + " groupoid not trivial");
            break;
        }
        ++rep.checks;
        if (maps[z][i].size() != 1 || tracks[z][i][{0, 0}].size() != 1)
            viol("strict zero: hom" + at(z, i) + " groupoid not trivial");
    }

    // groupoid laws: inverses and (sampled) associativity of vcomp
    for (int i = 0; i < n && rep.ok; ++i)
        for (int j = 0; j < n && rep.ok; ++j)
            for (const auto& [key, ts] : tracks[i][j]) {
                for (const PairTrack& a : ts) {
                    ++rep.checks;
                    if (!eq(vcomp(a, vinverse(a)), identity_track(a.dst)) ||
                        !eq(vcomp(vinverse(a), a), identity_track(a.src))) {
                        viol("groupoid: inverse law fails in hom" + at(i, j));
                        break;
                    }
                }
                if (!rep.ok) break;
                for (const PairTrack& a : ts) {
                    const auto& bs = tracks[i][j].at({key.second, key.second});
                    for (const PairTrack& b : bs) {
                        ++rep.checks;
                        if (!eq(vcomp(vcomp(b, a), vinverse(a)), b)) {
                            viol("groupoid: associativity fails in hom" + at(i, j));
                            break;
                        }
                    }
                    if (!rep.ok) break;
                }
                if (!rep.ok) break;
            }

    // zero laws: whiskering with a zero map kills any track datum
    for (int i = 0; i < n && rep.ok; ++i)
        for (int j = 0; j < n && rep.ok; ++j)
            for (const auto& [key, ts] : tracks[i][j]) {
                for (const PairTrack& a : ts) {
                    for (int k = 0; k < n; ++k) {
                        ++rep.checks;
                        if (!whisker_left(pair_zero(univ[j], univ[k]), a).phi.is_zero() ||
                            !whisker_right(a, pair_zero(univ[k], univ[i])).phi.is_zero()) {
                            viol("zero law: whisker by zero map not trivial at " + at(i, j, k));
                            break;
                        }
                    }
                    if (!rep.ok) break;
                }
                if (!rep.ok) break;
            }

    // interchange: both decompositions of the horizontal composite agree
    for (int i = 0; i < n && rep.ok; ++i)
        for (int j = 0; j < n && rep.ok; ++j)
            for (int k = 0; k < n && rep.ok; ++k)
                for (const auto& [akey, ats] : tracks[i][j]) {
                    for (const auto& [bkey, bts] : tracks[j][k]) {
                        for (const PairTrack& a : ats)
                            for (const PairTrack& b : bts) {
                                ++rep.checks;
                                PairTrack d1 = vcomp(whisker_right(b, a.dst), whisker_left(b.src, a));
                                PairTrack d2 = vcomp(whisker_left(b.dst, a), whisker_right(b, a.src));
                                if (!eq(d1, d2) || !eq(d1, hcomp(b, a))) {
                                    viol("interchange: decompositions differ at " + at(i, j, k));
                                    break;
                                }
                            }
                        if (!rep.ok) break;
                    }
                    if (!rep.ok) break;
                }

    // sigma equation 1: sigma_{gf}(g a) = g sigma_f(a)
    for (int i = 0; i < n && rep.ok; ++i)
        for (int j = 0; j < n && rep.ok; ++j)
            for (int k = 0; k < n && rep.ok; ++k)
                for (const PairMap& f : maps[i][j]) {
                    for (const PairMap& g : maps[j][k]) {
                        for (const ModuleMap& a : dels[i][j]) {
                            ++rep.checks;
                            if (!eq(sg(g * f, d_act_left(g, a)), whisker_left(g, sg(f, a)))) {
                                viol("sigma equation 1 fails at objects " + at(i, j, k));
                                break;
                            }
                        }
                        if (!rep.ok) break;
                    }
                    if (!rep.ok) break;
                }

    // sigma equation 2: sigma_{gf}(b f) = sigma_g(b) f
    for (int i = 0; i < n && rep.ok; ++i)
        for (int j = 0; j < n && rep.ok; ++j)
            for (int k = 0; k < n && rep.ok; ++k)
                for (const PairMap& f : maps[i][j]) {
                    for (const PairMap& g : maps[j][k]) {
                        for (const ModuleMap& b : dels[j][k]) {
                            ++rep.checks;
                            if (!eq(sg(g * f, d_act_right(b, f)), whisker_right(sg(g, b), f))) {
                                viol("sigma equation 2 fails at objects " + at(i, j, k));
                                break;
                            }
                        }
                        if (!rep.ok) break;
                    }
                    if (!rep.ok) break;
                }

    // sigma equation 3: alpha o sigma_f(a) = sigma_{f'}(a) o alpha
    for (int i = 0; i < n && rep.ok; ++i)
        for (int j = 0; j < n && rep.ok; ++j)
            for (const auto& [key, ts] : tracks[i][j]) {
                const PairMap& fa = maps[i][j][key.first];
                const PairMap& fb = maps[i][j][key.second];
                for (const PairTrack& alpha : ts) {
                    for (const ModuleMap& a : dels[i][j]) {
                        ++rep.checks;
                        if (!eq(vcomp(alpha, sg(fa, a)), vcomp(sg(fb, a), alpha))) {
                            viol("sigma equation 3 fails in hom" + at(i, j));
                            break;
                        }
                    }
                    if (!rep.ok) break;
                }
                if (!rep.ok) break;
            }

    // sigma is a group isomorphism D(X,Y) -> Aut(f)
    for (int i = 0; i < n && rep.ok; ++i)
        for (int j = 0; j < n && rep.ok; ++j)
            for (size_t fi = 0; fi < maps[i][j].size() && rep.ok; ++fi) {
                const PairMap& f = maps[i][j][fi];
                const auto& self = tracks[i][j].at({static_cast<int>(fi), static_cast<int>(fi)});
                ++rep.checks;
                if (self.size() != dels[i][j].size()) {
                    viol("sigma bijection: |Aut(f)| != |D| in hom" + at(i, j));
                    break;
                }
                for (const ModuleMap& a : dels[i][j]) {
                    ++rep.checks;
                    if (!(sigma_inv(sg(f, a)) == a)) {
                        viol("sigma bijection: left inverse fails in hom" + at(i, j));
                        break;
                    }
                    for (const ModuleMap& b : dels[i][j]) {
                        ++rep.checks;
                        if (!eq(sg(f, a + b), vcomp(sg(f, a), sg(f, b)))) {
                            viol("sigma additivity fails in hom" + at(i, j));
                            break;
                        }
                    }
                    if (!rep.ok) break;
                }
                if (!rep.ok) break;
                for (const PairTrack& alpha : self) {
                    ++rep.checks;
                    if (!eq(sg(f, sigma_inv(alpha)), alpha)) {
                        viol("sigma bijection: right inverse fails in hom" + at(i, j));
                        break;
                    }
                }
            }

    // biadditivity of D on biproducts, both variables
    for (int i = 0; i < n && rep.ok; ++i)
        for (int j = 0; j < n && rep.ok; ++j) {
            PairBiproduct b = pair_biproduct(univ[i], univ[j]);
            for (int k = 0; k < n && rep.ok; ++k) {
                // left variable: D(Xi + Xj, Yk) = D(Xi, Yk) x D(Xj, Yk)
                std::vector<ModuleMap> db = all_d_elements(b.object, univ[k]);
                ++rep.checks;
                if (db.size() != dels[i][k].size() * dels[j][k].size()) {
                    viol("biadditivity: |D(X+X', Y)| mismatch at " + at(i, j, k));
                    break;
                }
                std::set<std::vector<int64_t>> known;
                for (const ModuleMap& d : db) known.insert(d.mat().flattened());
                for (const ModuleMap& a1 : dels[i][k]) {
                    for (const ModuleMap& a2 : dels[j][k]) {
                        ModuleMap glued = d_act_right(a1, b.pr1) + d_act_right(a2, b.pr2);
                        ++rep.checks;
                        if (!(d_act_right(glued, b.in1) == a1) ||
                            !(d_act_right(glued, b.in2) == a2) ||
                            known.find(glued.mat().flattened()) == known.end()) {
                            viol("biadditivity: gluing fails at " + at(i, j, k));
                            break;
                        }
                    }
                    if (!rep.ok) break;
                }
                if (!rep.ok) break;
                // right variable: D(Xk, Yi + Yj) = D(Xk, Yi) x D(Xk, Yj)
                std::vector<ModuleMap> dk = all_d_elements(univ[k], b.object);
                ++rep.checks;
                if (dk.size() != dels[k][i].size() * dels[k][j].size()) {
                    viol("biadditivity: |D(X, Y+Y')| mismatch at " + at(k, i, j));
                    break;
                }
                for (const ModuleMap& d : dk) {
                    ModuleMap c1 = d_act_left(b.pr1, d);
                    ModuleMap c2 = d_act_left(b.pr2, d);
                    ++rep.checks;
                    if (!(d_act_left(b.in1, c1) + d_act_left(b.in2, c2) == d)) {
                        viol("biadditivity: splitting fails at " + at(k, i, j));
                        break;
                    }
                }
            }
        }

    return rep;
}

ExtensionReport verify_linear_extension(const TrackInstance& inst,
                                        const std::vector<SqObject>& objects,
                                        const SqSigma& sig) {
    if (inst.kind != Kind::square) fail("verify: square instance required");
    SqSigma sg = sig ? sig : [](const ModuleMap& f, const ModuleMap& a) { return sigma(f, a); };
    ExtensionReport rep;
    auto viol = [&rep](std::string msg) {
        rep.ok = false;
        rep.first_violation = std::move(msg);
    };

    std::vector<SqObject> univ = objects;
    univ.push_back(zero_sq_object(inst.algebra));
    int n = static_cast<int>(univ.size());
    int z = n - 1;
    for (const SqObject& o : univ)
        if (!o.is_free()) fail("verify: free square objects required");

    std::vector<std::vector<std::vector<ModuleMap>>> maps(n);
    std::vector<std::vector<std::vector<ModuleMap>>> dels(n);
    std::vector<std::vector<std::map<std::pair<int, int>, std::vector<SqTrack>>>> tracks(n);
    for (int i = 0; i < n; ++i) {
        maps[i].resize(n);
        dels[i].resize(n);
        tracks[i].resize(n);
        for (int j = 0; j < n; ++j) {
            maps[i][j] = all_maps(univ[i], univ[j]);
            dels[i][j] = all_d_elements(univ[i], univ[j]);
            int m = static_cast<int>(maps[i][j].size());
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    tracks[i][j][{a, b}] = all_tracks(maps[i][j][a], maps[i][j][b]);
        }
    }

    for (int i = 0; i < n && rep.ok; ++i) {
        ++rep.checks;
        if (maps[i][z].size() != 1 || tracks[i][z][{0, 0}].size() != 1) {
            viol("strict zero: hom" + at(i, z) + " groupoid not trivial");
            break;
        }
        ++rep.checks;
        if (maps[z][i].size() != 1 || tracks[z][i][{0, 0}].size() != 1)
            viol("strict zero: hom" + at(z, i) + " groupoid not trivial");
    }

    for (int i = 0; i < n && rep.ok; ++i)
        for (int j = 0; j < n && rep.ok; ++j)
            for (const auto& [key, ts] : tracks[i][j]) {
                for (const SqTrack& a : ts) {
                    ++rep.checks;
                    if (!eq(vcomp(a, vinverse(a)), identity_track(a.dst)) ||
                        !eq(vcomp(vinverse(a), a), identity_track(a.src))) {
                        viol("groupoid: inverse law fails in hom" + at(i, j));
                        break;
                    }
                }
                if (!rep.ok) break;
                for (const SqTrack& a : ts) {
                    const auto& bs = tracks[i][j].at({key.second, key.second});
                    for (const SqTrack& b : bs) {
                        ++rep.checks;
                        if (!eq(vcomp(vcomp(b, a), vinverse(a)), b)) {
                            viol("groupoid: associativity fails in hom" + at(i, j));
                            break;
                        }
                    }
                    if (!rep.ok) break;
                }
                if (!rep.ok) break;
            }

    for (int i = 0; i < n && rep.ok; ++i)
        for (int j = 0; j < n && rep.ok; ++j)
            for (const auto& [key, ts] : tracks[i][j]) {
                for (const SqTrack& a : ts) {
                    for (int k = 0; k < n; ++k) {
                        ModuleMap zl = ModuleMap::zero(univ[j].module(), univ[k].module(), 0);
                        ModuleMap zr = ModuleMap::zero(univ[k].module(), univ[i].module(), 0);
                        ++rep.checks;
                        if (!whisker_left(zl, a).hat.is_zero() ||
                            !whisker_right(a, zr).hat.is_zero()) {
                            viol("zero law: whisker by zero map not trivial at " + at(i, j, k));
                            break;
                        }
                    }
                    if (!rep.ok) break;
                }
                if (!rep.ok) break;
            }

    for (int i = 0; i < n && rep.ok; ++i)
        for (int j = 0; j < n && rep.ok; ++j)
            for (int k = 0; k < n && rep.ok; ++k)
                for (const auto& [akey, ats] : tracks[i][j]) {
                    for (const auto& [bkey, bts] : tracks[j][k]) {
                        for (const SqTrack& a : ats)
                            for (const SqTrack& b : bts) {
                                ++rep.checks;
                                SqTrack d1 = vcomp(whisker_right(b, a.dst), whisker_left(b.src, a));
                                SqTrack d2 = vcomp(whisker_left(b.dst, a), whisker_right(b, a.src));
                                if (!eq(d1, d2) || !eq(d1, hcomp(b, a))) {
                                    viol("interchange: decompositions differ at " + at(i, j, k));
                                    break;
                                }
                            }
                        if (!rep.ok) break;
                    }
                    if (!rep.ok) break;
                }

    for (int i = 0; i < n && rep.ok; ++i)
        for (int j = 0; j < n && rep.ok; ++j)
            for (int k = 0; k < n && rep.ok; ++k)
                for (const ModuleMap& f : maps[i][j]) {
                    for (const ModuleMap& g : maps[j][k]) {
                        for (const ModuleMap& a : dels[i][j]) {
                            ++rep.checks;
                            if (!eq(sg(g * f, d_act_left(g, a)), whisker_left(g, sg(f, a)))) {
                                viol("sigma equation 1 fails at objects " + at(i, j, k));
                                break;
                            }
                        }
                        if (!rep.ok) break;
                    }
                    if (!rep.ok) break;
                }

    for (int i = 0; i < n && rep.ok; ++i)
        for (int j = 0; j < n && rep.ok; ++j)
            for (int k = 0; k < n && rep.ok; ++k)
                for (const ModuleMap& f : maps[i][j]) {
                    for (const ModuleMap& g : maps[j][k]) {
                        for (const ModuleMap& b : dels[j][k]) {
                            ++rep.checks;
                            if (!eq(sg(g * f, d_act_right(b, f)), whisker_right(sg(g, b), f))) {
                                viol("sigma equation 2 fails at objects " + at(i, j, k));
                                break;
                            }
                        }
                        if (!rep.ok) break;
                    }
                    if (!rep.ok) break;
                }

    for (int i = 0; i < n && rep.ok; ++i)
        for (int j = 0; j < n && rep.ok; ++j)
            for (const auto& [key, ts] : tracks[i][j]) {
                const ModuleMap& fa = maps[i][j][key.first];
                const ModuleMap& fb = maps[i][j][key.second];
                for (const SqTrack& alpha : ts) {
                    for (const ModuleMap& a : dels[i][j]) {
                        ++rep.checks;
                        if (!eq(vcomp(alpha, sg(fa, a)), vcomp(sg(fb, a), alpha))) {
                            viol("sigma equation 3 fails in hom" + at(i, j));
                            break;
                        }
                    }
                    if (!rep.ok) break;
                }
                if (!rep.ok) break;
            }

    for (int i = 0; i < n && rep.ok; ++i)
        for (int j = 0; j < n && rep.ok; ++j)
            for (size_t fi = 0; fi < maps[i][j].size() && rep.ok; ++fi) {
                const ModuleMap& f = maps[i][j][fi];
                const auto& self = tracks[i][j].at({static_cast<int>(fi), static_cast<int>(fi)});
                ++rep.checks;
                if (self.size() != dels[i][j].size()) {
                    viol("sigma bijection: |Aut(f)| != |D| in hom" + at(i, j));
                    break;
                }
                for (const ModuleMap& a : dels[i][j]) {
                    ++rep.checks;
                    if (!(sigma_inv(sg(f, a)) == a)) {
                        viol("sigma bijection: left inverse fails in hom" + at(i, j));
                        break;
                    }
                    for (const ModuleMap& b : dels[i][j]) {
                        ++rep.checks;
                        if (!eq(sg(f, a + b), vcomp(sg(f, a), sg(f, b)))) {
                            viol("sigma additivity fails in hom" + at(i, j));
                            break;
                        }
                    }
                    if (!rep.ok) break;
                }
                if (!rep.ok) break;
                for (const SqTrack& alpha : self) {
                    ++rep.checks;
                    if (!eq(sg(f, sigma_inv(alpha)), alpha)) {
                        viol("sigma bijection: right inverse fails in hom" + at(i, j));
                        break;
                    }
                }
            }

    for (int i = 0; i < n && rep.ok; ++i)
        for (int j = 0; j < n && rep.ok; ++j) {
            SqBiproduct b = sq_biproduct(univ[i], univ[j]);
            for (int k = 0; k < n && rep.ok; ++k) {
                std::vector<ModuleMap> db = all_d_elements(b.object, univ[k]);
                ++rep.checks;
                if (db.size() != dels[i][k].size() * dels[j][k].size()) {
                    viol("biadditivity: |D(X+X', Y)| mismatch at " + at(i, j, k));
                    break;
                }
                std::set<std::vector<int64_t>> known;
                for (const ModuleMap& d : db) known.insert(d.mat().flattened());
                for (const ModuleMap& a1 : dels[i][k]) {
                    for (const ModuleMap& a2 : dels[j][k]) {
                        ModuleMap glued = d_act_right(a1, b.pr1) + d_act_right(a2, b.pr2);
                        ++rep.checks;
                        if (!(d_act_right(glued, b.in1) == a1) ||
                            !(d_act_right(glued, b.in2) == a2) ||
                            known.find(glued.mat().flattened()) == known.end()) {
                            viol("biadditivity: gluing fails at " + at(i, j, k));
                            break;
                        }
                    }
                    if (!rep.ok) break;
                }
                if (!rep.ok) break;
                std::vector<ModuleMap> dk = all_d_elements(univ[k], b.object);
                ++rep.checks;
                if (dk.size() != dels[k][i].size() * dels[k][j].size()) {
                    viol("biadditivity: |D(X, Y+Y')| mismatch at " + at(k, i, j));
                    break;
                }
                for (const ModuleMap& d : dk) {
                    ModuleMap c1 = d_act_left(b.pr1, d);
                    ModuleMap c2 = d_act_left(b.pr2, d);
                    ++rep.checks;
                    if (!(d_act_left(b.in1, c1) + d_act_left(b.in2, c2) == d)) {
                        viol("biadditivity: splitting fails at " + at(k, i, j));
                        break;
                    }
                }
            }
        }

    return rep;
}

} // namespace secext::track
