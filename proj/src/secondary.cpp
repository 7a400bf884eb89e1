#include "secext/secondary.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace secext::secondary {
namespace {

using alg::BasisElem;
using alg::FreeModule;
using alg::GradedModule;

[[noreturn]] void fail(const std::string& msg) {
    throw std::invalid_argument("secondary: " + msg);
}

// Every column of v lies in the span of rel; empty rel means exact zero.
bool in_rel(const Mat& rel, const Mat& v) {
    if (rel.cols() == 0) return v.is_zero();
    for (int c = 0; c < v.cols(); ++c)
        if (!linalg::in_span(rel, v.col(c))) return false;
    return true;
}

bool eq_mod(const Mat& a, const Mat& b, const Mat& rel) { return in_rel(rel, a - b); }

// All nonzero entries of v sit in degree t.
bool homogeneous_of(const GradedModule& m, const std::vector<int64_t>& v, int t) {
    for (int i = 0; i < static_cast<int>(v.size()); ++i)
        if (linalg::mod_reduce(v[i], m.mod().value()) != 0 && m.degree(i) != t) return false;
    return true;
}

void append_rel_degrees(const GradedModule& m, const Mat& rel, std::vector<int>& out) {
    for (int c = 0; c < rel.cols(); ++c)
        out.push_back(alg::column_degree(m, rel.col(c)).value_or(0));
}

// Stacked linear system over the window, with per-column degrees for the
// homogeneous kernel routine.  Leading blocks are the (c, gamma) or
// (a, alpha) coordinates, trailing blocks absorb the relation spans.
struct Stacked {
    Mat m;
    std::vector<int> col_deg;
    int c_cols = 0;
    int g_cols = 0;
};

// Conditions for (c, gamma) at position n to be a b-cycle:
// rows are mod0(n-1) then mod1(n-2).
Stacked cycle_system(const SecondaryComplex& c, int n) {
    Modulus mod = c.mod();
    Mat r0 = c.rel0(n - 1), r1 = c.rel1(n - 2);
    Mat top = Mat::hcat(Mat::hcat(c.d0(n - 1).mat(), c.bdry(n - 1).mat().negated()),
                        Mat::hcat(r0, Mat::zero(c.mod0(n - 1)->dim(), r1.cols(), mod)));
    Mat bot = Mat::hcat(Mat::hcat(c.delta(n - 2).mat(), c.d1(n - 2).mat().negated()),
                        Mat::hcat(Mat::zero(c.mod1(n - 2)->dim(), r0.cols(), mod), r1));
    Stacked s;
    s.m = Mat::vcat(top, bot);
    s.c_cols = c.mod0(n)->dim();
    s.g_cols = c.mod1(n - 1)->dim();
    for (int i = 0; i < s.c_cols; ++i) s.col_deg.push_back(c.mod0(n)->degree(i));
    for (int i = 0; i < s.g_cols; ++i) s.col_deg.push_back(c.mod1(n - 1)->degree(i));
    append_rel_degrees(*c.mod0(n - 1), r0, s.col_deg);
    append_rel_degrees(*c.mod1(n - 2), r1, s.col_deg);
    return s;
}

// Conditions for (a, alpha) to witness (c, gamma) at position n as a
// boundary: rows are mod0(n) then mod1(n-1).
Stacked boundary_system(const SecondaryComplex& c, int n) {
    Modulus mod = c.mod();
    Mat r0 = c.rel0(n), r1 = c.rel1(n - 1);
    Mat top = Mat::hcat(Mat::hcat(c.d0(n).mat(), c.bdry(n).mat()),
                        Mat::hcat(r0, Mat::zero(c.mod0(n)->dim(), r1.cols(), mod)));
    Mat bot = Mat::hcat(Mat::hcat(c.delta(n - 1).mat(), c.d1(n - 1).mat()),
                        Mat::hcat(Mat::zero(c.mod1(n - 1)->dim(), r0.cols(), mod), r1));
    Stacked s;
    s.m = Mat::vcat(top, bot);
    s.c_cols = c.mod0(n + 1)->dim();
    s.g_cols = c.mod1(n)->dim();
    for (int i = 0; i < s.c_cols; ++i) s.col_deg.push_back(c.mod0(n + 1)->degree(i));
    for (int i = 0; i < s.g_cols; ++i) s.col_deg.push_back(c.mod1(n)->degree(i));
    append_rel_degrees(*c.mod0(n), r0, s.col_deg);
    append_rel_degrees(*c.mod1(n - 1), r1, s.col_deg);
    return s;
}

void check_chain_shape(const SecondaryComplex& c, const BCycle& z) {
    if (static_cast<int>(z.c.size()) != c.mod0(z.n)->dim())
        fail("chain: c has the wrong dimension at position " + std::to_string(z.n));
    if (static_cast<int>(z.gamma.size()) != c.mod1(z.n - 1)->dim())
        fail("chain: gamma has the wrong dimension at position " + std::to_string(z.n));
}

}  // namespace

// ---------------------------------------------------------------------------
// Accessors

int SecondaryComplex::count() const {
    return kind == Kind::pair ? static_cast<int>(pobj.size()) : static_cast<int>(sobj.size());
}

ModulePtr SecondaryComplex::zero_module() const { return GradedModule::zero(algebra); }

Modulus SecondaryComplex::mod() const { return algebra->mod(); }

ModulePtr SecondaryComplex::mod0(int n) const {
    if (!in_window(n)) return zero_module();
    return kind == Kind::pair ? pobj[n - base].m0() : sobj[n - base].module();
}

ModulePtr SecondaryComplex::mod1(int n) const {
    if (!in_window(n)) return zero_module();
    return kind == Kind::pair ? pobj[n - base].m1() : sobj[n - base].module();
}

ModuleMap SecondaryComplex::d0(int n) const {
    if (n < base || n + 1 > top()) return ModuleMap::zero(mod0(n + 1), mod0(n), 0);
    return kind == Kind::pair ? pd[n - base].f0 : sd[n - base];
}

ModuleMap SecondaryComplex::d1(int n) const {
    if (n < base || n + 1 > top()) return ModuleMap::zero(mod1(n + 1), mod1(n), 0);
    return kind == Kind::pair ? pd[n - base].f1 : sd[n - base];
}

ModuleMap SecondaryComplex::bdry(int n) const {
    if (!in_window(n)) return ModuleMap::zero(mod1(n), mod0(n), 0);
    if (kind == Kind::pair) return pobj[n - base].boundary;
    ModulePtr m = sobj[n - base].module();
    return ModuleMap(m, m, 0, Mat::identity(m->dim(), mod()).scaled(mod().p));
}

ModuleMap SecondaryComplex::delta(int n) const {
    int i = n - base;
    if (i < 0 || i >= static_cast<int>(del.size())) return ModuleMap::zero(mod0(n + 2), mod1(n), 0);
    return del[i];
}

Mat SecondaryComplex::rel0(int n) const {
    if (kind == Kind::square && in_window(n)) return sobj[n - base].rel;
    return Mat::zero(mod0(n)->dim(), 0, mod());
}

Mat SecondaryComplex::rel1(int n) const {
    if (kind == Kind::square && in_window(n)) return sobj[n - base].rel;
    return Mat::zero(mod1(n)->dim(), 0, mod());
}

// ---------------------------------------------------------------------------
// Construction

SecondaryComplex make_pair_complex(AlgebraPtr algebra, int base,
                                   std::vector<track::PairObject> objects,
                                   std::vector<track::PairMap> diffs,
                                   std::vector<ModuleMap> deltas) {
    if (!algebra) fail("pair complex: missing algebra");
    if (algebra->mod().square) fail("pair complex: the pair instantiation lives over the prime algebra");
    if (objects.empty()) fail("pair complex: no objects");
    if (diffs.size() + 1 != objects.size()) fail("pair complex: need one differential per adjacent pair");
    size_t want = objects.size() >= 2 ? objects.size() - 2 : 0;
    if (deltas.size() != want) fail("pair complex: need one delta per position with two successors");
    for (const auto& o : objects)
        if (!o.m0()->algebra()->same_as(*algebra)) fail("pair complex: object over a different algebra");
    for (size_t i = 0; i < diffs.size(); ++i) {
        if (!diffs[i].src.same_as(objects[i + 1]) || !diffs[i].dst.same_as(objects[i]))
            fail("pair complex: differential endpoints do not match the object chain");
        if (diffs[i].t() != 0) fail("pair complex: differentials must have degree 0");
    }
    for (size_t i = 0; i < deltas.size(); ++i) {
        if (!deltas[i].src()->same_as(*objects[i + 2].m0()) ||
            !deltas[i].dst()->same_as(*objects[i].m1()))
            fail("pair complex: delta endpoints do not match the object chain");
        if (deltas[i].t() != 0) fail("pair complex: deltas must have degree 0");
    }
    SecondaryComplex c;
    c.kind = Kind::pair;
    c.algebra = std::move(algebra);
    c.base = base;
    c.pobj = std::move(objects);
    c.pd = std::move(diffs);
    c.del = std::move(deltas);
    return c;
}

SecondaryComplex make_square_complex(AlgebraPtr lift, int base,
                                     std::vector<track::SqObject> objects,
                                     std::vector<ModuleMap> diffs,
                                     std::vector<ModuleMap> deltas) {
    if (!lift) fail("square complex: missing algebra");
    if (!lift->mod().square) fail("square complex: the square instantiation lives over the lift algebra");
    if (objects.empty()) fail("square complex: no objects");
    if (diffs.size() + 1 != objects.size()) fail("square complex: need one differential per adjacent pair");
    size_t want = objects.size() >= 2 ? objects.size() - 2 : 0;
    if (deltas.size() != want) fail("square complex: need one delta per position with two successors");
    for (const auto& o : objects)
        if (!o.module()->algebra()->same_as(*lift)) fail("square complex: object over a different algebra");
    for (size_t i = 0; i < diffs.size(); ++i) {
        if (!diffs[i].src()->same_as(*objects[i + 1].module()) ||
            !diffs[i].dst()->same_as(*objects[i].module()))
            fail("square complex: differential endpoints do not match the object chain");
        if (diffs[i].t() != 0) fail("square complex: differentials must have degree 0");
    }
    for (size_t i = 0; i < deltas.size(); ++i) {
        if (!deltas[i].src()->same_as(*objects[i + 2].module()) ||
            !deltas[i].dst()->same_as(*objects[i].module()))
            fail("square complex: delta endpoints do not match the object chain");
        if (deltas[i].t() != 0) fail("square complex: deltas must have degree 0");
    }
    SecondaryComplex c;
    c.kind = Kind::square;
    c.algebra = std::move(lift);
    c.base = base;
    c.sobj = std::move(objects);
    c.sd = std::move(diffs);
    c.del = std::move(deltas);
    return c;
}

// ---------------------------------------------------------------------------
// Validation

ValidationReport validate_secondary(const SecondaryComplex& c) {
    if (c.count() < 3)
        throw std::invalid_argument(
            "validate_secondary: window holds fewer than three objects, no track identity is expressible");
    for (int n = c.base - 2; n <= c.top(); ++n) {
        ModuleMap l1 = c.d1(n) * c.d1(n + 1);
        ModuleMap r1 = c.delta(n) * c.bdry(n + 2);
        if (!eq_mod(l1.mat(), r1.mat(), c.rel1(n))) return {false, n, "d1 d1 != delta bdry"};
        ModuleMap l0 = c.d0(n) * c.d0(n + 1);
        ModuleMap r0 = c.bdry(n) * c.delta(n);
        if (!eq_mod(l0.mat(), r0.mat(), c.rel0(n))) return {false, n, "d0 d0 != bdry delta"};
        ModuleMap lc = c.d1(n - 1) * c.delta(n);
        ModuleMap rc = c.delta(n - 1) * c.d0(n + 1);
        if (!eq_mod(lc.mat(), rc.mat(), c.rel1(n - 1))) return {false, n, "d1 delta != delta d0"};
    }
    return {};
}

// ---------------------------------------------------------------------------
// b-cycles and b-boundaries

bool is_b_cycle(const SecondaryComplex& c, const BCycle& z) {
    check_chain_shape(c, z);
    if (!homogeneous_of(*c.mod0(z.n), z.c, z.t) ||
        !homogeneous_of(*c.mod1(z.n - 1), z.gamma, z.t))
        return false;
    Modulus mod = c.mod();
    Mat cv = Mat::col_vector(z.c, mod), gv = Mat::col_vector(z.gamma, mod);
    Mat e0 = c.d0(z.n - 1).mat() * cv - c.bdry(z.n - 1).mat() * gv;
    Mat e1 = c.delta(z.n - 2).mat() * cv - c.d1(z.n - 2).mat() * gv;
    return in_rel(c.rel0(z.n - 1), e0) && in_rel(c.rel1(z.n - 2), e1);
}

std::optional<BoundaryWitness> is_b_boundary(const SecondaryComplex& c, const BCycle& z) {
    check_chain_shape(c, z);
    if (!homogeneous_of(*c.mod0(z.n), z.c, z.t) ||
        !homogeneous_of(*c.mod1(z.n - 1), z.gamma, z.t))
        fail("is_b_boundary: chain is not homogeneous of the stated degree");
    Stacked s = boundary_system(c, z.n);
    std::vector<int64_t> rhs = z.c;
    rhs.insert(rhs.end(), z.gamma.begin(), z.gamma.end());
    linalg::LinearSolution sol = linalg::solve_linear(s.m, rhs);
    if (!sol.solvable) return std::nullopt;

    // The system is degree-preserving and the right side homogeneous, so the
    // degree-t part of any solution solves again; project and drop the
    // relation coordinates (they only relax the equations mod rel).
    BoundaryWitness w;
    int ad = c.mod0(z.n + 1)->dim(), gd = c.mod1(z.n)->dim();
    w.a.assign(ad, 0);
    w.alpha.assign(gd, 0);
    for (int i = 0; i < ad; ++i)
        if (c.mod0(z.n + 1)->degree(i) == z.t) w.a[i] = sol.particular[i];
    for (int i = 0; i < gd; ++i)
        if (c.mod1(z.n)->degree(i) == z.t) w.alpha[i] = sol.particular[ad + i];

    Modulus mod = c.mod();
    Mat av = Mat::col_vector(w.a, mod), lv = Mat::col_vector(w.alpha, mod);
    Mat cv = Mat::col_vector(z.c, mod), gv = Mat::col_vector(z.gamma, mod);
    Mat e0 = c.d0(z.n).mat() * av + c.bdry(z.n).mat() * lv - cv;
    Mat e1 = c.delta(z.n - 1).mat() * av + c.d1(z.n - 1).mat() * lv - gv;
    if (!in_rel(c.rel0(z.n), e0) || !in_rel(c.rel1(z.n - 1), e1))
        throw std::logic_error("is_b_boundary: homogeneous projection failed to solve");
    return w;
}

std::vector<BCycle> b_cycle_generators(const SecondaryComplex& c, int n) {
    Stacked s = cycle_system(c, n);
    Mat k = alg::homogeneous_kernel(s.m, s.col_deg);
    int64_t mv = c.mod().value();
    std::vector<BCycle> out;
    for (int j = 0; j < k.cols(); ++j) {
        std::vector<int64_t> col = k.col(j);
        BCycle z;
        z.n = n;
        z.c.assign(col.begin(), col.begin() + s.c_cols);
        z.gamma.assign(col.begin() + s.c_cols, col.begin() + s.c_cols + s.g_cols);
        bool nonzero = false;
        for (int i = 0; i < s.c_cols + s.g_cols; ++i) {
            if (linalg::mod_reduce(col[i], mv) != 0) {
                z.t = s.col_deg[i];
                nonzero = true;
                break;
            }
        }
        if (nonzero) out.push_back(std::move(z));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exactness

BExactReport is_b_exact(const SecondaryComplex& c, int lo, int hi, int t_cap) {
    if (lo < c.base || hi > c.top() - 1 || lo > hi)
        fail("is_b_exact: positions must lie between base and top - 1");
    for (int n = lo; n <= hi; ++n) {
        for (const BCycle& z : b_cycle_generators(c, n)) {
            if (z.t > t_cap) continue;
            if (!is_b_boundary(c, z)) return {false, n};
        }
    }
    return {};
}

homalg::ChainComplex total_complex(const SecondaryComplex& c) {
    if (c.kind != Kind::pair) fail("total_complex: defined for the pair instantiation");
    int m = c.count();
    std::vector<alg::DirectSum> sums;
    for (int k = 0; k <= m; ++k)
        sums.push_back(alg::direct_sum(c.mod0(c.base + k), c.mod1(c.base + k - 1)));
    homalg::ChainComplex t;
    for (const auto& s : sums) t.modules.push_back(s.module);
    for (int k = 0; k < m; ++k) {
        int n = c.base + k;
        const auto& lo = sums[k];
        const auto& hi = sums[k + 1];
        Mat d = lo.in1 * c.d0(n).mat() * hi.pr1 - lo.in1 * c.bdry(n).mat() * hi.pr2 +
                lo.in2 * c.delta(n - 1).mat() * hi.pr1 - lo.in2 * c.d1(n - 1).mat() * hi.pr2;
        t.diffs.emplace_back(hi.module, lo.module, 0, d);
    }
    t.validate();
    return t;
}

BExactReport is_b_exact_total(const SecondaryComplex& c, int hi, int t_cap) {
    if (hi < c.base || hi > c.top() - 1) fail("is_b_exact_total: position out of range");
    homalg::ChainComplex t = total_complex(c);
    int keep = hi - c.base + 1;  // modules 0..keep, diffs 0..keep-1
    t.modules.resize(keep + 1);
    t.diffs.resize(keep);
    ModulePtr z = GradedModule::zero(c.algebra);
    ModuleMap aug = ModuleMap::zero(t.modules[0], z, 0);
    homalg::ExactnessReport rep = homalg::is_a_exact(t, aug, t_cap);
    BExactReport out;
    out.exact = rep.exact;
    if (!rep.exact) out.first_failure = c.base + rep.first_failure;
    return out;
}

// ---------------------------------------------------------------------------
// The resolution builder

namespace {

SecondaryAugmented build_impl(const track::TrackInstance& inst, const BuildOptions& opt,
                              std::vector<track::PairObject> pobjs,
                              std::vector<track::SqObject> sobjs) {
    if (opt.s_max < 0) fail("build_secondary_resolution: s_max must be nonnegative");
    Kind kind = inst.kind;
    AlgebraPtr a = inst.algebra;
    Modulus mod = a->mod();
    std::vector<track::PairMap> pds;
    std::vector<ModuleMap> sds;
    std::vector<ModuleMap> dels;
    bool truncated = false;

    auto assemble = [&]() {
        return kind == Kind::pair ? make_pair_complex(a, -1, pobjs, pds, dels)
                                  : make_square_complex(a, -1, sobjs, sds, dels);
    };

    for (int stage = 0; stage <= opt.s_max; ++stage) {
        SecondaryComplex c = assemble();
        int n = stage - 1;  // cycles at this position feed the next object

        Stacked s = cycle_system(c, n);
        Mat k = alg::homogeneous_kernel(s.m, s.col_deg);
        int cd = s.c_cols, gd = s.g_cols;
        std::vector<std::vector<int64_t>> cand;
        std::vector<int> cand_deg;
        int64_t mv = mod.value();
        for (int j = 0; j < k.cols(); ++j) {
            std::vector<int64_t> col = k.col(j);
            col.resize(cd + gd);  // drop relation coordinates
            int deg = 0;
            bool nonzero = false;
            for (int i = 0; i < cd + gd; ++i)
                if (linalg::mod_reduce(col[i], mv) != 0) {
                    deg = s.col_deg[i];
                    nonzero = true;
                    break;
                }
            if (!nonzero) continue;
            cand.push_back(std::move(col));
            cand_deg.push_back(deg);
        }
        if (opt.reverse_candidates) {
            std::reverse(cand.begin(), cand.end());
            std::reverse(cand_deg.begin(), cand_deg.end());
        }
        Mat cand_m(cd + gd, static_cast<int>(cand.size()), mod);
        for (int j = 0; j < static_cast<int>(cand.size()); ++j)
            for (int i = 0; i < cd + gd; ++i) cand_m.set(i, j, cand[j][i]);

        // Already-hit cycles seed the exclusion span: boundary witnesses with
        // no a-component, (bdry alpha, d1 alpha), plus the relation spans.
        Mat r0 = c.rel0(n), r1 = c.rel1(n - 1);
        Mat seed = Mat::hcat(
            Mat::vcat(c.bdry(n).mat(), c.d1(n - 1).mat()),
            Mat::hcat(Mat::vcat(r0, Mat::zero(gd, r0.cols(), mod)),
                      Mat::vcat(Mat::zero(cd, r1.cols(), mod), r1)));
        alg::DirectSum ds = alg::direct_sum(c.mod0(n), c.mod1(n - 1));
        std::vector<int> chosen = alg::minimal_generator_columns(*ds.module, cand_m, seed);

        std::vector<BasisElem> gens;
        std::vector<int> kept;
        for (int idx : chosen) {
            if (cand_deg[idx] > opt.t_max) {
                truncated = true;
                continue;
            }
            gens.push_back({"s" + std::to_string(stage) + "g" + std::to_string(kept.size()),
                            cand_deg[idx]});
            kept.push_back(idx);
        }
        Mat cparts(cd, static_cast<int>(kept.size()), mod);
        Mat gparts(gd, static_cast<int>(kept.size()), mod);
        for (int j = 0; j < static_cast<int>(kept.size()); ++j) {
            for (int i = 0; i < cd; ++i) cparts.set(i, j, cand[kept[j]][i]);
            for (int i = 0; i < gd; ++i) gparts.set(i, j, cand[kept[j]][cd + i]);
        }

        FreeModule fm = alg::free_module(a, gens);
        ModuleMap dmap = alg::map_from_generator_images(fm, c.mod0(n), 0, cparts);
        if (kind == Kind::pair) {
            track::PairObject obj = track::b_object(fm);
            ModuleMap f1 = ModuleMap::zero(obj.m1(), c.mod1(n), 0);
            pds.emplace_back(obj, pobjs.back(), f1, dmap);
            pobjs.push_back(std::move(obj));
        } else {
            sds.push_back(dmap);
            sobjs.push_back(track::sq_object(fm));
        }
        if (stage >= 1) dels.push_back(alg::map_from_generator_images(fm, c.mod1(n - 1), 0, gparts));
    }

    // Trim stages that stabilized at zero.
    auto objects = [&]() { return kind == Kind::pair ? pobjs.size() : sobjs.size(); };
    auto last_dim = [&]() {
        return kind == Kind::pair ? pobjs.back().total_dim() : sobjs.back().module()->dim();
    };
    while (objects() > 2 && last_dim() == 0) {
        if (kind == Kind::pair) {
            pobjs.pop_back();
            pds.pop_back();
        } else {
            sobjs.pop_back();
            sds.pop_back();
        }
        if (dels.size() > objects() - 2) dels.pop_back();
    }

    SecondaryComplex fin = assemble();
    if (fin.count() >= 3) {
        ValidationReport rep = validate_secondary(fin);
        if (!rep.ok)
            throw std::logic_error("build_secondary_resolution: output failed validation at position " +
                                   std::to_string(rep.first_failure) + " (" + rep.what + ")");
    }
    BExactReport ex = is_b_exact(fin, -1, fin.top() - 1, truncated ? opt.t_max : unbounded);
    if (!ex.exact)
        throw std::logic_error("build_secondary_resolution: output not b-exact at position " +
                               std::to_string(ex.first_failure));
    return {std::move(fin), truncated};
}

}  // namespace

SecondaryAugmented build_secondary_resolution(const track::TrackInstance& inst,
                                              const track::PairObject& b,
                                              const BuildOptions& opt) {
    if (inst.kind != Kind::pair) fail("build_secondary_resolution: pair object wants the pair instance");
    if (!b.m0()->algebra()->same_as(*inst.algebra))
        fail("build_secondary_resolution: object over a different algebra");
    return build_impl(inst, opt, {b}, {});
}

SecondaryAugmented build_secondary_resolution(const track::TrackInstance& inst,
                                              const track::SqObject& b,
                                              const BuildOptions& opt) {
    if (inst.kind != Kind::square)
        fail("build_secondary_resolution: square object wants the square instance");
    if (!b.module()->algebra()->same_as(*inst.algebra))
        fail("build_secondary_resolution: object over a different algebra");
    return build_impl(inst, opt, {}, {b});
}

// ---------------------------------------------------------------------------
// Maps

ModuleMap SecondaryMap::fc(int n) const {
    int i = n - src.base;
    int sz = src.kind == Kind::pair ? static_cast<int>(pf.size()) : static_cast<int>(sf.size());
    if (i < 0 || i >= sz) return ModuleMap::zero(src.mod0(n), dst.mod0(n), 0);
    return src.kind == Kind::pair ? pf[i].f0 : sf[i];
}

ModuleMap SecondaryMap::fg(int n) const {
    int i = n - src.base;
    int sz = src.kind == Kind::pair ? static_cast<int>(pf.size()) : static_cast<int>(sf.size());
    if (i < 0 || i >= sz) return ModuleMap::zero(src.mod1(n), dst.mod1(n), 0);
    return src.kind == Kind::pair ? pf[i].f1 : sf[i];
}

ModuleMap SecondaryMap::track(int n) const {
    int i = n - src.base;
    if (i < 0 || i >= static_cast<int>(phi.size()))
        return ModuleMap::zero(src.mod0(n + 1), dst.mod1(n), 0);
    return phi[i];
}

MapReport validate_secondary_map(const SecondaryMap& m) {
    if (m.src.kind != m.dst.kind) fail("map: mixed instantiations");
    if (m.src.base != m.dst.base) fail("map: windows must share the base position");
    if (m.dst.count() < m.src.count()) fail("map: target window shorter than source window");
    int cnt = m.src.count();
    int fsz = m.src.kind == Kind::pair ? static_cast<int>(m.pf.size()) : static_cast<int>(m.sf.size());
    if (fsz != cnt) fail("map: need one component per source object");
    if (static_cast<int>(m.phi.size()) + 1 != cnt) fail("map: need one track per adjacent pair");
    for (int i = 0; i < cnt; ++i) {
        bool ok = m.src.kind == Kind::pair
                      ? m.pf[i].src.same_as(m.src.pobj[i]) && m.pf[i].dst.same_as(m.dst.pobj[i])
                      : m.sf[i].src()->same_as(*m.src.sobj[i].module()) &&
                            m.sf[i].dst()->same_as(*m.dst.sobj[i].module());
        if (!ok) fail("map: component endpoints do not match at index " + std::to_string(i));
    }

    for (int n = m.src.base - 2; n <= m.src.top() + 2; ++n) {
        // phi_n is a track f_n d_n => d_n f_{n+1}.
        Mat t1l = (m.track(n) * m.src.bdry(n + 1)).mat();
        Mat t1r = (m.fg(n) * m.src.d1(n)).mat() - (m.dst.d1(n) * m.fg(n + 1)).mat();
        if (!eq_mod(t1l, t1r, m.dst.rel1(n))) return {false, n, "track against level 1"};
        Mat t0l = (m.dst.bdry(n) * m.track(n)).mat();
        Mat t0r = (m.fc(n) * m.src.d0(n)).mat() - (m.dst.d0(n) * m.fc(n + 1)).mat();
        if (!eq_mod(t0l, t0r, m.dst.rel0(n))) return {false, n, "track against level 0"};
        // Pasting the tracks of f against both deltas.
        Mat pl = (m.fg(n - 1) * m.src.delta(n - 1)).mat();
        Mat pr = (m.dst.delta(n - 1) * m.fc(n + 1)).mat() + (m.dst.d1(n - 1) * m.track(n)).mat() +
                 (m.track(n - 1) * m.src.d0(n)).mat();
        if (!eq_mod(pl, pr, m.dst.rel1(n - 1))) return {false, n, "delta pasting"};
    }
    return {};
}

SecondaryMap identity_secondary_map(const SecondaryComplex& c) {
    SecondaryMap m;
    m.src = c;
    m.dst = c;
    for (int i = 0; i < c.count(); ++i) {
        if (c.kind == Kind::pair)
            m.pf.push_back(track::pair_identity(c.pobj[i]));
        else
            m.sf.push_back(ModuleMap::identity(c.sobj[i].module()));
    }
    for (int i = 0; i + 1 < c.count(); ++i)
        m.phi.push_back(ModuleMap::zero(c.mod0(c.base + i + 1), c.mod1(c.base + i), 0));
    return m;
}

namespace {

bool complex_match(const SecondaryComplex& a, const SecondaryComplex& b) {
    if (a.kind != b.kind || a.base != b.base || a.count() != b.count()) return false;
    for (int n = a.base; n <= a.top(); ++n) {
        if (!a.mod0(n)->same_as(*b.mod0(n)) || !a.mod1(n)->same_as(*b.mod1(n))) return false;
        if (a.rel0(n) != b.rel0(n)) return false;
        if (a.bdry(n).mat() != b.bdry(n).mat()) return false;
        if (n < a.top() && (a.d0(n).mat() != b.d0(n).mat() || a.d1(n).mat() != b.d1(n).mat()))
            return false;
        if (a.delta(n).mat() != b.delta(n).mat()) return false;
    }
    return true;
}

}  // namespace

SecondaryMap compose_secondary(const SecondaryMap& g, const SecondaryMap& f) {
    if (!complex_match(f.dst, g.src)) fail("compose: middle complexes do not match");
    SecondaryMap out;
    out.src = f.src;
    out.dst = g.dst;
    int cnt = f.src.count();
    for (int i = 0; i < cnt; ++i) {
        if (f.src.kind == Kind::pair)
            out.pf.push_back(g.pf[i] * f.pf[i]);
        else
            out.sf.push_back(g.sf[i] * f.sf[i]);
    }
    for (int i = 0; i + 1 < cnt; ++i) {
        int n = f.src.base + i;
        out.phi.push_back(g.fg(n) * f.track(n) + g.track(n) * f.fc(n + 1));
    }
    return out;
}

SecondaryMap secondary_lift(const SecondaryAugmented& src_a, const SecondaryAugmented& dst_a) {
    const SecondaryComplex& s = src_a.c;
    const SecondaryComplex& d = dst_a.c;
    if (s.kind != d.kind) fail("secondary_lift: mixed instantiations");
    if (s.base != -1 || d.base != -1) fail("secondary_lift: expected augmented complexes (base -1)");
    if (d.top() < s.top())
        throw std::runtime_error("secondary_lift: target window shorter than the source window");
    bool pairk = s.kind == Kind::pair;
    if (pairk ? !s.pobj[0].same_as(d.pobj[0]) : !s.sobj[0].same_as(d.sobj[0]))
        fail("secondary_lift: the resolved objects differ");

    Modulus mod = s.mod();
    SecondaryMap m;
    m.src = s;
    m.dst = d;
    if (pairk) {
        const track::PairObject& b = s.pobj[0];
        m.pf.emplace_back(
            b, d.pobj[0],
            ModuleMap(b.m1(), d.pobj[0].m1(), 0, Mat::identity(b.m1()->dim(), mod)),
            ModuleMap(b.m0(), d.pobj[0].m0(), 0, Mat::identity(b.m0()->dim(), mod)));
    } else {
        m.sf.emplace_back(s.sobj[0].module(), d.sobj[0].module(), 0,
                          Mat::identity(s.sobj[0].module()->dim(), mod));
    }

    for (int n = -1; n <= s.top() - 1; ++n) {
        const FreeModule* fm = nullptr;
        if (pairk) {
            if (!s.pobj[n + 2].free0)
                fail("secondary_lift: source object has no recorded free generators");
            fm = &*s.pobj[n + 2].free0;
        } else {
            if (!s.sobj[n + 2].is_free()) fail("secondary_lift: source objects must be free");
            fm = &s.sobj[n + 2].cover;
        }
        int ng = fm->gen_count();
        Mat fimg(d.mod0(n + 1)->dim(), ng, mod);
        Mat pimg(d.mod1(n)->dim(), ng, mod);
        for (int g = 0; g < ng; ++g) {
            std::vector<int64_t> gv = fm->generator_vector(g);
            std::vector<int64_t> dg = s.d0(n).apply(gv);
            std::vector<int64_t> cg = m.fc(n).apply(dg);
            Mat g1 = Mat::col_vector(m.fg(n - 1).apply(s.delta(n - 1).apply(gv)), mod);
            Mat g2 = Mat::col_vector(m.track(n - 1).apply(dg), mod);
            BCycle z{n, fm->gens[g].degree, cg, (g1 - g2).col(0)};
            if (!is_b_cycle(d, z))
                throw std::logic_error("secondary_lift: generator image is not a b-cycle at position " +
                                       std::to_string(n));
            std::optional<BoundaryWitness> w = is_b_boundary(d, z);
            if (!w)
                throw std::runtime_error("secondary_lift: target fails b-exactness at position " +
                                         std::to_string(n));
            for (int r = 0; r < fimg.rows(); ++r) fimg.set(r, g, w->a[r]);
            for (int r = 0; r < pimg.rows(); ++r) pimg.set(r, g, w->alpha[r]);
        }
        ModuleMap fnext = alg::map_from_generator_images(*fm, d.mod0(n + 1), 0, fimg);
        if (pairk) {
            ModuleMap f1 = ModuleMap::zero(s.pobj[n + 2].m1(), d.pobj[n + 2].m1(), 0);
            m.pf.emplace_back(s.pobj[n + 2], d.pobj[n + 2], f1, fnext);
        } else {
            m.sf.push_back(fnext);
        }
        m.phi.push_back(alg::map_from_generator_images(*fm, d.mod1(n), 0, pimg));
    }

    MapReport rep = validate_secondary_map(m);
    if (!rep.ok)
        throw std::logic_error("secondary_lift: produced an invalid map at position " +
                               std::to_string(rep.first_failure) + " (" + rep.what + ")");
    return m;
}

// ---------------------------------------------------------------------------
// Coaugmented sequences

namespace {

// Does any track f => 0 exist?  phi ranges over the degree-t hom space; the
// two strict equations are linear in its coefficients.
bool pair_track_to_zero_exists(const track::PairMap& f) {
    std::vector<ModuleMap> hom = alg::hom_space(f.src.m0(), f.dst.m1(), f.t());
    Modulus mod = f.f0.mat().mod();
    Mat db = f.src.boundary.mat();
    Mat dy = f.dst.boundary.mat();
    std::vector<int64_t> rhs = f.f1.mat().flattened();
    std::vector<int64_t> low = f.f0.mat().flattened();
    rhs.insert(rhs.end(), low.begin(), low.end());
    Mat sys(static_cast<int>(rhs.size()), static_cast<int>(hom.size()), mod);
    for (int k = 0; k < static_cast<int>(hom.size()); ++k) {
        std::vector<int64_t> c1 = (hom[k].mat() * db).flattened();
        std::vector<int64_t> c0 = (dy * hom[k].mat()).flattened();
        for (int i = 0; i < static_cast<int>(c1.size()); ++i) sys.set(i, k, c1[i]);
        for (int i = 0; i < static_cast<int>(c0.size()); ++i)
            sys.set(static_cast<int>(c1.size()) + i, k, c0[i]);
    }
    return linalg::solve_linear(sys, rhs).solvable;
}

}  // namespace

SecondaryComplex from_sequence(AlgebraPtr algebra, const std::vector<track::PairMap>& i,
                               const std::vector<track::PairMap>& p,
                               const std::vector<ModuleMap>& alpha) {
    size_t nn = i.size();
    if (nn == 0) fail("from_sequence: need at least one factorization");
    if (p.size() != nn) fail("from_sequence: need matching i and p lists");
    if (alpha.size() + 1 != nn) fail("from_sequence: need one alpha per adjacent pair");
    for (size_t k = 0; k < nn; ++k) {
        if (!i[k].src.same_as(p[k].dst)) fail("from_sequence: i and p do not share the intermediate object");
        if (i[k].t() != 0 || p[k].t() != 0) fail("from_sequence: maps must have degree 0");
        if (k + 1 < nn && !p[k].src.same_as(i[k + 1].dst))
            fail("from_sequence: adjacent factorizations do not share the object");
    }
    for (size_t k = 0; k + 1 < nn; ++k) {
        track::PairMap pi = p[k] * i[k + 1];
        bool datum_ok = alpha[k].t() == 0 &&
                        alpha[k].src()->same_as(*pi.src.m0()) &&
                        alpha[k].dst()->same_as(*pi.dst.m1()) &&
                        alpha[k].mat() * pi.src.boundary.mat() == pi.f1.mat() &&
                        pi.dst.boundary.mat() * alpha[k].mat() == pi.f0.mat();
        if (!datum_ok) {
            if (!pair_track_to_zero_exists(pi))
                fail("from_sequence: p i is not track-trivializable at step " + std::to_string(k));
            fail("from_sequence: alpha is not a track datum at step " + std::to_string(k));
        }
    }

    std::vector<track::PairObject> objects;
    for (size_t k = 0; k < nn; ++k) objects.push_back(i[k].dst);
    objects.push_back(p[nn - 1].src);
    std::vector<track::PairMap> diffs;
    for (size_t k = 0; k < nn; ++k) diffs.push_back(i[k] * p[k]);
    std::vector<ModuleMap> deltas;
    for (size_t k = 0; k + 1 < nn; ++k)
        deltas.emplace_back(objects[k + 2].m0(), objects[k].m1(), 0,
                            i[k].f1.mat() * alpha[k].mat() * p[k + 1].f0.mat());

    // Coherence of adjacent deltas reduces to (p i) alpha = alpha (p i),
    // which is forced: both sides equal alpha' d alpha-style composites by
    // the two strict equations each alpha satisfies.
    for (size_t k = 0; k + 2 < nn; ++k) {
        Mat lhs = (p[k] * i[k + 1]).f1.mat() * alpha[k + 1].mat();
        Mat rhs = alpha[k].mat() * (p[k + 1] * i[k + 2]).f0.mat();
        if (lhs != rhs)
            throw std::logic_error("from_sequence: the whiskering identity failed at step " +
                                   std::to_string(k));
    }

    SecondaryComplex c = make_pair_complex(std::move(algebra), 0, std::move(objects),
                                           std::move(diffs), std::move(deltas));
    if (c.count() >= 3) {
        ValidationReport rep = validate_secondary(c);
        if (!rep.ok)
            throw std::logic_error("from_sequence: output failed validation at position " +
                                   std::to_string(rep.first_failure) + " (" + rep.what + ")");
    }
    return c;
}

SecondaryComplex from_sequence(AlgebraPtr lift, const std::vector<track::SqObject>& objects,
                               const std::vector<ModuleMap>& i, const std::vector<ModuleMap>& p,
                               const std::vector<ModuleMap>& alpha) {
    size_t nn = i.size();
    if (nn == 0) fail("from_sequence: need at least one factorization");
    if (p.size() != nn) fail("from_sequence: need matching i and p lists");
    if (alpha.size() + 1 != nn) fail("from_sequence: need one alpha per adjacent pair");
    if (objects.size() != nn + 1) fail("from_sequence: need one object per column");
    int64_t prime = lift->mod().p;
    for (size_t k = 0; k < nn; ++k) {
        if (!i[k].src()->same_as(*p[k].dst()))
            fail("from_sequence: i and p do not share the intermediate module");
        if (!i[k].dst()->same_as(*objects[k].module()) ||
            !p[k].src()->same_as(*objects[k + 1].module()))
            fail("from_sequence: factorization endpoints do not match the objects");
        if (i[k].t() != 0 || p[k].t() != 0) fail("from_sequence: maps must have degree 0");
    }
    for (size_t k = 0; k + 1 < nn; ++k) {
        ModuleMap pi = p[k] * i[k + 1];
        bool datum_ok = alpha[k].t() == 0 && alpha[k].src()->same_as(*pi.src()) &&
                        alpha[k].dst()->same_as(*pi.dst()) &&
                        alpha[k].mat().scaled(prime) == pi.mat();
        if (!datum_ok) {
            bool divisible = true;
            for (int r = 0; r < pi.mat().rows() && divisible; ++r)
                for (int cc = 0; cc < pi.mat().cols(); ++cc)
                    if (linalg::mod_reduce(pi.mat().at(r, cc), prime) != 0) {
                        divisible = false;
                        break;
                    }
            if (!divisible)
                fail("from_sequence: p i is not track-trivializable at step " + std::to_string(k));
            fail("from_sequence: alpha is not a track datum at step " + std::to_string(k));
        }
    }

    std::vector<ModuleMap> diffs;
    for (size_t k = 0; k < nn; ++k) diffs.push_back(i[k] * p[k]);
    std::vector<ModuleMap> deltas;
    for (size_t k = 0; k + 1 < nn; ++k) deltas.push_back(i[k] * alpha[k] * p[k + 1]);

    for (size_t k = 0; k + 2 < nn; ++k) {
        Mat lhs = (p[k] * i[k + 1]).mat() * alpha[k + 1].mat();
        Mat rhs = alpha[k].mat() * (p[k + 1] * i[k + 2]).mat();
        if (lhs != rhs)
            throw std::logic_error("from_sequence: the whiskering identity failed at step " +
                                   std::to_string(k));
    }

    SecondaryComplex c = make_square_complex(std::move(lift), 0, objects, std::move(diffs),
                                             std::move(deltas));
    if (c.count() >= 3) {
        ValidationReport rep = validate_secondary(c);
        if (!rep.ok)
            throw std::logic_error("from_sequence: output failed validation at position " +
                                   std::to_string(rep.first_failure) + " (" + rep.what + ")");
    }
    return c;
}

// ---------------------------------------------------------------------------
// Transfer

TransferReport hosec_transfer(const SecondaryComplex& c, int t_cap) {
    if (c.count() < 2) fail("hosec_transfer: need at least two objects");
    TransferReport r;
    homalg::ChainComplex img;
    if (c.kind == Kind::pair) {
        std::vector<alg::Quotient> qs;
        for (const auto& o : c.pobj) qs.push_back(o.pi0());
        for (const auto& q : qs) img.modules.push_back(q.module);
        for (int k = 0; k + 1 < c.count(); ++k) {
            Mat mm = qs[k].projection * c.d0(c.base + k).mat() * qs[k + 1].section;
            img.diffs.emplace_back(qs[k + 1].module, qs[k].module, 0, mm);
        }
    } else {
        std::vector<alg::Quotient> qs;
        for (const auto& o : c.sobj) {
            if (!o.is_free()) r.hypotheses_met = false;
            qs.push_back(alg::quotient_by_span(o.module()->reduced_mod_p(), o.rel.reduced_mod_p()));
        }
        for (const auto& q : qs) img.modules.push_back(q.module);
        for (int k = 0; k + 1 < c.count(); ++k) {
            Mat mm = qs[k].projection * c.d0(c.base + k).mat().reduced_mod_p() * qs[k + 1].section;
            img.diffs.emplace_back(qs[k + 1].module, qs[k].module, 0, mm);
        }
    }
    img.validate();
    ModulePtr z = GradedModule::zero(img.modules[0]->algebra());
    ModuleMap aug = ModuleMap::zero(img.modules[0], z, 0);
    homalg::ExactnessReport arep = homalg::is_a_exact(img, aug, t_cap);
    r.a_exact = arep.exact;
    if (!arep.exact) r.a_first_failure = c.base + arep.first_failure;
    BExactReport brep = is_b_exact(c, c.base, c.top() - 1, t_cap);
    r.b_exact = brep.exact;
    if (!brep.exact) r.b_first_failure = brep.first_failure;
    r.agree = r.a_exact == r.b_exact && (r.a_exact || r.a_first_failure == r.b_first_failure);
    return r;
}

homalg::Resolution image_resolution(const SecondaryAugmented& a) {
    const SecondaryComplex& c = a.c;
    if (c.base != -1) fail("image_resolution: expected an augmented complex (base -1)");
    if (c.count() < 2) fail("image_resolution: window has no resolving objects");
    homalg::Resolution res;
    if (c.kind == Kind::pair) {
        for (int k = 1; k < c.count(); ++k) {
            if (!c.pobj[k].is_b_object()) fail("image_resolution: interior objects must be free");
            res.frees.push_back(*c.pobj[k].free0);
        }
        for (const auto& f : res.frees) res.complex.modules.push_back(f.module);
        for (int j = 0; j + 2 < c.count(); ++j) res.complex.diffs.push_back(c.pd[j + 1].f0);
        alg::Quotient q = c.pobj[0].pi0();
        res.augmentation = ModuleMap(res.complex.modules[0], q.module, 0,
                                     q.projection * c.pd[0].f0.mat());
    } else {
        AlgebraPtr red = c.algebra->reduced_mod_p();
        for (int k = 1; k < c.count(); ++k) {
            if (!c.sobj[k].is_free()) fail("image_resolution: interior objects must be free");
            res.frees.push_back(alg::free_module(red, c.sobj[k].cover.gens));
        }
        for (const auto& f : res.frees) res.complex.modules.push_back(f.module);
        for (int j = 0; j + 2 < c.count(); ++j)
            res.complex.diffs.emplace_back(res.frees[j + 1].module, res.frees[j].module, 0,
                                           c.sd[j + 1].mat().reduced_mod_p());
        alg::Quotient q = alg::quotient_by_span(c.sobj[0].module()->reduced_mod_p(),
                                                c.sobj[0].rel.reduced_mod_p());
        res.augmentation = ModuleMap(res.complex.modules[0], q.module, 0,
                                     q.projection * c.sd[0].mat().reduced_mod_p());
    }
    res.truncated = a.truncated;
    res.complex.validate();
    return res;
}

SecondaryAugmented lift_resolution(const track::TrackInstance& inst, const track::PairObject& b,
                                   const BuildOptions& opt) {
    if (inst.kind != Kind::pair) fail("lift_resolution: pair object needs a pair instance");
    return build_secondary_resolution(inst, b, opt);
}

SecondaryAugmented lift_resolution(const track::TrackInstance& inst, const track::SqObject& b,
                                   const BuildOptions& opt) {
    if (inst.kind != Kind::square) fail("lift_resolution: square object needs a square instance");
    if (!b.module()->algebra()->same_as(*inst.algebra))
        fail("lift_resolution: base object lives over a different algebra");
    if (opt.s_max < 1) fail("lift_resolution: need s_max >= 1 for a track window");
    Modulus mod = inst.algebra->mod();
    int64_t p = mod.p;

    alg::Quotient q = alg::quotient_by_span(b.module()->reduced_mod_p(), b.rel.reduced_mod_p());
    homalg::Resolution cres = homalg::build_resolution(q.module, opt.s_max, opt.t_max);

    std::vector<FreeModule> lf;
    lf.reserve(cres.frees.size());
    for (const FreeModule& f : cres.frees) lf.push_back(alg::free_module(inst.algebra, f.gens));

    // Differentials lift generator images verbatim; the linear extension is
    // the canonical lift (entrywise lifting of the whole matrix need not be
    // algebra-linear over the lift).
    std::vector<ModuleMap> diffs;
    {
        Mat am = q.section * cres.augmentation.mat();
        Mat img(b.module()->dim(), lf[0].gen_count(), mod);
        for (int g = 0; g < lf[0].gen_count(); ++g)
            img.set_col(g, am.apply(cres.frees[0].generator_vector(g)));
        diffs.push_back(alg::map_from_generator_images(lf[0], b.module(), 0, img));
    }
    for (size_t i = 0; i + 1 < lf.size(); ++i) {
        const Mat& dm = cres.complex.diffs[i].mat();
        Mat img(lf[i].module->dim(), lf[i + 1].gen_count(), mod);
        for (int g = 0; g < lf[i + 1].gen_count(); ++g)
            img.set_col(g, dm.apply(cres.frees[i + 1].generator_vector(g)));
        diffs.push_back(alg::map_from_generator_images(lf[i + 1], lf[i].module, 0, img));
    }

    // Deltas divide the composite by p on generator columns.  At the base the
    // relation span absorbs the part of d_{-1} d_0 that is not p-divisible.
    std::vector<ModuleMap> dels;
    {
        Mat dd = (diffs[0] * diffs[1]).mat();
        Mat sys = Mat::hcat(Mat::identity(b.module()->dim(), mod).scaled(p), b.rel);
        Mat img(b.module()->dim(), lf[1].gen_count(), mod);
        for (int g = 0; g < lf[1].gen_count(); ++g) {
            std::vector<int64_t> rhs = dd.apply(lf[1].generator_vector(g));
            linalg::LinearSolution sol = linalg::solve_linear(sys, rhs);
            if (!sol.solvable)
                throw std::logic_error("lift_resolution: base composite escapes p + relations");
            std::vector<int64_t> z(sol.particular.begin(),
                                   sol.particular.begin() + b.module()->dim());
            // The system splits by degree, so the off-degree part of the
            // solution solves the zero component and can be dropped; what
            // stays is homogeneous, as the map constructor requires.
            std::optional<int> dg = alg::column_degree(*b.module(), rhs);
            for (int i = 0; i < b.module()->dim(); ++i)
                if (!dg || b.module()->degree(i) != *dg) z[i] = 0;
            img.set_col(g, z);
        }
        dels.push_back(alg::map_from_generator_images(lf[1], b.module(), 0, img));
    }
    for (size_t j = 1; j + 1 < diffs.size(); ++j) {
        Mat dd = (diffs[j] * diffs[j + 1]).mat();
        Mat img(lf[j - 1].module->dim(), lf[j + 1].gen_count(), mod);
        for (int g = 0; g < lf[j + 1].gen_count(); ++g) {
            std::vector<int64_t> col = dd.apply(lf[j + 1].generator_vector(g));
            for (auto& e : col) {
                if (e % p != 0)
                    throw std::logic_error("lift_resolution: interior composite not divisible by p");
                e /= p;
            }
            img.set_col(g, col);
        }
        dels.push_back(alg::map_from_generator_images(lf[j + 1], lf[j - 1].module, 0, img));
    }

    std::vector<track::SqObject> objects;
    objects.push_back(b);
    for (const FreeModule& f : lf) objects.push_back(track::sq_object(f));
    SecondaryComplex c =
        make_square_complex(inst.algebra, -1, std::move(objects), std::move(diffs), std::move(dels));
    ValidationReport rep = validate_secondary(c);
    if (!rep.ok)
        throw std::logic_error("lift_resolution: lifted complex invalid at position " +
                               std::to_string(rep.first_failure) + " (" + rep.what + ")");
    return {std::move(c), cres.truncated};
}

SecondaryAugmented perturb_delta(const SecondaryAugmented& a, int64_t lambda) {
    if (a.c.kind != Kind::square) fail("perturb_delta: square instantiation only");
    SecondaryComplex c = a.c;
    int64_t p = c.mod().p;
    for (auto& dm : c.del) {
        Mat m = dm.mat();
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) {
                int64_t e = m.at(i, j);
                m.set(i, j, e + lambda * p * linalg::mod_reduce(e, p));
            }
        dm = ModuleMap(dm.src(), dm.dst(), dm.t(), m);
    }
    if (c.count() >= 3) {
        ValidationReport rep = validate_secondary(c);
        if (!rep.ok)
            throw std::logic_error("perturb_delta: perturbation broke validity at position " +
                                   std::to_string(rep.first_failure) + " (" + rep.what + ")");
    }
    return {std::move(c), a.truncated};
}

}  // namespace secext::secondary
