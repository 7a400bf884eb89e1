#pragma once

#include "secext/algebra.hpp"

#include <limits>
#include <optional>

namespace secext::homalg {

using alg::FreeModule;
using alg::Mat;
using alg::ModuleMap;
using alg::ModulePtr;

// ... -> A_2 -> A_1 -> A_0, with diffs[n] = d_n : A_{n+1} -> A_n of internal
// degree 0 and d_{n-1} d_n = 0.
struct ChainComplex {
    std::vector<ModulePtr> modules;
    std::vector<ModuleMap> diffs;

    int top_index() const { return static_cast<int>(modules.size()) - 1; }
    void validate() const; // shapes, degree 0, dd = 0 (throws)
};

struct ExactnessReport {
    bool exact = true;
    // -1: augmentation not surjective; n >= 0: ker != im at A_n
    int first_failure = 0;
};

// Exactness of ... -> A_1 -> A_0 -> A -> 0 in all internal degrees <= t_cap.
// Probing by the rank-1 free module is the identity at the matrix level, so
// this is degreewise kernel/image span comparison. Checkable positions are
// -1 (surjectivity of aug) through top_index() - 1.
ExactnessReport is_a_exact(const ChainComplex& c, const ModuleMap& aug,
                           int t_cap = std::numeric_limits<int>::max());

struct Resolution {
    ChainComplex complex;          // complex.modules[n] == frees[n].module
    std::vector<FreeModule> frees; // one per stage
    ModuleMap augmentation;        // frees[0] -> resolved module
    bool truncated = false;        // some generator above t_max was dropped

    const ModulePtr& target() const { return augmentation.dst(); }
    int length() const { return complex.top_index(); }
};

// Minimal free resolution: each stage is free on a minimal generating set of
// the previous kernel (of the module itself at stage 0), generators ordered
// by degree then kernel column. Generators above t_max are dropped and
// flagged. The augmented complex is verified a-exact up to t_max.
Resolution build_resolution(ModulePtr a, int s_max, int t_max);

// Chain lift along exact targets. Source stages must be free. Produces
// f_n : src_frees[n0 + n] -> dst.modules[n] with dst_aug f_0 = start and
// dst.diffs[n-1] f_n = f_{n-1} src_diffs[n0 + n - 1], for as many stages as
// both windows allow. Throws std::logic_error if a solve fails (target not
// exact).
std::vector<ModuleMap> lift_through(const std::vector<FreeModule>& src_frees,
                                    const std::vector<ModuleMap>& src_diffs, int n0,
                                    const ChainComplex& dst, const ModuleMap& dst_aug,
                                    const ModuleMap& start);

// Lift of f_minus1 : target(src) -> target(dst y) to a chain map between the
// resolutions (special case of lift_through with n0 = 0).
std::vector<ModuleMap> lift_chain_map(const Resolution& src, const ChainComplex& dst,
                                      const ModuleMap& dst_aug, const ModuleMap& f_minus1);

// Homotopy between two lifts of the same f_minus1: returns h with
// h[n] : src[n] -> dst[n+1] and f2[n] - f1[n] = dst.diffs[n] h[n] + h[n-1]
// src.diffs[n-1] (last term absent at n = 0).
std::vector<ModuleMap> lift_homotopy(const Resolution& src, const ChainComplex& dst,
                                     const std::vector<ModuleMap>& f1,
                                     const std::vector<ModuleMap>& f2);

// Ext class in Adams indexing: s homological, t internal; the representing
// cocycle frees[s] -> Y has hom-degree -t and kills im d_s.
struct ExtClass {
    int s = 0;
    int t = 0;
    ModuleMap cocycle;
};

struct ExtEntry {
    int s = 0;
    int t = 0;
    int dim = 0;
    std::vector<ModuleMap> reps; // cocycles representing a basis
};

struct ExtTable {
    std::vector<ExtEntry> entries; // sorted by (s, t), nonzero dims only
    int dim(int s, int t) const;
    const ExtEntry* find(int s, int t) const;
};

// Ext^{s,t}(A, Y) for 0 <= s <= s_max, over a prime modulus. Needs the
// resolution to extend one stage past s_max (for the cocycle condition).
ExtTable ext_groups(const Resolution& res, ModulePtr y, int s_max);

// Canonical coordinates of [cocycle] modulo coboundaries at (s, -cocycle.t());
// equal classes reduce to equal vectors.
std::vector<int64_t> ext_class_vector(const Resolution& res, ModulePtr y,
                                      const ModuleMap& cocycle, int s);

// Yoneda product [f][g]: lifts g through the resolution of Y and composes.
// alpha lives on res_y with coefficients in Z, beta on res_x with
// coefficients in Y = res_y's target.
ExtClass yoneda_product(const Resolution& res_x, const Resolution& res_y,
                        const ExtClass& alpha, const ExtClass& beta);

} // namespace secext::homalg
