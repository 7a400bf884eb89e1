#pragma once

// Independent cross-check of the secondary differential over a Z/p^2 lift.
// Build the classical mod-p resolution, lift the differentials entrywise on
// generator images, divide the exactly p-divisible composite by p, and read
// Gamma = C Delta + Theta D off directly.  No track or secondary machinery is
// involved: only the shared linear algebra, the classical resolution builder,
// and the Ext chart it defines.  Agreement with the main path is therefore a
// genuine two-sided check, not a restatement.

#include <stdexcept>
#include <vector>

#include "secext/resolution.hpp"
#include "secext/track.hpp"

namespace oracle {

using secext::alg::FreeModule;
using secext::alg::Mat;
using secext::alg::ModuleMap;
using secext::alg::ModulePtr;
using secext::linalg::Modulus;

struct Entry {
    int s = 0, t = 0;
    int dim_src = 0, dim_dst = 0;
    int rank = 0;  // rank of d2: Ext^{s,t} -> Ext^{s+2,t}
    bool operator==(const Entry& o) const {
        return s == o.s && t == o.t && dim_src == o.dim_src &&
               dim_dst == o.dim_dst && rank == o.rank;
    }
};

inline std::vector<int64_t> hom_part(const secext::alg::GradedModule& m,
                                     const std::vector<int64_t>& v, int deg) {
    std::vector<int64_t> out(v.size(), 0);
    for (int i = 0; i < m.dim(); ++i)
        if (m.degree(i) == deg) out[i] = v[i];
    return out;
}

// d2 chart of Ext(pi0 B, cover(Y)/(p, rel)) for s <= s_max.
inline std::vector<Entry> d2_table(secext::alg::AlgebraPtr lift,
                                   const secext::track::SqObject& b,
                                   const secext::track::SqObject& y,
                                   int s_max, int t_cap) {
    namespace alg = secext::alg;
    namespace homalg = secext::homalg;
    namespace la = secext::linalg;

    const Modulus lm = lift->mod();
    const int64_t p = lm.p;
    const Modulus pm = Modulus::prime(p);

    ModulePtr b0 = alg::quotient_by_span(b.module()->reduced_mod_p(),
                                         b.rel.reduced_mod_p()).module;
    homalg::Resolution res = homalg::build_resolution(b0, s_max + 3, t_cap);

    alg::Quotient ybar = alg::quotient_by_span(y.module()->reduced_mod_p(),
                                               y.rel.reduced_mod_p());

    // the resolution lifted stage by stage, generator images verbatim
    std::vector<FreeModule> lf;
    for (const FreeModule& f : res.frees) lf.push_back(alg::free_module(lift, f.gens));
    std::vector<ModuleMap> D;
    for (size_t i = 0; i + 1 < lf.size(); ++i) {
        const Mat& dm = res.complex.diffs[i].mat();
        Mat img(lf[i].module->dim(), lf[i + 1].gen_count(), lm);
        for (int g = 0; g < lf[i + 1].gen_count(); ++g)
            img.set_col(g, dm.apply(res.frees[i + 1].generator_vector(g)));
        D.push_back(alg::map_from_generator_images(lf[i + 1], lf[i].module, 0, img));
    }

    // Delta[i] = (D[i] D[i+1]) / p, kept mod p: only Gamma mod p is used
    std::vector<Mat> Delta;
    for (size_t i = 0; i + 1 < D.size(); ++i) {
        Mat dd = (D[i] * D[i + 1]).mat();
        Mat q(dd.rows(), dd.cols(), pm);
        for (int r = 0; r < dd.rows(); ++r)
            for (int c = 0; c < dd.cols(); ++c) {
                if (dd.at(r, c) % p != 0)
                    throw std::logic_error("oracle: lifted composite not divisible by p");
                q.set(r, c, dd.at(r, c) / p);
            }
        Delta.push_back(std::move(q));
    }

    homalg::ExtTable ext0 = homalg::ext_groups(res, ybar.module, s_max);
    homalg::ExtTable extD = homalg::ext_groups(res, ybar.module, s_max + 2);

    const Mat& rel = y.rel;
    const int ydim = y.module()->dim();
    Mat sys = Mat::hcat(Mat::identity(ydim, lm).scaled(p), rel);

    std::vector<Entry> out;
    for (const homalg::ExtEntry& e : ext0.entries) {
        Entry row;
        row.s = e.s;
        row.t = e.t;
        row.dim_src = e.dim;
        const homalg::ExtEntry* tgt = extD.find(e.s + 2, e.t);
        row.dim_dst = tgt ? tgt->dim : 0;

        int vdim = ybar.module->dim() * res.complex.modules[e.s + 2]->dim();
        Mat vecs(vdim, 0, pm);
        for (const ModuleMap& rep : e.reps) {
            // C: the representative lifted through the stored section
            Mat camb = ybar.section * rep.mat();
            Mat cl(ydim, lf[e.s].gen_count(), lm);
            for (int g = 0; g < lf[e.s].gen_count(); ++g)
                cl.set_col(g, camb.apply(res.frees[e.s].generator_vector(g)));
            ModuleMap C =
                alg::map_from_generator_images(lf[e.s], y.module(), rep.t(), cl);

            // Theta: p Theta = -C D_s modulo the relations, per generator
            ModuleMap u = (C * D[e.s]).negated();
            Mat th(ydim, lf[e.s + 1].gen_count(), lm);
            for (int g = 0; g < lf[e.s + 1].gen_count(); ++g) {
                std::vector<int64_t> rhs =
                    u.mat().apply(lf[e.s + 1].generator_vector(g));
                la::LinearSolution sol = la::solve_linear(sys, rhs);
                if (!sol.solvable) throw std::logic_error("oracle: no Theta");
                std::vector<int64_t> v(sol.particular.begin(),
                                       sol.particular.begin() + ydim);
                v = hom_part(*y.module(), v, lf[e.s + 1].gens[g].degree + rep.t());
                Mat gap = Mat::col_vector(rhs, lm) -
                          Mat::col_vector(v, lm).scaled(p);
                bool ok = rel.cols() == 0 ? gap.is_zero()
                                          : la::in_span(rel, gap.col(0));
                if (!ok) throw std::logic_error("oracle: Theta lost homogeneity");
                th.set_col(g, v);
            }
            ModuleMap Theta =
                alg::map_from_generator_images(lf[e.s + 1], y.module(), rep.t(), th);

            Mat gam = C.mat().reduced_mod_p() * Delta[e.s] +
                      Theta.mat().reduced_mod_p() * res.complex.diffs[e.s + 1].mat();
            Mat pr = ybar.projection * gam;
            if (!(pr * res.complex.diffs[e.s + 2].mat()).is_zero())
                throw std::logic_error("oracle: Gamma is not a cocycle");

            // class modulo the oracle's own coboundary span at s + 2
            Mat cob(vdim, 0, pm);
            for (const ModuleMap& h : alg::hom_space(res.complex.modules[e.s + 1],
                                                     ybar.module, rep.t()))
                cob = Mat::hcat(
                    cob, Mat::col_vector(
                             (h.mat() * res.complex.diffs[e.s + 1].mat()).flattened(),
                             pm));
            std::vector<int64_t> cvec =
                la::coset_reduce(la::span_echelon(cob), pr.flattened());
            vecs = Mat::hcat(vecs, Mat::col_vector(cvec, pm));
        }
        row.rank = static_cast<int>(la::span_echelon(vecs).pivots.size());
        out.push_back(row);
    }
    return out;
}

}  // namespace oracle
