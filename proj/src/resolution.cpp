#include "secext/resolution.hpp"

#include <algorithm>
#include <stdexcept>

namespace secext::homalg {

using alg::free_module;
using alg::map_from_generator_images;
using linalg::Echelon;
using linalg::KernelImage;
using linalg::kernel_image;
using linalg::in_span;
using linalg::span_echelon;

void ChainComplex::validate() const {
    if (static_cast<int>(diffs.size()) != top_index())
        throw std::invalid_argument("complex: need one differential per adjacent pair");
    for (size_t n = 0; n < diffs.size(); ++n) {
        if (!diffs[n].src()->same_as(*modules[n + 1]) ||
            !diffs[n].dst()->same_as(*modules[n]))
            throw std::invalid_argument("complex: differential endpoints mismatch");
        if (diffs[n].t() != 0)
            throw std::invalid_argument("complex: differentials must have degree 0");
        if (n > 0 && !(diffs[n - 1] * diffs[n]).is_zero())
            throw std::invalid_argument("complex: dd != 0 at index " + std::to_string(n));
    }
}

namespace {

// columns of m whose (homogeneous) degree is <= cap
Mat filter_columns_by_degree(const alg::GradedModule& mod, const Mat& m, int cap) {
    Mat out(m.rows(), 0, m.mod());
    for (int c = 0; c < m.cols(); ++c) {
        auto d = alg::column_degree(mod, m.col(c));
        if (!d || *d <= cap) out = Mat::hcat(out, Mat::col_vector(m.col(c), m.mod()));
    }
    return out;
}

} // namespace

ExactnessReport is_a_exact(const ChainComplex& c, const ModuleMap& aug, int t_cap) {
    if (c.top_index() < 0) throw std::invalid_argument("is_a_exact: empty complex");
    if (!aug.src()->same_as(*c.modules[0]))
        throw std::invalid_argument("is_a_exact: augmentation source mismatch");

    // surjectivity of aug in degrees <= t_cap
    const alg::GradedModule& a = *aug.dst();
    Mat img = aug.mat(); // image generators: all columns (sources are spanning)
    for (int i = 0; i < a.dim(); ++i) {
        if (a.degree(i) > t_cap) continue;
        std::vector<int64_t> e(a.dim(), 0);
        e[i] = 1;
        if (!in_span(img, e)) return {false, -1};
    }
    for (int n = 0; n < c.top_index(); ++n) {
        const ModuleMap& out = (n == 0) ? aug : c.diffs[n - 1];
        KernelImage ki = kernel_image(out.mat());
        Mat kern = filter_columns_by_degree(*c.modules[n], ki.kernel, t_cap);
        Mat image = filter_columns_by_degree(*c.modules[n],
                                             kernel_image(c.diffs[n].mat()).image, t_cap);
        if (!linalg::same_span(kern, image)) return {false, n};
    }
    return {true, 0};
}

Resolution build_resolution(ModulePtr a, int s_max, int t_max) {
    if (s_max < 0) throw std::invalid_argument("build_resolution: s_max < 0");
    Resolution res;
    res.augmentation = ModuleMap::zero(alg::GradedModule::zero(a->algebra()), a, 0);
    bool truncated = false;

    // candidates at stage n: minimal generators of the previous kernel
    Mat candidates = Mat::identity(a->dim(), a->mod());
    ModulePtr ambient = a;
    for (int n = 0; n <= s_max; ++n) {
        std::vector<int> picked = alg::minimal_generator_columns(*ambient, candidates);
        std::vector<alg::BasisElem> gens;
        Mat images(ambient->dim(), 0, a->mod());
        for (size_t i = 0; i < picked.size(); ++i) {
            auto v = candidates.col(picked[i]);
            int d = *alg::column_degree(*ambient, v);
            if (d > t_max) {
                truncated = true;
                continue;
            }
            gens.push_back({"s" + std::to_string(n) + "g" + std::to_string(gens.size()), d});
            images = Mat::hcat(images, Mat::col_vector(v, a->mod()));
        }
        FreeModule f = free_module(a->algebra(), std::move(gens));
        ModuleMap d = map_from_generator_images(f, ambient, 0, images);
        if (n == 0) {
            res.augmentation = d;
        } else {
            res.complex.diffs.push_back(d);
        }
        res.complex.modules.push_back(f.module);
        candidates = kernel_image(d.mat()).kernel;
        ambient = f.module;
        res.frees.push_back(std::move(f));
    }
    res.truncated = truncated;
    res.complex.validate();
    ExactnessReport rep = is_a_exact(res.complex, res.augmentation, t_max);
    if (!rep.exact)
        throw std::logic_error("build_resolution: output not exact at " +
                               std::to_string(rep.first_failure));
    return res;
}

namespace {

// point-solve: some w with map.mat() * w = rhs; throws if none
std::vector<int64_t> preimage(const ModuleMap& map, const std::vector<int64_t>& rhs,
                              const char* who) {
    linalg::LinearSolution s = linalg::solve_linear(map.mat(), rhs);
    if (!s.solvable) throw std::logic_error(std::string(who) + ": unsolvable lift step");
    return s.particular;
}

} // namespace

std::vector<ModuleMap> lift_through(const std::vector<FreeModule>& src_frees,
                                    const std::vector<ModuleMap>& src_diffs, int n0,
                                    const ChainComplex& dst, const ModuleMap& dst_aug,
                                    const ModuleMap& start) {
    std::vector<ModuleMap> f;
    int src_top = static_cast<int>(src_frees.size()) - 1;
    int stages = std::min(src_top - n0, dst.top_index()) + 1;
    for (int k = 0; k < stages; ++k) {
        const FreeModule& fm = src_frees[n0 + k];
        // rhs map: start (k = 0) or f[k-1] after the source differential
        ModuleMap rhs = (k == 0) ? start : f[k - 1] * src_diffs[n0 + k - 1];
        const ModuleMap& down = (k == 0) ? dst_aug : dst.diffs[k - 1];
        Mat images(dst.modules[k]->dim(), fm.gen_count(), rhs.mat().mod());
        for (int i = 0; i < fm.gen_count(); ++i)
            images.set_col(i, preimage(down, rhs.apply(fm.generator_vector(i)),
                                       "lift_through"));
        f.push_back(map_from_generator_images(fm, dst.modules[k], rhs.t(), images));
    }
    return f;
}

std::vector<ModuleMap> lift_chain_map(const Resolution& src, const ChainComplex& dst,
                                      const ModuleMap& dst_aug, const ModuleMap& f_minus1) {
    return lift_through(src.frees, src.complex.diffs, 0, dst, dst_aug,
                        f_minus1 * src.augmentation);
}

std::vector<ModuleMap> lift_homotopy(const Resolution& src, const ChainComplex& dst,
                                     const std::vector<ModuleMap>& f1,
                                     const std::vector<ModuleMap>& f2) {
    size_t stages = std::min(f1.size(), f2.size());
    if (static_cast<int>(stages) > dst.top_index())
        stages = static_cast<size_t>(dst.top_index()); // h[n] needs dst.modules[n+1]
    std::vector<ModuleMap> h;
    for (size_t n = 0; n < stages; ++n) {
        ModuleMap rhs = f2[n] - f1[n];
        if (n > 0) rhs = rhs - h[n - 1] * src.complex.diffs[n - 1];
        const FreeModule& fm = src.frees[n];
        Mat images(dst.modules[n + 1]->dim(), fm.gen_count(), rhs.mat().mod());
        for (int i = 0; i < fm.gen_count(); ++i)
            images.set_col(i, preimage(dst.diffs[n], rhs.apply(fm.generator_vector(i)),
                                       "lift_homotopy"));
        h.push_back(map_from_generator_images(fm, dst.modules[n + 1], rhs.t(), images));
    }
    return h;
}

int ExtTable::dim(int s, int t) const {
    const ExtEntry* e = find(s, t);
    return e ? e->dim : 0;
}

const ExtEntry* ExtTable::find(int s, int t) const {
    for (const auto& e : entries)
        if (e.s == s && e.t == t) return &e;
    return nullptr;
}

namespace {

// coboundary span at stage s with hom-degree tau: columns are the flattened
// maps h d_{s-1} for h in Hom(A_{s-1}, Y, tau)
Mat coboundary_span(const Resolution& res, ModulePtr y, int s, int tau) {
    Mat span(y->dim() * res.complex.modules[s]->dim(), 0, y->mod());
    if (s == 0) return span;
    const ModuleMap& d = res.complex.diffs[s - 1];
    for (const ModuleMap& h : alg::hom_space(res.complex.modules[s - 1], y, tau))
        span = Mat::hcat(span, Mat::col_vector((h * d).mat().flattened(), y->mod()));
    return span;
}

} // namespace

ExtTable ext_groups(const Resolution& res, ModulePtr y, int s_max) {
    if (y->mod().square) throw std::invalid_argument("ext_groups: prime modulus only");
    if (res.length() < s_max + 1)
        throw std::invalid_argument("ext_groups: resolution too short (need s_max + 1)");
    ExtTable table;
    for (int s = 0; s <= s_max; ++s) {
        ModulePtr as = res.complex.modules[s];
        // possible hom-degrees
        std::vector<int> taus;
        for (int i = 0; i < y->dim(); ++i)
            for (int j = 0; j < as->dim(); ++j) {
                int tau = y->degree(i) - as->degree(j);
                if (std::find(taus.begin(), taus.end(), tau) == taus.end())
                    taus.push_back(tau);
            }
        std::sort(taus.begin(), taus.end());
        for (int tau : taus) {
            auto homs = alg::hom_space(as, y, tau);
            if (homs.empty()) continue;
            // cocycles: kernel of h -> h d_s in hom coordinates
            const ModuleMap& ds = res.complex.diffs[s];
            Mat sys(y->dim() * ds.src()->dim(), static_cast<int>(homs.size()), y->mod());
            for (size_t j = 0; j < homs.size(); ++j)
                sys.set_col(static_cast<int>(j), (homs[j] * ds).mat().flattened());
            Mat kern = linalg::kernel_image(sys).kernel;

            Mat cob = coboundary_span(res, y, s, tau);
            int dim = 0;
            std::vector<ModuleMap> reps;
            Mat span = cob;
            for (int k = 0; k < kern.cols(); ++k) {
                ModuleMap z = ModuleMap::zero(as, y, tau);
                for (size_t j = 0; j < homs.size(); ++j)
                    z = z + homs[j].scaled(kern.at(static_cast<int>(j), k));
                Mat zvec = Mat::col_vector(z.mat().flattened(), y->mod());
                if (in_span(span, zvec.col(0))) continue;
                span = Mat::hcat(span, zvec);
                ++dim;
                reps.push_back(std::move(z));
            }
            if (dim > 0) table.entries.push_back({s, -tau, dim, std::move(reps)});
        }
    }
    std::stable_sort(table.entries.begin(), table.entries.end(),
                     [](const ExtEntry& a, const ExtEntry& b) {
                         return a.s != b.s ? a.s < b.s : a.t < b.t;
                     });
    return table;
}

std::vector<int64_t> ext_class_vector(const Resolution& res, ModulePtr y,
                                      const ModuleMap& cocycle, int s) {
    if (!(cocycle * res.complex.diffs[s]).is_zero())
        throw std::invalid_argument("ext_class_vector: not a cocycle");
    Mat cob = coboundary_span(res, y, s, cocycle.t());
    return linalg::coset_reduce(span_echelon(cob), cocycle.mat().flattened());
}

ExtClass yoneda_product(const Resolution& res_x, const Resolution& res_y,
                        const ExtClass& alpha, const ExtClass& beta) {
    if (!beta.cocycle.dst()->same_as(*res_y.target()))
        throw std::invalid_argument("yoneda_product: beta must land in res_y's target");
    std::vector<ModuleMap> h = lift_through(res_x.frees, res_x.complex.diffs, beta.s,
                                            res_y.complex, res_y.augmentation,
                                            beta.cocycle);
    if (static_cast<int>(h.size()) <= alpha.s)
        throw std::invalid_argument("yoneda_product: resolutions too short");
    ModuleMap prod = alpha.cocycle * h[alpha.s];
    return ExtClass{alpha.s + beta.s, alpha.t + beta.t, std::move(prod)};
}

} // namespace secext::homalg
