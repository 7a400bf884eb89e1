#include "secext/algebra.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace secext::alg {

using linalg::Echelon;
using linalg::in_span;
using linalg::mod_reduce;
using linalg::span_echelon;

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

} // namespace

GradedAlgebra::GradedAlgebra(Modulus mod, std::vector<BasisElem> basis,
                             std::vector<std::vector<std::vector<int64_t>>> sc)
    : mod_(mod), basis_(std::move(basis)), sc_(std::move(sc)) {
    for (auto& row : sc_)
        for (auto& v : row)
            for (auto& x : v) x = mod_reduce(x, mod_.value());
    for (const auto& b : basis_) top_degree_ = std::max(top_degree_, b.degree);
}

AlgebraPtr validate_algebra(Modulus mod, std::vector<BasisElem> basis,
                            std::vector<std::vector<std::vector<int64_t>>> sc) {
    size_t n = basis.size();
    if (n == 0) fail("algebra: empty basis");
    if (basis[0].degree != 0) fail("algebra: unit (basis 0) must have degree 0");
    if (sc.size() != n) fail("algebra: structure constant table has wrong shape");
    for (const auto& row : sc) {
        if (row.size() != n) fail("algebra: structure constant table has wrong shape");
        for (const auto& v : row)
            if (v.size() != n) fail("algebra: structure constant table has wrong shape");
    }
    auto a = std::make_shared<GradedAlgebra>(GradedAlgebra(mod, std::move(basis), std::move(sc)));

    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            // unit axiom
            if (i == 0 || j == 0) {
                size_t other = i == 0 ? j : i;
                for (size_t k = 0; k < n; ++k) {
                    int64_t want = (k == other) ? 1 : 0;
                    if (a->sc_[i][j][k] != want)
                        fail("algebra: unit axiom fails at basis " + a->basis_[other].name);
                }
            }
            // grading
            int d = a->basis_[i].degree + a->basis_[j].degree;
            for (size_t k = 0; k < n; ++k)
                if (a->sc_[i][j][k] != 0 && a->basis_[k].degree != d) {
                    std::ostringstream os;
                    os << "algebra: grading violation in " << a->basis_[i].name << "*"
                       << a->basis_[j].name << " (degree " << d << " vs basis "
                       << a->basis_[k].name << ")";
                    fail(os.str());
                }
        }
    }
    // associativity on all basis triples
    int64_t m = mod.value();
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            for (size_t k = 0; k < n; ++k)
                for (size_t t = 0; t < n; ++t) {
                    int64_t lhs = 0, rhs = 0;
                    for (size_t l = 0; l < n; ++l) {
                        lhs = (lhs + a->sc_[i][j][l] * a->sc_[l][k][t]) % m;
                        rhs = (rhs + a->sc_[j][k][l] * a->sc_[i][l][t]) % m;
                    }
                    if (lhs != rhs) {
                        std::ostringstream os;
                        os << "algebra: associativity fails on (" << a->basis_[i].name << ", "
                           << a->basis_[j].name << ", " << a->basis_[k].name << ")";
                        fail(os.str());
                    }
                }

    // Nakayama precondition: products of non-unit basis elements have unit
    // coefficient divisible by p, and the non-unit span is nilpotent mod p.
    bool ok = true;
    for (size_t i = 1; i < n && ok; ++i)
        for (size_t j = 1; j < n && ok; ++j)
            if (a->sc_[i][j][0] % mod.p != 0) ok = false;
    if (ok && n > 1) {
        Modulus fp = Modulus::prime(mod.p);
        std::vector<Mat> lmul(n, Mat(static_cast<int>(n), static_cast<int>(n), fp));
        for (size_t i = 1; i < n; ++i)
            for (size_t j = 0; j < n; ++j)
                for (size_t k = 0; k < n; ++k) lmul[i].set(static_cast<int>(k),
                                                           static_cast<int>(j),
                                                           a->sc_[i][j][k]);
        Mat v(static_cast<int>(n), static_cast<int>(n) - 1, fp);
        for (size_t i = 1; i < n; ++i) v.set(static_cast<int>(i), static_cast<int>(i) - 1, 1);
        for (size_t step = 0; step <= n; ++step) {
            v = linalg::kernel_image(v).image; // column-reduce to at most n columns
            if (v.cols() == 0) break;
            if (step == n) { ok = false; break; }
            Mat next(static_cast<int>(n), 0, fp);
            for (size_t i = 1; i < n; ++i) next = Mat::hcat(next, lmul[i] * v);
            v = next;
        }
    }
    a->local_ok_ = ok;
    return a;
}

std::shared_ptr<const GradedAlgebra> GradedAlgebra::reduced_mod_p() const {
    if (!mod_.square) fail("reduced_mod_p: algebra already over a prime");
    auto sc = sc_;
    for (auto& row : sc)
        for (auto& v : row)
            for (auto& x : v) x %= mod_.p;
    return validate_algebra(Modulus::prime(mod_.p), basis_, std::move(sc));
}

bool GradedAlgebra::same_as(const GradedAlgebra& o) const {
    return mod_.p == o.mod_.p && mod_.square == o.mod_.square && basis_ == o.basis_ &&
           sc_ == o.sc_;
}

ModulePtr GradedModule::create(AlgebraPtr alg, std::vector<BasisElem> basis,
                               std::vector<Mat> action) {
    auto m = std::shared_ptr<GradedModule>(new GradedModule());
    m->alg_ = std::move(alg);
    m->basis_ = std::move(basis);
    m->action_ = std::move(action);
    int dim = m->dim();
    const GradedAlgebra& a = *m->alg_;
    if (static_cast<int>(m->action_.size()) != a.dim())
        fail("module: need one action matrix per algebra basis element");
    for (int g = 0; g < a.dim(); ++g) {
        const Mat& ag = m->action_[g];
        if (ag.rows() != dim || ag.cols() != dim || ag.mod().value() != a.mod().value())
            fail("module: action matrix shape/modulus mismatch");
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                if (ag.at(i, j) != 0 &&
                    m->basis_[i].degree != m->basis_[j].degree + a.degree(g))
                    fail("module: action of " + a.basis()[g].name + " violates grading");
    }
    if (dim > 0 && m->action_[0] != Mat::identity(dim, a.mod()))
        fail("module: unit must act as identity");
    for (int g = 0; g < a.dim(); ++g)
        for (int h = 0; h < a.dim(); ++h) {
            Mat lhs = m->action_[g] * m->action_[h];
            Mat rhs = Mat::zero(dim, dim, a.mod());
            for (int k = 0; k < a.dim(); ++k) {
                int64_t c = a.product(g, h)[k];
                if (c) rhs = rhs + m->action_[k].scaled(c);
            }
            if (lhs != rhs)
                fail("module: action incompatible with " + a.basis()[g].name + "*" +
                     a.basis()[h].name);
        }
    return m;
}

ModulePtr GradedModule::zero(AlgebraPtr alg) {
    std::vector<Mat> action(alg->dim(), Mat(0, 0, alg->mod()));
    return create(std::move(alg), {}, std::move(action));
}

int GradedModule::dim_in_degree(int d) const {
    int c = 0;
    for (const auto& b : basis_)
        if (b.degree == d) ++c;
    return c;
}

int GradedModule::top_degree() const {
    int t = 0;
    for (const auto& b : basis_) t = std::max(t, b.degree);
    return t;
}

ModulePtr GradedModule::reduced_mod_p() const {
    auto alg = alg_->reduced_mod_p();
    std::vector<Mat> action;
    action.reserve(action_.size());
    for (const Mat& a : action_) action.push_back(a.reduced_mod_p());
    return create(std::move(alg), basis_, std::move(action));
}

bool GradedModule::same_as(const GradedModule& o) const {
    if (this == &o) return true;
    if (!alg_->same_as(*o.alg_) || basis_ != o.basis_) return false;
    return action_ == o.action_;
}

int FreeModule::index(int gen, int alg_basis) const {
    return gen * (module->algebra()->dim()) + alg_basis;
}

std::vector<int64_t> FreeModule::generator_vector(int gen) const {
    std::vector<int64_t> v(module->dim(), 0);
    v[index(gen, 0)] = 1;
    return v;
}

FreeModule free_module(AlgebraPtr alg, std::vector<BasisElem> gens) {
    int a = alg->dim();
    int dim = a * static_cast<int>(gens.size());
    std::vector<BasisElem> basis;
    basis.reserve(dim);
    for (const auto& g : gens)
        for (int j = 0; j < a; ++j)
            basis.push_back({g.name + "." + alg->basis()[j].name,
                             g.degree + alg->degree(j)});
    std::vector<Mat> action(a, Mat(dim, dim, alg->mod()));
    for (int g = 0; g < a; ++g)
        for (size_t i = 0; i < gens.size(); ++i)
            for (int j = 0; j < a; ++j)
                for (int k = 0; k < a; ++k) {
                    int64_t c = alg->product(g, j)[k];
                    if (c) action[g].set(static_cast<int>(i) * a + k,
                                         static_cast<int>(i) * a + j, c);
                }
    FreeModule f{GradedModule::create(alg, std::move(basis), std::move(action)),
                 std::move(gens)};
    return f;
}

ModuleMap::ModuleMap(ModulePtr src, ModulePtr dst, int t, Mat m)
    : src_(std::move(src)), dst_(std::move(dst)), t_(t), mat_(std::move(m)) {
    if (!src_->algebra()->same_as(*dst_->algebra()))
        fail("map: source and target over different algebras");
    if (mat_.rows() != dst_->dim() || mat_.cols() != src_->dim() ||
        mat_.mod().value() != src_->mod().value())
        fail("map: matrix shape/modulus mismatch");
    for (int i = 0; i < mat_.rows(); ++i)
        for (int j = 0; j < mat_.cols(); ++j)
            if (mat_.at(i, j) != 0 && dst_->degree(i) != src_->degree(j) + t_)
                fail("map: grading pattern violated");
    for (int g = 1; g < src_->algebra()->dim(); ++g)
        if (mat_ * src_->action(g) != dst_->action(g) * mat_)
            fail("map: not linear over " + src_->algebra()->basis()[g].name);
}

ModuleMap ModuleMap::zero(ModulePtr src, ModulePtr dst, int t) {
    Mat m(dst->dim(), src->dim(), src->mod());
    return ModuleMap(std::move(src), std::move(dst), t, std::move(m));
}

ModuleMap ModuleMap::identity(ModulePtr m) {
    Mat id = Mat::identity(m->dim(), m->mod());
    return ModuleMap(m, m, 0, std::move(id));
}

ModuleMap ModuleMap::operator*(const ModuleMap& g) const {
    if (!src_->same_as(*g.dst_)) fail("map composition: middle modules differ");
    return ModuleMap(g.src_, dst_, t_ + g.t_, mat_ * g.mat_);
}

ModuleMap ModuleMap::operator+(const ModuleMap& g) const {
    if (!src_->same_as(*g.src_) || !dst_->same_as(*g.dst_) || t_ != g.t_)
        fail("map sum: shape mismatch");
    return ModuleMap(src_, dst_, t_, mat_ + g.mat_);
}

ModuleMap ModuleMap::operator-(const ModuleMap& g) const { return *this + g.negated(); }

ModuleMap ModuleMap::scaled(int64_t s) const { return ModuleMap(src_, dst_, t_, mat_.scaled(s)); }

bool ModuleMap::operator==(const ModuleMap& g) const {
    return src_->same_as(*g.src_) && dst_->same_as(*g.dst_) && t_ == g.t_ && mat_ == g.mat_;
}

ModuleMap ModuleMap::reduced_mod_p() const {
    return ModuleMap(src_->reduced_mod_p(), dst_->reduced_mod_p(), t_, mat_.reduced_mod_p());
}

ModuleMap map_from_generator_images(const FreeModule& src, ModulePtr dst, int t,
                                    const Mat& images) {
    if (images.cols() != src.gen_count() || images.rows() != dst->dim())
        fail("generator images: shape mismatch");
    Mat m(dst->dim(), src.module->dim(), dst->mod());
    int a = src.module->algebra()->dim();
    for (int i = 0; i < src.gen_count(); ++i) {
        std::vector<int64_t> img = images.col(i);
        for (int j = 0; j < a; ++j)
            m.set_col(src.index(i, j), dst->action(j).apply(img));
    }
    return ModuleMap(src.module, dst, t, std::move(m));
}

std::vector<ModuleMap> hom_space(ModulePtr src, ModulePtr dst, int t) {
    int dm = src->dim(), dn = dst->dim();
    const Modulus& mod = src->mod();
    if (!src->algebra()->same_as(*dst->algebra())) fail("hom_space: different algebras");

    // unknowns: entries allowed by the grading pattern
    std::vector<std::pair<int, int>> slots;
    for (int r = 0; r < dn; ++r)
        for (int c = 0; c < dm; ++c)
            if (dst->degree(r) == src->degree(c) + t) slots.push_back({r, c});
    if (slots.empty()) return {};

    // linearity: act_dst[g] * H - H * act_src[g] = 0 for every non-unit g
    int ng = src->algebra()->dim() - 1;
    Mat cons(ng * dn * dm, static_cast<int>(slots.size()), mod);
    for (int g = 1; g <= ng; ++g) {
        const Mat& as = src->action(g);
        const Mat& ad = dst->action(g);
        for (size_t u = 0; u < slots.size(); ++u) {
            auto [r, c] = slots[u];
            int base = (g - 1) * dn * dm;
            for (int i = 0; i < dn; ++i)
                cons.set(base + i * dm + c, static_cast<int>(u),
                         cons.at(base + i * dm + c, static_cast<int>(u)) + ad.at(i, r));
            for (int j = 0; j < dm; ++j)
                cons.set(base + r * dm + j, static_cast<int>(u),
                         cons.at(base + r * dm + j, static_cast<int>(u)) - as.at(c, j));
        }
    }
    Mat kern = linalg::kernel_image(cons).kernel;
    std::vector<ModuleMap> out;
    for (int k = 0; k < kern.cols(); ++k) {
        Mat h(dn, dm, mod);
        for (size_t u = 0; u < slots.size(); ++u)
            h.set(slots[u].first, slots[u].second, kern.at(static_cast<int>(u), k));
        out.push_back(ModuleMap(src, dst, t, std::move(h)));
    }
    return out;
}

Mat radical_span(const GradedModule& m, const Mat& candidates) {
    Mat out(m.dim(), 0, m.mod());
    for (int g = 1; g < m.algebra()->dim(); ++g)
        out = Mat::hcat(out, m.action(g) * candidates);
    if (m.mod().square) out = Mat::hcat(out, candidates.scaled(m.mod().p));
    return out;
}

std::optional<int> column_degree(const GradedModule& m, const std::vector<int64_t>& v) {
    std::optional<int> d;
    for (int i = 0; i < m.dim(); ++i) {
        if (v[i] == 0) continue;
        if (d && *d != m.degree(i)) throw std::logic_error("column_degree: mixed degrees");
        d = m.degree(i);
    }
    return d;
}

Mat homogeneous_kernel(const Mat& a, const std::vector<int>& col_degrees) {
    if (static_cast<int>(col_degrees.size()) != a.cols())
        fail("homogeneous_kernel: one degree per column required");
    std::set<int> degrees(col_degrees.begin(), col_degrees.end());
    Mat out(a.cols(), 0, a.mod());
    for (int d : degrees) {
        std::vector<int> cols;
        for (int j = 0; j < a.cols(); ++j)
            if (col_degrees[j] == d) cols.push_back(j);
        Mat sub(a.rows(), static_cast<int>(cols.size()), a.mod());
        for (size_t j = 0; j < cols.size(); ++j)
            sub.set_col(static_cast<int>(j), a.col(cols[j]));
        Mat k = linalg::kernel_image(sub).kernel;
        Mat emb(a.cols(), k.cols(), a.mod());
        for (int c = 0; c < k.cols(); ++c)
            for (size_t j = 0; j < cols.size(); ++j)
                emb.set(cols[j], c, k.at(static_cast<int>(j), c));
        out = Mat::hcat(out, emb);
    }
    return out;
}

Mat homogeneous_kernel(const ModuleMap& f) {
    std::vector<int> degrees;
    for (int j = 0; j < f.src()->dim(); ++j) degrees.push_back(f.src()->degree(j));
    return homogeneous_kernel(f.mat(), degrees);
}

std::vector<int> minimal_generator_columns(const GradedModule& m, const Mat& candidates) {
    return minimal_generator_columns(m, candidates, Mat(m.dim(), 0, m.mod()));
}

std::vector<int> minimal_generator_columns(const GradedModule& m, const Mat& candidates,
                                           const Mat& seed) {
    if (!m.algebra()->local_ok())
        fail("minimal generators: algebra fails the Nakayama precondition");
    std::vector<std::pair<int, int>> order; // (degree, column)
    for (int c = 0; c < candidates.cols(); ++c)
        if (auto d = column_degree(m, candidates.col(c))) order.push_back({*d, c});
    std::stable_sort(order.begin(), order.end());

    Mat rad = radical_span(m, Mat::hcat(candidates, seed));
    std::vector<int> kept;
    Mat span = Mat::hcat(seed, rad);
    for (auto [d, c] : order) {
        if (in_span(span, candidates.col(c))) continue;
        kept.push_back(c);
        span = Mat::hcat(span, Mat::col_vector(candidates.col(c), m.mod()));
    }
    return kept;
}

std::vector<int> minimal_generators(const GradedModule& m) {
    return minimal_generator_columns(m, Mat::identity(m.dim(), m.mod()));
}

Submodule submodule_from_generators(ModulePtr ambient, const Mat& gens) {
    if (ambient->mod().square) fail("submodule: prime modulus only");
    Echelon ech = span_echelon(gens);
    std::vector<int> rows; // echelon rows forming the basis, by pivot column
    std::vector<linalg::Pivot> pivots = ech.pivots;
    std::sort(pivots.begin(), pivots.end(),
              [](const auto& a, const auto& b) { return a.col < b.col; });
    std::vector<BasisElem> basis;
    Mat incl(ambient->dim(), static_cast<int>(pivots.size()), ambient->mod());
    for (size_t i = 0; i < pivots.size(); ++i) {
        std::vector<int64_t> v(ambient->dim());
        for (int j = 0; j < ambient->dim(); ++j) v[j] = ech.e.at(pivots[i].row, j);
        incl.set_col(static_cast<int>(i), v);
        auto d = column_degree(*ambient, v);
        if (!d) throw std::logic_error("submodule: zero pivot row");
        basis.push_back({"k" + std::to_string(i), *d});
    }
    // coordinates in the echelon basis are read off at the pivot columns
    std::vector<Mat> action;
    for (int g = 0; g < ambient->algebra()->dim(); ++g) {
        Mat img = ambient->action(g) * incl;
        Mat ag(static_cast<int>(pivots.size()), static_cast<int>(pivots.size()),
               ambient->mod());
        for (size_t i = 0; i < pivots.size(); ++i)
            for (size_t c = 0; c < pivots.size(); ++c)
                ag.set(static_cast<int>(i), static_cast<int>(c),
                       img.at(pivots[i].col, static_cast<int>(c)));
        if (incl * ag != img)
            throw std::logic_error("submodule: span not action-invariant");
        action.push_back(std::move(ag));
    }
    return Submodule{GradedModule::create(ambient->algebra(), std::move(basis),
                                          std::move(action)),
                     std::move(incl)};
}

Quotient quotient_by_span(ModulePtr ambient, const Mat& gens) {
    if (ambient->mod().square) fail("quotient: prime modulus only");
    Echelon ech = span_echelon(gens);
    std::vector<int> free_coords;
    for (int c = 0; c < ambient->dim(); ++c)
        if (!ech.is_pivot_col(c)) free_coords.push_back(c);
    int q = static_cast<int>(free_coords.size());

    Mat proj(q, ambient->dim(), ambient->mod());
    for (int j = 0; j < ambient->dim(); ++j) {
        std::vector<int64_t> e(ambient->dim(), 0);
        e[j] = 1;
        std::vector<int64_t> r = linalg::coset_reduce(ech, e);
        for (int i = 0; i < q; ++i) proj.set(i, j, r[free_coords[i]]);
    }
    Mat sect(ambient->dim(), q, ambient->mod());
    std::vector<BasisElem> basis;
    for (int i = 0; i < q; ++i) {
        sect.set(free_coords[i], i, 1);
        basis.push_back({"q" + std::to_string(i), ambient->degree(free_coords[i])});
    }
    std::vector<Mat> action;
    for (int g = 0; g < ambient->algebra()->dim(); ++g) {
        if (!(proj * (ambient->action(g) * gens)).is_zero())
            throw std::logic_error("quotient: span not action-invariant");
        action.push_back(proj * ambient->action(g) * sect);
    }
    return Quotient{GradedModule::create(ambient->algebra(), std::move(basis),
                                         std::move(action)),
                    std::move(proj), std::move(sect)};
}

DirectSum direct_sum(ModulePtr a, ModulePtr b) {
    if (!a->algebra()->same_as(*b->algebra())) fail("direct_sum: different algebras");
    int da = a->dim(), db = b->dim();
    std::vector<BasisElem> basis = a->basis();
    for (const auto& e : b->basis()) basis.push_back({e.name + "'", e.degree});
    std::vector<Mat> action;
    for (int g = 0; g < a->algebra()->dim(); ++g) {
        Mat m(da + db, da + db, a->mod());
        for (int i = 0; i < da; ++i)
            for (int j = 0; j < da; ++j) m.set(i, j, a->action(g).at(i, j));
        for (int i = 0; i < db; ++i)
            for (int j = 0; j < db; ++j) m.set(da + i, da + j, b->action(g).at(i, j));
        action.push_back(std::move(m));
    }
    DirectSum s;
    s.module = GradedModule::create(a->algebra(), std::move(basis), std::move(action));
    s.in1 = Mat(da + db, da, a->mod());
    s.in2 = Mat(da + db, db, a->mod());
    s.pr1 = Mat(da, da + db, a->mod());
    s.pr2 = Mat(db, da + db, a->mod());
    for (int i = 0; i < da; ++i) {
        s.in1.set(i, i, 1);
        s.pr1.set(i, i, 1);
    }
    for (int i = 0; i < db; ++i) {
        s.in2.set(da + i, i, 1);
        s.pr2.set(i, da + i, 1);
    }
    return s;
}

} // namespace secext::alg
