#pragma once

#include "secext/mat.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace secext::alg {

using linalg::Mat;
using linalg::Modulus;

struct BasisElem {
    std::string name;
    int degree = 0;
    bool operator==(const BasisElem&) const = default;
};

// Finite-dimensional graded algebra over Z/p or Z/p^2, given by structure
// constants on a fixed basis. basis[0] is the unit and must sit in degree 0.
class GradedAlgebra {
public:
    // sc[i][j] = coefficient vector of basis_i * basis_j in the basis.
    GradedAlgebra(Modulus mod, std::vector<BasisElem> basis,
                  std::vector<std::vector<std::vector<int64_t>>> sc);

    const Modulus& mod() const { return mod_; }
    int dim() const { return static_cast<int>(basis_.size()); }
    const std::vector<BasisElem>& basis() const { return basis_; }
    int degree(int i) const { return basis_[i].degree; }
    int top_degree() const { return top_degree_; }

    // product of basis elements as a coefficient vector
    const std::vector<int64_t>& product(int i, int j) const { return sc_[i][j]; }

    // Nakayama precondition: span(non-unit basis) + p generates a nilpotent
    // (mod p) ideal with quotient F_p. Required by minimal-generator searches.
    bool local_ok() const { return local_ok_; }

    // same structure constants with entries mod p, modulus dropped to prime
    std::shared_ptr<const GradedAlgebra> reduced_mod_p() const;

    bool same_as(const GradedAlgebra& o) const;

private:
    Modulus mod_;
    std::vector<BasisElem> basis_;
    std::vector<std::vector<std::vector<int64_t>>> sc_;
    int top_degree_ = 0;
    bool local_ok_ = false;
    friend std::shared_ptr<const GradedAlgebra>
    validate_algebra(Modulus, std::vector<BasisElem>,
                     std::vector<std::vector<std::vector<int64_t>>>);
};

using AlgebraPtr = std::shared_ptr<const GradedAlgebra>;

// Validates unit, grading and associativity; throws std::invalid_argument
// naming the first violated axiom.
AlgebraPtr validate_algebra(Modulus mod, std::vector<BasisElem> basis,
                            std::vector<std::vector<std::vector<int64_t>>> sc);

class GradedModule;
using ModulePtr = std::shared_ptr<const GradedModule>;

// Finitely generated graded module, stored as one flat basis with degrees and
// one action matrix per algebra basis element. action[0] is the identity.
class GradedModule {
public:
    static ModulePtr create(AlgebraPtr alg, std::vector<BasisElem> basis,
                            std::vector<Mat> action);
    static ModulePtr zero(AlgebraPtr alg);

    const AlgebraPtr& algebra() const { return alg_; }
    const Modulus& mod() const { return alg_->mod(); }
    int dim() const { return static_cast<int>(basis_.size()); }
    const std::vector<BasisElem>& basis() const { return basis_; }
    int degree(int i) const { return basis_[i].degree; }
    const Mat& action(int g) const { return action_[g]; }

    // dimension of the degree-d component
    int dim_in_degree(int d) const;
    int top_degree() const;

    // same basis and actions over the prime reduction of the algebra
    ModulePtr reduced_mod_p() const;

    bool same_as(const GradedModule& o) const;

private:
    GradedModule() = default;
    AlgebraPtr alg_;
    std::vector<BasisElem> basis_;
    std::vector<Mat> action_;
};

// Free module on the listed generators. Basis is generator-major: index
// (i, j) -> i * dim(algebra) + j stands for basis_j * gen_i.
struct FreeModule {
    ModulePtr module;
    std::vector<BasisElem> gens;

    int gen_count() const { return static_cast<int>(gens.size()); }
    // flat basis index of basis_j * gen_i
    int index(int gen, int alg_basis) const;
    // the column of gen_i itself (unit coefficient)
    std::vector<int64_t> generator_vector(int gen) const;
};

FreeModule free_module(AlgebraPtr alg, std::vector<BasisElem> gens);

// Algebra-linear map of internal degree t: degree-d elements map to degree
// d + t. Grading pattern and linearity are validated at construction.
class ModuleMap {
public:
    ModuleMap() = default; // empty shell for containers; factories make real maps
    ModuleMap(ModulePtr src, ModulePtr dst, int t, Mat m);
    static ModuleMap zero(ModulePtr src, ModulePtr dst, int t);
    static ModuleMap identity(ModulePtr m);

    const ModulePtr& src() const { return src_; }
    const ModulePtr& dst() const { return dst_; }
    int t() const { return t_; }
    const Mat& mat() const { return mat_; }

    ModuleMap operator*(const ModuleMap& g) const; // this after g
    ModuleMap operator+(const ModuleMap& g) const;
    ModuleMap operator-(const ModuleMap& g) const;
    ModuleMap scaled(int64_t s) const;
    ModuleMap negated() const { return scaled(-1); }
    bool operator==(const ModuleMap& g) const;
    bool is_zero() const { return mat_.is_zero(); }

    std::vector<int64_t> apply(const std::vector<int64_t>& v) const { return mat_.apply(v); }

    // entries reduced mod p, modules replaced by their reductions
    ModuleMap reduced_mod_p() const;

private:
    ModulePtr src_, dst_;
    int t_ = 0;
    Mat mat_;
};

// Map out of a free module determined by generator images (columns in dst
// coordinates, one per generator, each of degree gen.degree + t).
ModuleMap map_from_generator_images(const FreeModule& src, ModulePtr dst, int t,
                                    const Mat& images);

// Minimal generating set (F_p-basis over a prime modulus) of the space of
// degree-t algebra-linear maps src -> dst, found by solving the linearity
// constraints. Deterministic order fixed by the kernel routine.
std::vector<ModuleMap> hom_space(ModulePtr src, ModulePtr dst, int t);

// Columns spanning rad(K) = (non-unit action + p) applied to the span of the
// candidate columns. K must be an action-invariant subspace.
Mat radical_span(const GradedModule& m, const Mat& candidates);

// Degree of a homogeneous coordinate vector; nullopt for 0; throws if mixed.
std::optional<int> column_degree(const GradedModule& m, const std::vector<int64_t>& v);

// Kernel generators computed one source degree at a time, so every generator
// column is homogeneous. Ordered by degree ascending, then per-degree kernel
// order. col_degrees[j] grades column j of a.
Mat homogeneous_kernel(const Mat& a, const std::vector<int>& col_degrees);
Mat homogeneous_kernel(const ModuleMap& f);

// Greedy minimal generator selection from candidate columns (which must
// generate an action-invariant subspace): candidates are visited by degree
// ascending, then column index, and kept when not in rad(K) + span(kept).
// Returns indices into candidates. Requires algebra->local_ok().
std::vector<int> minimal_generator_columns(const GradedModule& m, const Mat& candidates);

// Same, but the exclusion span starts from seed (plus radicals) instead of
// from the radical alone: columns already in seed + rad contribute nothing.
std::vector<int> minimal_generator_columns(const GradedModule& m, const Mat& candidates,
                                           const Mat& seed);

// Convenience: minimal generators of the whole module (candidates = identity).
std::vector<int> minimal_generators(const GradedModule& m);

// Submodule spanned by homogeneous generator columns, with inclusion map.
// Prime modulus only: the basis is the unit-pivot echelon basis of the span.
struct Submodule {
    ModulePtr module;
    Mat inclusion; // dim(ambient) x dim(module)
};
Submodule submodule_from_generators(ModulePtr ambient, const Mat& gens);

// Quotient of a module by the (action-invariant) span of generator columns.
// Prime modulus only. Basis: ambient basis vectors at non-pivot coordinates.
struct Quotient {
    ModulePtr module;
    Mat projection; // dim(module) x dim(ambient)
    Mat section;    // dim(ambient) x dim(module): chosen coset representatives
};
Quotient quotient_by_span(ModulePtr ambient, const Mat& gens);

// Biproduct with injections and projections.
struct DirectSum {
    ModulePtr module;
    Mat in1, in2;   // injections
    Mat pr1, pr2;   // projections
};
DirectSum direct_sum(ModulePtr a, ModulePtr b);

} // namespace secext::alg
