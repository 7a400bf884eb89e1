#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace secext::linalg {

// Arithmetic modulus for exact computations: either a prime p or its square.
// Supported primes are capped so that products of canonical representatives
// never overflow int64 accumulators.
struct Modulus {
    int64_t p = 2;       // the underlying prime
    bool square = false; // true: arithmetic mod p^2, false: mod p

    int64_t value() const { return square ? p * p : p; }
    static Modulus prime(int64_t p);
    static Modulus prime_square(int64_t p);
};

bool is_prime(int64_t n);

int64_t mod_reduce(int64_t a, int64_t m);
int64_t mod_inverse(int64_t a, int64_t m); // throws if gcd(a, m) != 1

// Dense matrix over Z/m with m = p or p^2. Entries are canonical reps in [0, m).
class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols, Modulus mod);

    static Mat identity(int n, Modulus mod);
    static Mat zero(int rows, int cols, Modulus mod);
    static Mat from_rows(const std::vector<std::vector<int64_t>>& rows, Modulus mod);
    static Mat col_vector(const std::vector<int64_t>& v, Modulus mod);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const Modulus& mod() const { return mod_; }

    int64_t at(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }
    void set(int r, int c, int64_t v);

    Mat operator+(const Mat& o) const;
    Mat operator-(const Mat& o) const;
    Mat operator*(const Mat& o) const;
    Mat scaled(int64_t s) const;
    Mat negated() const { return scaled(-1); }
    Mat transposed() const;
    bool operator==(const Mat& o) const;
    bool operator!=(const Mat& o) const { return !(*this == o); }
    bool is_zero() const;

    Mat reduced_mod_p() const; // entries mod p, result carries Modulus::prime(p)

    std::vector<int64_t> col(int c) const;
    std::vector<int64_t> apply(const std::vector<int64_t>& v) const; // A * v
    void set_col(int c, const std::vector<int64_t>& v);

    // Horizontal concatenation [A | B]; moduli must agree.
    static Mat hcat(const Mat& a, const Mat& b);
    static Mat vcat(const Mat& a, const Mat& b);

    // entries as one row-major vector (for treating maps as unknowns)
    std::vector<int64_t> flattened() const { return data_; }

    std::string to_string() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    Modulus mod_{};
    std::vector<int64_t> data_;
};

struct Pivot {
    int row = -1;
    int col = -1;
    bool unit = true; // false: pivot value is p (only over p^2)
};

// Row echelon data produced by a fixed, deterministic pivot strategy:
// columns scanned left to right, unit pivots first (smallest row index),
// then p-divisible pivots among the remaining rows.
struct Echelon {
    Mat e;                      // E = L * A after all row operations
    Mat l;                      // the accumulated row operations
    std::vector<Pivot> pivots;  // in processing order (all unit pivots, then p pivots)
    int unit_rank = 0;
    int p_rank = 0;

    std::vector<int> pivot_cols_sorted() const;
    bool is_pivot_col(int c) const;
};

Echelon echelon(const Mat& a);

struct KernelImage {
    // Minimal generating set of ker(A) as columns; over a prime modulus this
    // is a basis. Torsion generators (order p) follow the free ones per the
    // fixed column ordering.
    Mat kernel;
    // Generating set of the column space: the pivot columns of A, ascending.
    Mat image;
    std::vector<int> image_cols; // indices of the pivot columns in A
    int unit_rank = 0;
    int p_rank = 0;
    // Smith-type diagonal of A: unit_rank ones, then p_rank p's, then zeros.
    std::vector<int64_t> diagonal;
};

KernelImage kernel_image(const Mat& a);

struct LinearSolution {
    bool solvable = false;
    std::vector<int64_t> particular; // one solution of A x = b (empty if none)
    Mat homogeneous;                 // generators of ker(A), as in kernel_image
};

LinearSolution solve_linear(const Mat& a, const std::vector<int64_t>& b);

// True iff v lies in the column span of gens.
bool in_span(const Mat& gens, const std::vector<int64_t>& v);

// True iff the column spans coincide (mutual membership).
bool same_span(const Mat& a, const Mat& b);

// Echelon of the span with the generators as rows; the form expected by
// coset_reduce.
Echelon span_echelon(const Mat& gens);

// Canonical compressed generating set of the column span: the pivot rows of
// span_echelon read back as columns, in pivot order.
Mat span_basis(const Mat& gens);

// Canonical coset representative of v modulo the column span encoded by
// span_echelon(gens). Unit-pivot coordinates are cleared and p-pivot
// coordinates reduced below p, which is a complete coset invariant.
std::vector<int64_t> coset_reduce(const Echelon& span_ech, const std::vector<int64_t>& v);

// log_p of the size of the column span (number of F_p parameters).
int span_log_size(const Mat& gens);

// Coefficients lambda with sum(lambda_i * images[i]) == rhs, entrywise, or
// nullopt. All matrices must share shape and modulus.
std::optional<std::vector<int64_t>> solve_combination(const std::vector<Mat>& images,
                                                      const Mat& rhs);

} // namespace secext::linalg
