#include "secext/mat.hpp"

#include <sstream>
#include <stdexcept>

namespace secext::linalg {

bool is_prime(int64_t n) {
    if (n < 2) return false;
    for (int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

Modulus Modulus::prime(int64_t p) {
    if (!is_prime(p) || p > 97)
        throw std::invalid_argument("modulus: need a prime <= 97, got " + std::to_string(p));
    return Modulus{p, false};
}

Modulus Modulus::prime_square(int64_t p) {
    Modulus m = prime(p);
    m.square = true;
    return m;
}

int64_t mod_reduce(int64_t a, int64_t m) {
    int64_t r = a % m;
    return r < 0 ? r + m : r;
}

int64_t mod_inverse(int64_t a, int64_t m) {
    int64_t t = 0, new_t = 1, r = m, new_r = mod_reduce(a, m);
    while (new_r != 0) {
        int64_t q = r / new_r;
        int64_t tmp = t - q * new_t;
        t = new_t;
        new_t = tmp;
        tmp = r - q * new_r;
        r = new_r;
        new_r = tmp;
    }
    if (r != 1) throw std::invalid_argument("mod_inverse: not a unit");
    return mod_reduce(t, m);
}

Mat::Mat(int rows, int cols, Modulus mod)
    : rows_(rows), cols_(cols), mod_(mod),
      data_(static_cast<size_t>(rows) * cols, 0) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("Mat: negative shape");
}

Mat Mat::identity(int n, Modulus mod) {
    Mat m(n, n, mod);
    for (int i = 0; i < n; ++i) m.set(i, i, 1);
    return m;
}

Mat Mat::zero(int rows, int cols, Modulus mod) { return Mat(rows, cols, mod); }

Mat Mat::from_rows(const std::vector<std::vector<int64_t>>& rows, Modulus mod) {
    int r = static_cast<int>(rows.size());
    int c = r == 0 ? 0 : static_cast<int>(rows[0].size());
    Mat m(r, c, mod);
    for (int i = 0; i < r; ++i) {
        if (static_cast<int>(rows[i].size()) != c)
            throw std::invalid_argument("Mat::from_rows: ragged rows");
        for (int j = 0; j < c; ++j) m.set(i, j, rows[i][j]);
    }
    return m;
}

Mat Mat::col_vector(const std::vector<int64_t>& v, Modulus mod) {
    Mat m(static_cast<int>(v.size()), 1, mod);
    for (size_t i = 0; i < v.size(); ++i) m.set(static_cast<int>(i), 0, v[i]);
    return m;
}

void Mat::set(int r, int c, int64_t v) {
    data_[static_cast<size_t>(r) * cols_ + c] = mod_reduce(v, mod_.value());
}

static void check_same_mod(const Mat& a, const Mat& b, const char* op) {
    if (a.mod().value() != b.mod().value())
        throw std::invalid_argument(std::string(op) + ": modulus mismatch");
}

Mat Mat::operator+(const Mat& o) const {
    check_same_mod(*this, o, "Mat+");
    if (rows_ != o.rows_ || cols_ != o.cols_)
        throw std::invalid_argument("Mat+: dimension mismatch");
    Mat r(rows_, cols_, mod_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r.set(i, j, at(i, j) + o.at(i, j));
    return r;
}

Mat Mat::operator-(const Mat& o) const { return *this + o.negated(); }

Mat Mat::operator*(const Mat& o) const {
    check_same_mod(*this, o, "Mat*");
    if (cols_ != o.rows_)
        throw std::invalid_argument("Mat*: dimension mismatch " + std::to_string(cols_) +
                                    " vs " + std::to_string(o.rows_));
    Mat r(rows_, o.cols_, mod_);
    int64_t m = mod_.value();
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            int64_t a = at(i, k);
            if (a == 0) continue;
            for (int j = 0; j < o.cols_; ++j) {
                int64_t v = r.at(i, j) + a * o.at(k, j);
                r.set(i, j, v % m);
            }
        }
    return r;
}

Mat Mat::scaled(int64_t s) const {
    Mat r(rows_, cols_, mod_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r.set(i, j, at(i, j) * mod_reduce(s, mod_.value()));
    return r;
}

Mat Mat::transposed() const {
    Mat r(cols_, rows_, mod_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r.set(j, i, at(i, j));
    return r;
}

bool Mat::operator==(const Mat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && mod_.value() == o.mod_.value() &&
           data_ == o.data_;
}

bool Mat::is_zero() const {
    for (int64_t v : data_)
        if (v != 0) return false;
    return true;
}

Mat Mat::reduced_mod_p() const {
    Mat r(rows_, cols_, Modulus::prime(mod_.p));
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r.set(i, j, at(i, j) % mod_.p);
    return r;
}

std::vector<int64_t> Mat::col(int c) const {
    std::vector<int64_t> v(rows_);
    for (int i = 0; i < rows_; ++i) v[i] = at(i, c);
    return v;
}

void Mat::set_col(int c, const std::vector<int64_t>& v) {
    if (static_cast<int>(v.size()) != rows_)
        throw std::invalid_argument("set_col: dimension mismatch");
    for (int i = 0; i < rows_; ++i) set(i, c, v[i]);
}

std::vector<int64_t> Mat::apply(const std::vector<int64_t>& v) const {
    if (static_cast<int>(v.size()) != cols_)
        throw std::invalid_argument("Mat::apply: dimension mismatch");
    std::vector<int64_t> r(rows_, 0);
    int64_t m = mod_.value();
    for (int i = 0; i < rows_; ++i) {
        int64_t acc = 0;
        for (int j = 0; j < cols_; ++j) acc = (acc + at(i, j) * mod_reduce(v[j], m)) % m;
        r[i] = mod_reduce(acc, m);
    }
    return r;
}

Mat Mat::hcat(const Mat& a, const Mat& b) {
    check_same_mod(a, b, "hcat");
    if (a.rows() != b.rows()) throw std::invalid_argument("hcat: dimension mismatch");
    Mat r(a.rows(), a.cols() + b.cols(), a.mod());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) r.set(i, j, a.at(i, j));
        for (int j = 0; j < b.cols(); ++j) r.set(i, a.cols() + j, b.at(i, j));
    }
    return r;
}

Mat Mat::vcat(const Mat& a, const Mat& b) {
    check_same_mod(a, b, "vcat");
    if (a.cols() != b.cols()) throw std::invalid_argument("vcat: dimension mismatch");
    Mat r(a.rows() + b.rows(), a.cols(), a.mod());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) r.set(i, j, a.at(i, j));
    for (int i = 0; i < b.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) r.set(a.rows() + i, j, b.at(i, j));
    return r;
}

std::string Mat::to_string() const {
    std::ostringstream os;
    os << "[";
    for (int i = 0; i < rows_; ++i) {
        if (i) os << "; ";
        for (int j = 0; j < cols_; ++j) {
            if (j) os << " ";
            os << at(i, j);
        }
    }
    os << "]";
    return os.str();
}

std::vector<int> Echelon::pivot_cols_sorted() const {
    std::vector<int> cols;
    for (const Pivot& p : pivots) cols.push_back(p.col);
    std::sort(cols.begin(), cols.end());
    return cols;
}

bool Echelon::is_pivot_col(int c) const {
    for (const Pivot& p : pivots)
        if (p.col == c) return true;
    return false;
}

namespace {

void row_scale(Mat& m, int r, int64_t s) {
    for (int j = 0; j < m.cols(); ++j) m.set(r, j, m.at(r, j) * s);
}

// row[r] += s * row[r2]
void row_axpy(Mat& m, int r, int64_t s, int r2) {
    for (int j = 0; j < m.cols(); ++j) m.set(r, j, m.at(r, j) + s * m.at(r2, j));
}

} // namespace

Echelon echelon(const Mat& a) {
    Echelon res{a, Mat::identity(a.rows(), a.mod()), {}, 0, 0};
    Mat& e = res.e;
    Mat& l = res.l;
    const int64_t m = a.mod().value();
    const int64_t p = a.mod().p;
    std::vector<bool> used(a.rows(), false);

    // phase 1: unit pivots, leftmost column first, smallest row index
    for (int c = 0; c < a.cols(); ++c) {
        int pr = -1;
        for (int r = 0; r < a.rows(); ++r) {
            if (used[r]) continue;
            int64_t v = e.at(r, c);
            if (v != 0 && v % p != 0) { pr = r; break; }
        }
        if (pr < 0) continue;
        used[pr] = true;
        int64_t inv = mod_inverse(e.at(pr, c), m);
        row_scale(e, pr, inv);
        row_scale(l, pr, inv);
        for (int r = 0; r < a.rows(); ++r) {
            if (r == pr) continue;
            int64_t v = e.at(r, c);
            if (v == 0) continue;
            row_axpy(e, r, m - v, pr);
            row_axpy(l, r, m - v, pr);
        }
        res.pivots.push_back(Pivot{pr, c, true});
        res.unit_rank++;
    }

    // phase 2 (p^2 only): p-divisible pivots among the remaining rows
    if (a.mod().square) {
        for (int c = 0; c < a.cols(); ++c) {
            int pr = -1;
            for (int r = 0; r < a.rows(); ++r) {
                if (used[r]) continue;
                if (e.at(r, c) != 0) { pr = r; break; }
            }
            if (pr < 0) continue;
            used[pr] = true;
            // remaining rows are p-divisible throughout; normalize pivot to p
            int64_t u = e.at(pr, c) / p; // unit mod p
            int64_t inv = mod_inverse(u, m);
            row_scale(e, pr, inv);
            row_scale(l, pr, inv);
            for (int r = 0; r < a.rows(); ++r) {
                if (r == pr) continue;
                // p-divisible rows clear completely; unit rows drop below p
                int64_t q = e.at(r, c) / p;
                if (q == 0) continue;
                row_axpy(e, r, m - q, pr);
                row_axpy(l, r, m - q, pr);
            }
            res.pivots.push_back(Pivot{pr, c, false});
            res.p_rank++;
        }
    }
    return res;
}

KernelImage kernel_image(const Mat& a) {
    Echelon ech = echelon(a);
    const int64_t m = a.mod().value();
    const int64_t p = a.mod().p;
    KernelImage out{Mat(a.cols(), 0, a.mod()), Mat(a.rows(), 0, a.mod()), {}, ech.unit_rank,
                    ech.p_rank, {}};

    // pivot lookup per column
    std::vector<const Pivot*> pivot_of_col(a.cols(), nullptr);
    for (const Pivot& pv : ech.pivots) pivot_of_col[pv.col] = &pv;

    // kernel generators: one per free column (ascending), then one torsion
    // generator per p-pivot column (ascending)
    std::vector<std::vector<int64_t>> gens;
    for (int c = 0; c < a.cols(); ++c) {
        if (pivot_of_col[c]) continue;
        std::vector<int64_t> g(a.cols(), 0);
        g[c] = 1;
        // p rows first: p * x_pc = -e[r][c] with the entry p-divisible
        for (const Pivot& pv : ech.pivots) {
            if (pv.unit) continue;
            g[pv.col] = mod_reduce(-(ech.e.at(pv.row, c) / p), m);
        }
        // unit rows see the p-pivot coordinates chosen above
        for (const Pivot& pv : ech.pivots) {
            if (!pv.unit) continue;
            int64_t acc = ech.e.at(pv.row, c);
            for (const Pivot& qv : ech.pivots)
                if (!qv.unit) acc += ech.e.at(pv.row, qv.col) * g[qv.col];
            g[pv.col] = mod_reduce(-acc, m);
        }
        gens.push_back(std::move(g));
    }
    if (a.mod().square) {
        for (int c = 0; c < a.cols(); ++c) {
            if (!pivot_of_col[c] || pivot_of_col[c]->unit) continue;
            std::vector<int64_t> g(a.cols(), 0);
            g[c] = p;
            // p * e_c kills the p-pivot row (p*p = 0); other p rows have 0 at c
            for (const Pivot& pv : ech.pivots) {
                if (!pv.unit) continue;
                g[pv.col] = mod_reduce(-ech.e.at(pv.row, c) * p, m);
            }
            gens.push_back(std::move(g));
        }
    }
    out.kernel = Mat(a.cols(), static_cast<int>(gens.size()), a.mod());
    for (size_t j = 0; j < gens.size(); ++j)
        out.kernel.set_col(static_cast<int>(j), gens[j]);

    for (int c = 0; c < a.cols(); ++c)
        if (pivot_of_col[c]) out.image_cols.push_back(c);
    out.image = Mat(a.rows(), static_cast<int>(out.image_cols.size()), a.mod());
    for (size_t j = 0; j < out.image_cols.size(); ++j)
        out.image.set_col(static_cast<int>(j), a.col(out.image_cols[j]));

    int dmax = std::min(a.rows(), a.cols());
    for (int i = 0; i < dmax; ++i) {
        if (i < ech.unit_rank) out.diagonal.push_back(1);
        else if (i < ech.unit_rank + ech.p_rank) out.diagonal.push_back(p);
        else out.diagonal.push_back(0);
    }
    return out;
}

LinearSolution solve_linear(const Mat& a, const std::vector<int64_t>& b) {
    if (static_cast<int>(b.size()) != a.rows())
        throw std::invalid_argument("solve_linear: dimension mismatch");
    Echelon ech = echelon(a);
    const int64_t m = a.mod().value();
    const int64_t p = a.mod().p;
    std::vector<int64_t> c = ech.l.apply(b);

    LinearSolution sol;
    std::vector<int64_t> x(a.cols(), 0);
    std::vector<bool> row_has_pivot(a.rows(), false);
    for (const Pivot& pv : ech.pivots) row_has_pivot[pv.row] = true;
    // rows without pivots must have zero rhs
    for (int r = 0; r < a.rows(); ++r)
        if (!row_has_pivot[r] && c[r] != 0) return sol;
    // p-pivot rows first: p * x_c + (p-divisible tail on free cols) = c_r,
    // free variables are taken as 0
    for (const Pivot& pv : ech.pivots) {
        if (pv.unit) continue;
        int64_t rhs = c[pv.row];
        if (rhs % p != 0) return sol;
        x[pv.col] = mod_reduce(rhs / p, m);
    }
    for (const Pivot& pv : ech.pivots) {
        if (!pv.unit) continue;
        int64_t rhs = c[pv.row];
        // subtract contributions of p-pivot coordinates
        for (const Pivot& qv : ech.pivots) {
            if (qv.unit) continue;
            rhs -= ech.e.at(pv.row, qv.col) * x[qv.col];
        }
        x[pv.col] = mod_reduce(rhs, m);
    }
    // verify (free variables may appear in p rows)
    std::vector<int64_t> ax = a.apply(x);
    for (int r = 0; r < a.rows(); ++r)
        if (ax[r] != mod_reduce(b[r], m)) return sol;
    sol.solvable = true;
    sol.particular = std::move(x);
    sol.homogeneous = kernel_image(a).kernel;
    return sol;
}

bool in_span(const Mat& gens, const std::vector<int64_t>& v) {
    return solve_linear(gens, v).solvable;
}

bool same_span(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows()) throw std::invalid_argument("same_span: dimension mismatch");
    for (int j = 0; j < b.cols(); ++j)
        if (!in_span(a, b.col(j))) return false;
    for (int j = 0; j < a.cols(); ++j)
        if (!in_span(b, a.col(j))) return false;
    return true;
}

Echelon span_echelon(const Mat& gens) { return echelon(gens.transposed()); }

Mat span_basis(const Mat& gens) {
    Echelon ech = span_echelon(gens);
    Mat out(gens.rows(), static_cast<int>(ech.pivots.size()), gens.mod());
    for (size_t i = 0; i < ech.pivots.size(); ++i) {
        std::vector<int64_t> v(gens.rows());
        for (int j = 0; j < gens.rows(); ++j) v[j] = ech.e.at(ech.pivots[i].row, j);
        out.set_col(static_cast<int>(i), v);
    }
    return out;
}

std::vector<int64_t> coset_reduce(const Echelon& span_ech, const std::vector<int64_t>& v) {
    const Mat& e = span_ech.e;
    if (static_cast<int>(v.size()) != e.cols())
        throw std::invalid_argument("coset_reduce: dimension mismatch");
    const int64_t m = e.mod().value();
    const int64_t p = e.mod().p;
    std::vector<int64_t> r(v);
    for (auto& x : r) x = mod_reduce(x, m);
    for (const Pivot& pv : span_ech.pivots) {
        if (!pv.unit) continue;
        int64_t coef = r[pv.col];
        if (coef == 0) continue;
        for (int j = 0; j < e.cols(); ++j)
            r[j] = mod_reduce(r[j] - coef * e.at(pv.row, j), m);
    }
    for (const Pivot& pv : span_ech.pivots) {
        if (pv.unit) continue;
        int64_t q = r[pv.col] / p;
        if (q == 0) continue;
        for (int j = 0; j < e.cols(); ++j)
            r[j] = mod_reduce(r[j] - q * e.at(pv.row, j), m);
    }
    return r;
}

int span_log_size(const Mat& gens) {
    Echelon ech = span_echelon(gens);
    if (gens.mod().square) return 2 * ech.unit_rank + ech.p_rank;
    return ech.unit_rank;
}

std::optional<std::vector<int64_t>> solve_combination(const std::vector<Mat>& images,
                                                      const Mat& rhs) {
    Mat sys(rhs.rows() * rhs.cols(), static_cast<int>(images.size()), rhs.mod());
    for (size_t j = 0; j < images.size(); ++j) {
        if (images[j].rows() != rhs.rows() || images[j].cols() != rhs.cols() ||
            images[j].mod().value() != rhs.mod().value())
            throw std::invalid_argument("solve_combination: shape/modulus mismatch");
        sys.set_col(static_cast<int>(j), images[j].flattened());
    }
    LinearSolution s = solve_linear(sys, rhs.flattened());
    if (!s.solvable) return std::nullopt;
    return s.particular;
}

} // namespace secext::linalg
