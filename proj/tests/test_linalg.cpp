#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "brute.hpp"
#include "secext/mat.hpp"

#include <random>

using namespace secext::linalg;
using brute::Vec;

namespace {

Mat random_mat(int rows, int cols, Modulus mod, std::mt19937& rng) {
    Mat a(rows, cols, mod);
    std::uniform_int_distribution<int64_t> d(0, mod.value() - 1);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) a.set(i, j, d(rng));
    return a;
}

std::vector<Modulus> all_moduli() {
    return {Modulus::prime(2), Modulus::prime(3),  Modulus::prime(5),
            Modulus::prime(7), Modulus::prime_square(2), Modulus::prime_square(3)};
}

bool is_zero_vec(const Vec& v) {
    return std::all_of(v.begin(), v.end(), [](int64_t t) { return t == 0; });
}

// Shared verification against the enumeration oracles.
void check_against_oracles(const Mat& a) {
    KernelImage ki = kernel_image(a);
    auto kset = brute::kernel_set(a);
    auto iset = brute::image_set(a);

    for (int j = 0; j < ki.kernel.cols(); ++j)
        CHECK(is_zero_vec(brute::mat_apply_raw(a, ki.kernel.col(j))));
    CHECK(brute::span_set(ki.kernel) == kset);
    CHECK(brute::span_set(ki.image) == iset);

    // image generators are actual columns of A (recoverable preimage)
    for (size_t j = 0; j < ki.image_cols.size(); ++j)
        CHECK(ki.image.col(static_cast<int>(j)) == a.col(ki.image_cols[j]));

    if (!a.mod().square) {
        CHECK(ki.p_rank == 0);
        CHECK(ki.unit_rank + ki.kernel.cols() == a.cols());
    } else {
        // |ker| * |im| = m^cols, with |im| = p^(2*units + p_rank)
        int64_t p = a.mod().p;
        int64_t im_sz = 1;
        for (int i = 0; i < 2 * ki.unit_rank + ki.p_rank; ++i) im_sz *= p;
        CHECK(im_sz == static_cast<int64_t>(iset.size()));
        CHECK(static_cast<int64_t>(kset.size() * iset.size()) ==
              static_cast<int64_t>(std::pow(static_cast<double>(a.mod().value()),
                                            a.cols()) + 0.5));
    }
}

void check_solve(const Mat& a, const Vec& b) {
    auto iset = brute::image_set(a);
    LinearSolution s = solve_linear(a, b);
    bool expect = iset.count(b) > 0;
    CHECK(s.solvable == expect);
    if (s.solvable) {
        CHECK(brute::mat_apply_raw(a, s.particular) == b);
        CHECK(brute::span_set(s.homogeneous) == brute::kernel_set(a));
    }
}

} // namespace

TEST_CASE("modular arithmetic") {
    CHECK(mod_reduce(-1, 5) == 4);
    CHECK(mod_reduce(12, 5) == 2);
    CHECK(mod_reduce(-10, 4) == 2);
    for (int64_t m : {5, 49, 9, 7}) {
        int64_t p = (m == 49) ? 7 : (m == 9 ? 3 : m);
        for (int64_t a = 1; a < m; ++a) {
            if (a % p == 0) {
                CHECK_THROWS(mod_inverse(a, m));
            } else {
                CHECK(mod_reduce(a * mod_inverse(a, m), m) == 1);
            }
        }
    }
    CHECK(is_prime(2));
    CHECK(is_prime(97));
    CHECK(!is_prime(1));
    CHECK(!is_prime(91));
    CHECK_THROWS(Modulus::prime(4));
    CHECK_THROWS(Modulus::prime(101)); // cap keeps p^2 products in int64
    CHECK(Modulus::prime_square(3).value() == 9);
}

TEST_CASE("matrix arithmetic identities") {
    std::mt19937 rng(11);
    for (Modulus m : all_moduli()) {
        Mat a = random_mat(3, 4, m, rng), b = random_mat(3, 4, m, rng);
        Mat c = random_mat(4, 2, m, rng);
        CHECK((a + b) * c == a * c + b * c);
        CHECK((a * c).transposed() == c.transposed() * a.transposed());
        CHECK((a - a).is_zero());
        CHECK(a.scaled(m.value() - 1) == a.negated());
        CHECK(Mat::identity(3, m) * a == a);
        Mat h = Mat::hcat(a, b);
        CHECK(h.cols() == 8);
        CHECK(h.col(5) == b.col(1));
        Mat v = Mat::vcat(a, b);
        CHECK(v.rows() == 6);
        CHECK(v.at(4, 2) == b.at(1, 2));
    }
    Mat z4 = Mat::from_rows({{3, 2}}, Modulus::prime_square(2));
    CHECK(z4.reduced_mod_p() == Mat::from_rows({{1, 0}}, Modulus::prime(2)));
}

TEST_CASE("solve_linear examples") {
    // identity over Z/5
    Mat id3 = Mat::identity(3, Modulus::prime(5));
    LinearSolution s = solve_linear(id3, {1, 2, 3});
    CHECK(s.solvable);
    CHECK(s.particular == Vec{1, 2, 3});
    CHECK(s.homogeneous.cols() == 0);

    // multiplication by 2 over Z/4
    Mat two = Mat::from_rows({{2}}, Modulus::prime_square(2));
    s = solve_linear(two, {2});
    CHECK(s.solvable);
    CHECK(brute::mat_apply_raw(two, s.particular) == Vec{2});
    CHECK(brute::span_set(s.homogeneous) == std::set<Vec>{{0}, {2}});

    s = solve_linear(two, {1});
    CHECK(!s.solvable);
}

TEST_CASE("kernel_image examples") {
    // zero 2x3 over Z/3: kernel is everything, image nothing
    KernelImage ki = kernel_image(Mat::zero(2, 3, Modulus::prime(3)));
    CHECK(ki.kernel == Mat::identity(3, Modulus::prime(3)));
    CHECK(ki.image.cols() == 0);

    // nilpotent x-multiplication over Z/2
    ki = kernel_image(Mat::from_rows({{0, 0}, {1, 0}}, Modulus::prime(2)));
    CHECK(ki.kernel.cols() == 1);
    CHECK(ki.kernel.col(0) == Vec{0, 1});
    CHECK(ki.image.cols() == 1);
    CHECK(ki.image.col(0) == Vec{0, 1});

    // diag(2) over Z/4: torsion kernel, torsion image, Smith diagonal (2)
    ki = kernel_image(Mat::from_rows({{2}}, Modulus::prime_square(2)));
    CHECK(ki.kernel.cols() == 1);
    CHECK(ki.kernel.col(0) == Vec{2});
    CHECK(ki.image.col(0) == Vec{2});
    CHECK(ki.diagonal == std::vector<int64_t>{2});
    CHECK(ki.unit_rank == 0);
    CHECK(ki.p_rank == 1);
}

TEST_CASE("exhaustive small matrices over moduli up to 4") {
    std::vector<Modulus> mods = {Modulus::prime(2), Modulus::prime(3),
                                 Modulus::prime_square(2)};
    std::vector<std::pair<int, int>> shapes = {{1, 1}, {1, 2}, {2, 1}, {2, 2}, {2, 3}, {3, 2}};
    for (Modulus mod : mods) {
        for (auto [r, c] : shapes) {
            // enumerate every matrix of this shape entry by entry
            int cells = r * c;
            Vec entries(cells, 0);
            while (true) {
                Mat a(r, c, mod);
                for (int i = 0; i < cells; ++i) a.set(i / c, i % c, entries[i]);
                check_against_oracles(a);
                for (const Vec& b : brute::all_vectors(r, mod.value())) check_solve(a, b);

                int i = cells - 1;
                while (i >= 0 && ++entries[i] == mod.value()) entries[i--] = 0;
                if (i < 0) break;
            }
        }
    }
}

TEST_CASE("random matrices over all moduli") {
    std::mt19937 rng(2026);
    std::uniform_int_distribution<int> dim(0, 3);
    for (Modulus mod : all_moduli()) {
        for (int trial = 0; trial < 150; ++trial) {
            Mat a = random_mat(dim(rng), dim(rng), mod, rng);
            check_against_oracles(a);
            std::uniform_int_distribution<int64_t> d(0, mod.value() - 1);
            for (int k = 0; k < 3; ++k) {
                Vec b(a.rows());
                for (auto& x : b) x = d(rng);
                check_solve(a, b);
            }
        }
    }
}

TEST_CASE("determinism of elimination") {
    std::mt19937 rng(7);
    for (Modulus mod : all_moduli()) {
        for (int trial = 0; trial < 40; ++trial) {
            Mat a = random_mat(3, 4, mod, rng);
            KernelImage k1 = kernel_image(a), k2 = kernel_image(a);
            CHECK(k1.kernel == k2.kernel);
            CHECK(k1.image == k2.image);
            CHECK(k1.image_cols == k2.image_cols);
            CHECK(k1.diagonal == k2.diagonal);
            Echelon e1 = echelon(a), e2 = echelon(a);
            CHECK(e1.e == e2.e);
            CHECK(e1.l == e2.l);
            CHECK(e1.l * a == e1.e);
        }
    }
}

TEST_CASE("coset_reduce is a complete invariant") {
    std::mt19937 rng(5);
    for (Modulus mod : {Modulus::prime(3), Modulus::prime_square(2), Modulus::prime_square(3)}) {
        std::uniform_int_distribution<int64_t> d(0, mod.value() - 1);
        for (int trial = 0; trial < 60; ++trial) {
            Mat gens = random_mat(3, trial % 4, mod, rng);
            Echelon se = span_echelon(gens);
            auto sset = brute::span_set(gens);

            // log_p of the subgroup order
            int64_t sz = 1;
            for (int i = 0; i < span_log_size(gens); ++i) sz *= mod.p;
            CHECK(sz == static_cast<int64_t>(sset.size()));

            Vec v(3);
            for (auto& x : v) x = d(rng);
            Vec r = coset_reduce(se, v);

            Vec diff(3);
            for (int i = 0; i < 3; ++i) diff[i] = mod_reduce(v[i] - r[i], mod.value());
            CHECK(sset.count(diff) == 1);

            // every member of the coset reduces to the same representative
            for (const Vec& s : sset) {
                Vec w(3);
                for (int i = 0; i < 3; ++i) w[i] = mod_reduce(v[i] + s[i], mod.value());
                CHECK(coset_reduce(se, w) == r);
            }
            // members of the span itself reduce to zero
            for (const Vec& s : sset) CHECK(is_zero_vec(coset_reduce(se, s)));
        }
    }
}

TEST_CASE("empty shapes") {
    Modulus m = Modulus::prime(3);
    KernelImage ki = kernel_image(Mat::zero(0, 3, m));
    CHECK(ki.kernel.cols() == 3);
    ki = kernel_image(Mat::zero(3, 0, m));
    CHECK(ki.kernel.cols() == 0);
    CHECK(ki.image.cols() == 0);
    LinearSolution s = solve_linear(Mat::zero(0, 2, m), {});
    CHECK(s.solvable);
    CHECK(s.particular == Vec{0, 0});
    CHECK_THROWS(solve_linear(Mat::zero(2, 2, m), {1}));
    CHECK_THROWS(Mat::from_rows({{1}}, m) + Mat::from_rows({{1}}, Modulus::prime(5)));
}
