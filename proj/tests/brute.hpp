#pragma once

// Brute-force oracles used to cross-check the elimination-based routines.
// Everything here works by enumeration or additive closure and never calls
// echelon/kernel_image/solve_linear.

#include "secext/mat.hpp"

#include <set>
#include <vector>

namespace brute {

using secext::linalg::Mat;
using Vec = std::vector<int64_t>;

inline Vec mat_apply_raw(const Mat& a, const Vec& x) {
    int64_t m = a.mod().value();
    Vec r(a.rows(), 0);
    for (int i = 0; i < a.rows(); ++i) {
        int64_t acc = 0;
        for (int j = 0; j < a.cols(); ++j) acc = (acc + a.at(i, j) * x[j]) % m;
        r[i] = acc;
    }
    return r;
}

// All m^dim vectors, lexicographic.
inline std::vector<Vec> all_vectors(int dim, int64_t m) {
    std::vector<Vec> out;
    Vec v(dim, 0);
    while (true) {
        out.push_back(v);
        int i = dim - 1;
        while (i >= 0 && ++v[i] == m) v[i--] = 0;
        if (i < 0) break;
    }
    if (dim == 0) out = {Vec{}};
    return out;
}

inline std::set<Vec> kernel_set(const Mat& a) {
    std::set<Vec> out;
    for (const Vec& x : all_vectors(a.cols(), a.mod().value()))
        if (Vec ax = mat_apply_raw(a, x); std::all_of(ax.begin(), ax.end(),
                                                      [](int64_t t) { return t == 0; }))
            out.insert(x);
    return out;
}

inline std::set<Vec> image_set(const Mat& a) {
    std::set<Vec> out;
    for (const Vec& x : all_vectors(a.cols(), a.mod().value()))
        out.insert(mat_apply_raw(a, x));
    return out;
}

// Additive closure of the columns of gens: the subgroup they generate.
inline std::set<Vec> span_set(const Mat& gens) {
    int64_t m = gens.mod().value();
    std::set<Vec> out{Vec(gens.rows(), 0)};
    std::vector<Vec> work(out.begin(), out.end());
    while (!work.empty()) {
        Vec v = work.back();
        work.pop_back();
        for (int j = 0; j < gens.cols(); ++j) {
            Vec w(v);
            for (int i = 0; i < gens.rows(); ++i) w[i] = (w[i] + gens.at(i, j)) % m;
            if (out.insert(w).second) work.push_back(w);
        }
    }
    return out;
}

} // namespace brute
