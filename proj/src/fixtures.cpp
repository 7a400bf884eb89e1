#include "secext/fixtures.hpp"

#include <stdexcept>

namespace secext::fixtures {

using alg::BasisElem;
using alg::GradedModule;
using alg::Mat;
using alg::validate_algebra;

AlgebraPtr trivial_field(int64_t p) {
    return validate_algebra(Modulus::prime(p), {{"1", 0}}, {{{1}}});
}

AlgebraPtr dual_numbers(Modulus mod) {
    std::vector<BasisElem> basis = {{"1", 0}, {"x", 1}};
    std::vector<std::vector<std::vector<int64_t>>> sc = {
        {{1, 0}, {0, 1}},
        {{0, 1}, {0, 0}}, // x*x = 0
    };
    return validate_algebra(mod, std::move(basis), std::move(sc));
}

AlgebraPtr exterior_xy(Modulus mod) {
    std::vector<BasisElem> basis = {{"1", 0}, {"x", 1}, {"y", 1}, {"xy", 2}};
    int64_t neg = mod.value() - 1;
    std::vector<std::vector<std::vector<int64_t>>> sc(
        4, std::vector<std::vector<int64_t>>(4, std::vector<int64_t>(4, 0)));
    auto set = [&](int i, int j, int k, int64_t c) { sc[i][j][k] = c; };
    for (int i = 0; i < 4; ++i) {
        set(0, i, i, 1);
        if (i) set(i, 0, i, 1);
    }
    set(1, 2, 3, 1);   // x*y = xy
    set(2, 1, 3, neg); // y*x = -xy
    return validate_algebra(mod, std::move(basis), std::move(sc));
}

AlgebraPtr square_lift_m2(int64_t p) {
    std::vector<BasisElem> basis = {{"1", 0}, {"x", 0}};
    std::vector<std::vector<std::vector<int64_t>>> sc = {
        {{1, 0}, {0, 1}},
        {{0, 1}, {p, 0}}, // x*x = p
    };
    return validate_algebra(Modulus::prime_square(p), std::move(basis), std::move(sc));
}

ModulePtr ground_module(AlgebraPtr a) {
    if (a->mod().square)
        throw std::invalid_argument("ground_module: prime algebras only");
    std::vector<Mat> action;
    action.push_back(Mat::identity(1, a->mod()));
    for (int g = 1; g < a->dim(); ++g) action.push_back(Mat(1, 1, a->mod()));
    return GradedModule::create(std::move(a), {{"v", 0}}, std::move(action));
}

} // namespace secext::fixtures
