#pragma once

#include "secext/algebra.hpp"

namespace secext::fixtures {

using alg::AlgebraPtr;
using alg::ModulePtr;
using linalg::Modulus;

// the ground ring itself: basis {1}
AlgebraPtr trivial_field(int64_t p);

// k[x]/(x^2) with |x| = 1, over any supported modulus. Over F_2 this is the
// E1 algebra whose minimal resolution of the ground field is x-periodic.
AlgebraPtr dual_numbers(Modulus mod);

// exterior algebra on x, y in degree 1 (basis 1, x, y, xy)
AlgebraPtr exterior_xy(Modulus mod);

// Z/p^2[x]/(x^2 - p), necessarily ungraded (x sits in degree 0). Reduces
// mod p to k[x]/(x^2) concentrated in degree 0.
AlgebraPtr square_lift_m2(int64_t p);

// trivial module k over the algebra: non-unit basis elements act by zero.
// Prime algebras only (over Z/p^2 the ground field is a presented module,
// owned by the track layer).
ModulePtr ground_module(AlgebraPtr a);

} // namespace secext::fixtures
