#pragma once

// Umbrella header: quaternion scalars and matrices, the complex adjoint
// representation, QSVD and rank tools, Hermitian positive definite solves,
// matrix-variable gradients, the alternating low-rank completion solver and
// the color-image inpainting front end.

#include "qlr/quaternion.hpp"
#include "qlr/qmatrix.hpp"
#include "qlr/complex_adjoint.hpp"
#include "qlr/qsvd.hpp"
#include "qlr/hpd.hpp"
#include "qlr/mask.hpp"
#include "qlr/gradient.hpp"
#include "qlr/solver.hpp"
#include "qlr/image.hpp"
#include "qlr/png_io.hpp"
#include "qlr/inpaint.hpp"
