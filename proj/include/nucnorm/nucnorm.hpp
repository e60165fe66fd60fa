#ifndef NUCNORM_NUCNORM_HPP
#define NUCNORM_NUCNORM_HPP

#include "nucnorm/dense_matrix.hpp"
#include "nucnorm/errors.hpp"
#include "nucnorm/householder.hpp"
#include "nucnorm/kernels.hpp"
#include "nucnorm/matrix_io.hpp"
#include "nucnorm/randnn.hpp"
#include "nucnorm/rng.hpp"
#include "nucnorm/svd.hpp"
#include "nucnorm/testmat.hpp"

#endif // NUCNORM_NUCNORM_HPP
