#pragma once

#include "stiefel_kn/averaging.hpp"
#include "stiefel_kn/errors.hpp"
#include "stiefel_kn/experiments.hpp"
#include "stiefel_kn/maps.hpp"
#include "stiefel_kn/matrix_kernels.hpp"
#include "stiefel_kn/random.hpp"
#include "stiefel_kn/sample_io.hpp"
#include "stiefel_kn/stiefel.hpp"
