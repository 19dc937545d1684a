#pragma once

#include "usvt/error.hpp"
#include "usvt/rng.hpp"
#include "usvt/linalg.hpp"
#include "usvt/models.hpp"
#include "usvt/io.hpp"
#include "usvt/estimator.hpp"
#include "usvt/quadrature.hpp"
#include "usvt/spectral.hpp"
#include "usvt/polyapprox.hpp"
#include "usvt/rates.hpp"
#include "usvt/harness.hpp"
