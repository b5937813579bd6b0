#pragma once

#include "mngap/errors.hpp"
#include "mngap/io.hpp"
#include "mngap/model.hpp"
#include "mngap/operators.hpp"
#include "mngap/quadrature.hpp"
#include "mngap/random.hpp"
#include "mngap/scan.hpp"
#include "mngap/solver.hpp"
#include "mngap/verify.hpp"
