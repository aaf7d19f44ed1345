#pragma once

#include "iim/bound_check.hpp"
#include "iim/cases.hpp"
#include "iim/errors.hpp"
#include "iim/evolution.hpp"
#include "iim/flow.hpp"
#include "iim/geometry.hpp"
#include "iim/parallel.hpp"
#include "iim/quadrature.hpp"
#include "iim/report.hpp"
#include "iim/rng.hpp"
#include "iim/scalar_field.hpp"
#include "iim/suite.hpp"
#include "iim/summation.hpp"
#include "iim/transport.hpp"
#include "iim/velocity_field.hpp"
#include "iim/verify.hpp"
#include "iim/version.hpp"
