// ode3geo.hpp
//
// Umbrella header: the full geometry toolkit for third-order ODEs
// y''' = F(x, y, y', y'') under contact, point and fibre-preserving
// equivalence.

#pragma once

#include "ode3geo/common.hpp"
#include "ode3geo/expr.hpp"
#include "ode3geo/parser.hpp"
#include "ode3geo/normal.hpp"
#include "ode3geo/ode.hpp"
#include "ode3geo/forms.hpp"
#include "ode3geo/geometry.hpp"
#include "ode3geo/prolong.hpp"
#include "ode3geo/oracle.hpp"
#include "ode3geo/classify.hpp"
#include "ode3geo/io.hpp"
