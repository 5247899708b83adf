#pragma once

#include "gfspec/core.hpp"
#include "gfspec/jet.hpp"
#include "gfspec/quadrature.hpp"
#include "gfspec/net.hpp"
#include "gfspec/mollify.hpp"
#include "gfspec/seminorms.hpp"
#include "gfspec/asymptotics.hpp"
#include "gfspec/pde_suite.hpp"
