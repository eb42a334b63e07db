#pragma once

#include "nlfv/error.hpp"
#include "nlfv/experiments.hpp"
#include "nlfv/grid.hpp"
#include "nlfv/invariants.hpp"
#include "nlfv/measure.hpp"
#include "nlfv/particles.hpp"
#include "nlfv/quadrature.hpp"
#include "nlfv/scheme.hpp"
#include "nlfv/transport_oracle.hpp"
#include "nlfv/velocity.hpp"
#include "nlfv/wasserstein.hpp"
