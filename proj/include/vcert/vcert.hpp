#pragma once

#include "vcert/bernstein.hpp"
#include "vcert/certify.hpp"
#include "vcert/cones.hpp"
#include "vcert/error.hpp"
#include "vcert/generator_set.hpp"
#include "vcert/linalg.hpp"
#include "vcert/lp.hpp"
#include "vcert/oracle.hpp"
#include "vcert/rng.hpp"
