#pragma once

#include "skewmod/bases.hpp"
#include "skewmod/gamma_laplace.hpp"
#include "skewmod/modulated.hpp"
#include "skewmod/numerics.hpp"
#include "skewmod/perturbations.hpp"
#include "skewmod/rng.hpp"
#include "skewmod/samplers.hpp"
#include "skewmod/transforms.hpp"
