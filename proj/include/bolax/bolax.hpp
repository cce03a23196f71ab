#pragma once

#include "bolax/error.hpp"
#include "bolax/fft.hpp"
#include "bolax/spectral_core.hpp"
#include "bolax/quadrature.hpp"
#include "bolax/potentials.hpp"
#include "bolax/toeplitz.hpp"
#include "bolax/krylov.hpp"
#include "bolax/green.hpp"
#include "bolax/lax_spectrum.hpp"
#include "bolax/green_birman.hpp"
#include "bolax/bo_evolve.hpp"
