#pragma once

#include "oblique/actuators.hpp"
#include "oblique/csv.hpp"
#include "oblique/errors.hpp"
#include "oblique/fem.hpp"
#include "oblique/linalg.hpp"
#include "oblique/projection.hpp"
#include "oblique/quadrature.hpp"
#include "oblique/spectral.hpp"
