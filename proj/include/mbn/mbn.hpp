#pragma once

// Umbrella header.
#include "mbn/bloch.hpp"
#include "mbn/catalog.hpp"
#include "mbn/core.hpp"
#include "mbn/dynamics.hpp"
#include "mbn/generators.hpp"
#include "mbn/linalg.hpp"
#include "mbn/measures.hpp"
#include "mbn/random.hpp"
#include "mbn/tomography.hpp"
