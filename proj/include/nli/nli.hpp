#pragma once

// Umbrella header for the nonlinear-interferometry imaging toolkit.

#include "nli/common.hpp"
#include "nli/forward.hpp"
#include "nli/io.hpp"
#include "nli/optics.hpp"
#include "nli/plane.hpp"
#include "nli/reconstruct.hpp"
#include "nli/rng.hpp"
#include "nli/sample.hpp"
#include "nli/truncation.hpp"
#include "nli/version.hpp"
