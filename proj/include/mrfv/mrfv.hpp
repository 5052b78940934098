#pragma once

#include "config.hpp"
#include "core.hpp"
#include "flux.hpp"
#include "fv.hpp"
#include "gamma_field.hpp"
#include "graded_tree.hpp"
#include "harness.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "models.hpp"
#include "mr_solver.hpp"
#include "mr_transform.hpp"
#include "presets.hpp"
#include "profile.hpp"
#include "quadrature.hpp"
#include "reference_cache.hpp"
