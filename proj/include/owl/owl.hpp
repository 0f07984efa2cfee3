#pragma once

// Umbrella header: the visual-motion calculus (looming + perceived rotation
// fused into translation/range ratios), scaled reconstruction, heading
// recovery, and the scene simulator that feeds them.

#include "owl/circle_fit.hpp"
#include "owl/counter_rng.hpp"
#include "owl/cues.hpp"
#include "owl/errors.hpp"
#include "owl/owl_domain.hpp"
#include "owl/parallel.hpp"
#include "owl/quaternion.hpp"
#include "owl/reconstruction.hpp"
#include "owl/simulator.hpp"
#include "owl/spherical.hpp"
#include "owl/track.hpp"
#include "owl/vec3.hpp"
#include "owl/version.hpp"
