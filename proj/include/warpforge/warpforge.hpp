#pragma once

// Umbrella header.

#include "warpforge/brute_force_render.hpp"
#include "warpforge/camera.hpp"
#include "warpforge/error.hpp"
#include "warpforge/geometry.hpp"
#include "warpforge/image.hpp"
#include "warpforge/io/artifacts.hpp"
#include "warpforge/io/bundle.hpp"
#include "warpforge/io/formats.hpp"
#include "warpforge/io/json_util.hpp"
#include "warpforge/io/png.hpp"
#include "warpforge/maskgen.hpp"
#include "warpforge/packing.hpp"
#include "warpforge/parallel.hpp"
#include "warpforge/random.hpp"
#include "warpforge/reprojection.hpp"
#include "warpforge/schedule.hpp"
#include "warpforge/trajectory.hpp"
