// Umbrella header.
#pragma once

#include "suction/camera.hpp"
#include "suction/core.hpp"
#include "suction/dataset.hpp"
#include "suction/denoiser.hpp"
#include "suction/diffusion.hpp"
#include "suction/eval.hpp"
#include "suction/features.hpp"
#include "suction/mesh.hpp"
#include "suction/normals.hpp"
#include "suction/point_cloud.hpp"
#include "suction/raster.hpp"
#include "suction/raycast.hpp"
#include "suction/rng.hpp"
#include "suction/sampler.hpp"
#include "suction/scene.hpp"
#include "suction/scoring.hpp"
#include "suction/train.hpp"
