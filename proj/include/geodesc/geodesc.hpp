#pragma once

#include "geodesc/camera.hpp"
#include "geodesc/cloth.hpp"
#include "geodesc/depth.hpp"
#include "geodesc/error.hpp"
#include "geodesc/evaluation.hpp"
#include "geodesc/geobit.hpp"
#include "geodesc/geodesic.hpp"
#include "geodesc/harris.hpp"
#include "geodesc/image.hpp"
#include "geodesc/io/csv.hpp"
#include "geodesc/io/dumps.hpp"
#include "geodesc/io/png.hpp"
#include "geodesc/matching.hpp"
#include "geodesc/mesh.hpp"
#include "geodesc/parallel.hpp"
#include "geodesc/patch.hpp"
#include "geodesc/pipeline.hpp"
#include "geodesc/random.hpp"
#include "geodesc/render.hpp"
#include "geodesc/simulation.hpp"
#include "geodesc/texture.hpp"
#include "geodesc/tps.hpp"
