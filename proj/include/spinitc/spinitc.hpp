#pragma once

#include "spinitc/cluster.hpp"
#include "spinitc/control.hpp"
#include "spinitc/core.hpp"
#include "spinitc/geometry.hpp"
#include "spinitc/io.hpp"
#include "spinitc/itc.hpp"
#include "spinitc/model.hpp"
#include "spinitc/spectral.hpp"
