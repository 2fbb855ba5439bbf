#pragma once

#include "dsmkit/types.hpp"
#include "dsmkit/linalg.hpp"
#include "dsmkit/random.hpp"
#include "dsmkit/structured_maps.hpp"
#include "dsmkit/dsm.hpp"
#include "dsmkit/pencil.hpp"
#include "dsmkit/oracle.hpp"
