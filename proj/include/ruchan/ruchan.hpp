#pragma once

// Umbrella include for the whole library.

#include "ruchan/core.hpp"
#include "ruchan/gellmann.hpp"
#include "ruchan/qstate.hpp"
#include "ruchan/ensemble.hpp"
#include "ruchan/manifold.hpp"
#include "ruchan/rudistance.hpp"
#include "ruchan/chanfactory.hpp"
#include "ruchan/io.hpp"
