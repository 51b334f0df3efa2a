#pragma once

#include "analysis.hpp"
#include "bcs.hpp"
#include "ed.hpp"
#include "errors.hpp"
#include "integrable.hpp"
#include "io.hpp"
#include "numerics.hpp"
#include "pairmodel.hpp"
#include "protocols.hpp"
#include "version.hpp"
