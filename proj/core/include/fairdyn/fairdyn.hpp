#pragma once

#include "fairdyn/control.hpp"
#include "fairdyn/dynamics.hpp"
#include "fairdyn/equilibrium.hpp"
#include "fairdyn/error.hpp"
#include "fairdyn/ingest.hpp"
#include "fairdyn/interp.hpp"
#include "fairdyn/parallel.hpp"
#include "fairdyn/policy.hpp"
#include "fairdyn/population.hpp"
#include "fairdyn/roots.hpp"
#include "fairdyn/simulate.hpp"
#include "fairdyn/specfun.hpp"
