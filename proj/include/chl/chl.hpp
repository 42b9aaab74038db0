#pragma once

#include "chl/analysis.hpp"
#include "chl/bench.hpp"
#include "chl/jump.hpp"
#include "chl/mix.hpp"
#include "chl/rendezvous.hpp"
#include "chl/report.hpp"
#include "chl/ring.hpp"
