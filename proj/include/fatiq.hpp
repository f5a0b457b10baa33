#pragma once

#include "fatiq/errors.hpp"
#include "fatiq/health.hpp"
#include "fatiq/ibeam.hpp"
#include "fatiq/io.hpp"
#include "fatiq/laplace.hpp"
#include "fatiq/loading.hpp"
#include "fatiq/parallel.hpp"
#include "fatiq/rng.hpp"
#include "fatiq/specimen.hpp"
#include "fatiq/stats.hpp"
#include "fatiq/structure.hpp"
