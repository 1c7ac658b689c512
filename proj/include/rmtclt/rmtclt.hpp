#pragma once

#include "rmtclt/analysis.hpp"
#include "rmtclt/eigensolver.hpp"
#include "rmtclt/ensemble.hpp"
#include "rmtclt/error.hpp"
#include "rmtclt/harness.hpp"
#include "rmtclt/io.hpp"
#include "rmtclt/numeric.hpp"
#include "rmtclt/philox.hpp"
#include "rmtclt/quadrature.hpp"
#include "rmtclt/spectral.hpp"
#include "rmtclt/stats.hpp"
#include "rmtclt/test_function.hpp"
#include "rmtclt/theory.hpp"
