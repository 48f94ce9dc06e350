#pragma once
// Umbrella header for the framesim library.

#include "framesim/activation.hpp"
#include "framesim/corpus.hpp"
#include "framesim/daisy.hpp"
#include "framesim/error.hpp"
#include "framesim/fn_graph.hpp"
#include "framesim/similarity.hpp"
#include "framesim/stats.hpp"
