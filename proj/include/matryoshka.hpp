#pragma once

#include "matryoshka/analysis.hpp"
#include "matryoshka/chain.hpp"
#include "matryoshka/config.hpp"
#include "matryoshka/errors.hpp"
#include "matryoshka/measures.hpp"
#include "matryoshka/nesting.hpp"
#include "matryoshka/pauli.hpp"
#include "matryoshka/propagator.hpp"
#include "matryoshka/protocols.hpp"
#include "matryoshka/state.hpp"
