// Umbrella header.

#pragma once

#include "rosa/benchmark.hpp"
#include "rosa/campaign.hpp"
#include "rosa/fuzzer.hpp"
#include "rosa/oracle.hpp"
#include "rosa/rng.hpp"
#include "rosa/serialization.hpp"
#include "rosa/store.hpp"
#include "rosa/target.hpp"
#include "rosa/trace.hpp"
#include "rosa/vet.hpp"
