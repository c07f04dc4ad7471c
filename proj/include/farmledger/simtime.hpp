#pragma once

#include <chrono>

namespace farmledger {

/// Simulated time, measured from the start of a run.
using SimTime = std::chrono::milliseconds;
using SimDuration = std::chrono::milliseconds;

}  // namespace farmledger
