#pragma once

#include <atomic>
#include <cstdint>

namespace kspnet::instrument {

/// Least-squares right-hand sides solved by GRAPPA calibration since start-up
/// (one per missing-row offset and target coil).
std::atomic<std::uint64_t> &LeastSquaresSolves();

} // namespace kspnet::instrument
