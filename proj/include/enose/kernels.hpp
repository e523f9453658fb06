#pragma once

#include <span>
#include <vector>

#include "enose/core.hpp"
#include "enose/nn.hpp"

namespace enose {

// Batch inference over normalized inputs. The *_serial variants are the
// reference implementations; the unsuffixed ones split samples across
// OpenMP threads and must produce bit-identical results.

std::vector<ClassVector> forward_batch_serial(const Network& network,
                                              std::span<const ChannelArray> inputs);
std::vector<ClassVector> forward_batch(const Network& network, std::span<const ChannelArray> inputs);

std::vector<ChannelArray> scale_batch_serial(const Scaler& scaler, const Dataset& dataset);
std::vector<ChannelArray> scale_batch(const Scaler& scaler, const Dataset& dataset);

/// Number of OpenMP threads the parallel kernels will use (1 without OpenMP).
int kernel_threads();

}  // namespace enose
