#include "enose/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace enose {

std::vector<ClassVector> forward_batch_serial(const Network& network,
                                              std::span<const ChannelArray> inputs) {
  std::vector<ClassVector> out(inputs.size());
  std::vector<double> hidden(network.hidden_size());
  for (std::size_t n = 0; n < inputs.size(); ++n) forward_into(network, inputs[n], hidden, out[n]);
  return out;
}

std::vector<ClassVector> forward_batch(const Network& network, std::span<const ChannelArray> inputs) {
  std::vector<ClassVector> out(inputs.size());
  const auto count = static_cast<std::ptrdiff_t>(inputs.size());
#pragma omp parallel
  {
    std::vector<double> hidden(network.hidden_size());
#pragma omp for schedule(static)
    for (std::ptrdiff_t n = 0; n < count; ++n)
      forward_into(network, inputs[static_cast<std::size_t>(n)], hidden,
                   out[static_cast<std::size_t>(n)]);
  }
  return out;
}

std::vector<ChannelArray> scale_batch_serial(const Scaler& scaler, const Dataset& dataset) {
  std::vector<ChannelArray> out;
  out.reserve(dataset.size());
  for (const auto& s : dataset.samples) out.push_back(scaler.apply(s.frame));
  return out;
}

std::vector<ChannelArray> scale_batch(const Scaler& scaler, const Dataset& dataset) {
  std::vector<ChannelArray> out(dataset.size());
  const auto count = static_cast<std::ptrdiff_t>(dataset.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t n = 0; n < count; ++n)
    out[static_cast<std::size_t>(n)] = scaler.apply(dataset.samples[static_cast<std::size_t>(n)].frame);
  return out;
}

int kernel_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace enose
