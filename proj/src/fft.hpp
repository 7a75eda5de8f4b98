#pragma once

#include <cstddef>
#include <vector>

#include "types.hpp"

namespace ofdr {

// Complex DFT, any length. Forward uses e^{-j2pi kn/N}; inverse applies 1/N.
// Plans are cached per size; execution is thread-safe.
void fft_forward(std::vector<cplx>& data);
void fft_inverse(std::vector<cplx>& data);

void fft_forward(const cplx* in, cplx* out, size_t n);
void fft_inverse(const cplx* in, cplx* out, size_t n);

// Name of the backend in use ("fftw3" or "builtin"), for run manifests.
const char* fft_backend();

}  // namespace ofdr
