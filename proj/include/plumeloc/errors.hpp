#pragma once

#include <stdexcept>

namespace plumeloc {

// Exit-code mapping at the CLI boundary: 0 success, 2 usage, 3 validation,
// 4 sampler abort.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SamplerAbort : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace plumeloc
