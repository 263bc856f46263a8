#include "cil/error.hpp"

namespace cil {

DivergenceError::DivergenceError(int epoch, const std::string& what)
    : Error("diverged at epoch " + std::to_string(epoch) + ": " + what),
      epoch_(epoch) {}

}  // namespace cil
