#include "llespec/errors.hpp"

namespace llespec {

int exit_code_for(const Error& e) noexcept {
  if (dynamic_cast<const ValidationError*>(&e)) return 2;
  if (dynamic_cast<const CapacityError*>(&e)) return 4;
  return 3;
}

}  // namespace llespec
