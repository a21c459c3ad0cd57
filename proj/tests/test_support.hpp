#pragma once

#include "secrecy/linalg.hpp"

// Channel matrices and matrix power constraint of the running 2x2 instance
// used across the suite.
inline secrecy::Matrix instance_hr() {
  secrecy::Matrix h(2, 2);
  h << 1.8, 2.0, 1.0, 3.0;
  return h;
}

inline secrecy::Matrix instance_he() {
  secrecy::Matrix h(2, 2);
  h << 3.3, 1.3, 2.0, -1.5;
  return h;
}

inline secrecy::SymMatrix instance_s() {
  secrecy::Matrix s(2, 2);
  s << 5.0, 1.25, 1.25, 10.0;
  return secrecy::SymMatrix(s);
}
