#pragma once

#include <gmpxx.h>

namespace fairmatch {

/// Arbitrary-precision rational in canonical (reduced, positive denominator) form.
using Rational = mpq_class;

}  // namespace fairmatch
