#include <doctest.h>

#include "properties.hpp"

// Reduced runs of the randomized suites; the acceptance binary runs them at full size.

TEST_CASE("gradient matches central differences") {
  const properties::Outcome o = properties::gradient_vs_differences(40, 1e-5, 201);
  CHECK(o.checked == 40);
  CHECK(o.violations == 0);
  for (const auto& line : o.log) MESSAGE(line);
}

TEST_CASE("ball members keep their eigenvalues in the pseudospectrum") {
  const properties::Outcome o = properties::ball_inclusion(2, 20, 203);
  CHECK(o.checked == 40);
  CHECK(o.violations == 0);
  for (const auto& line : o.log) MESSAGE(line);
}
