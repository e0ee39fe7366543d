#ifndef RI_SELFTEST_HPP
#define RI_SELFTEST_HPP

#include <iosfwd>

namespace ri {

// Runs the built-in invariant suite (softmax translation invariance,
// curvature and Fisher-information finite-difference identities, Pinsker,
// data processing, refinement identity, seed determinism), printing one line
// per check. Returns the number of failures.
int run_selftest(std::ostream& out);

}  // namespace ri

#endif  // RI_SELFTEST_HPP
