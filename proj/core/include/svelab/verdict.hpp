#pragma once

#include <string>

namespace svelab {

enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    default:
      return "inconclusive";
  }
}

/// pass when lhs < threshold by more than band, fail when lhs > threshold by
/// more than band, inconclusive otherwise.
inline Verdict compare_strict_less(double lhs, double threshold, double band) {
  if (lhs < threshold - band) return Verdict::pass;
  if (lhs > threshold + band) return Verdict::fail;
  return Verdict::inconclusive;
}

}  // namespace svelab
