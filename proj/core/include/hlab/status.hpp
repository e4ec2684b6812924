#pragma once

namespace hlab {

// outcome of one verified statement.  Inconclusive: the check could not be
// evaluated (e.g. every contact search escaped); Skip: a stated hypothesis
// failed its audit, so the statement does not apply to the instance.
enum class Status { Pass, Fail, Inconclusive, Skip };

[[nodiscard]] constexpr const char* status_name(Status s) {
  switch (s) {
    case Status::Pass:
      return "PASS";
    case Status::Fail:
      return "FAIL";
    case Status::Inconclusive:
      return "INCONCLUSIVE";
    case Status::Skip:
      return "SKIP";
  }
  return "?";
}

}  // namespace hlab
