#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "e2boost/rng.hpp"

namespace e2boost {

/// What a device learns after a slot. Collision and Busy both mean "no feedback
/// from the BS"; they are kept apart so ledgers never confuse them with Failure.
enum class Feedback : std::uint8_t { Success, Failure, Collision, Busy };

enum class Pattern : std::uint8_t { RisAssisted, Direct };

struct Action {
  Pattern pattern = Pattern::Direct;
  int ris = -1;  // -1 for direct transmissions
  int sf = 0;    // index into the SF table

  friend bool operator==(const Action&, const Action&) = default;
};

const char* to_string(Feedback f);
const char* to_string(Pattern p);

/// One device's decision rule. Per slot the simulator calls decide() for every
/// device, resolves the slot, then calls observe() for every device.
class Policy {
 public:
  virtual ~Policy() = default;

  /// `busy` is the sensed occupancy of every RIS; a policy reads only the entry
  /// of the RIS it is about to use (perfect spectrum sensing).
  virtual Action decide(std::span<const std::uint8_t> busy, Rng& rng) = 0;
  virtual void observe(const Action& action, Feedback feedback, Rng& rng) = 0;

  /// True when the device ran its full RIS-selection logic this slot
  /// (false for round-robin members limited to direct transmission).
  virtual bool full_mode() const { return true; }
};

}  // namespace e2boost
