// Discrete-event core: a single-threaded priority-queue scheduler with a
// monotone clock and one seeded random stream per run.
#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <random>
#include <vector>

#include "sdnft/sim_time.hpp"

namespace sdnft {

enum class EventKind : uint8_t {
  kPacketArrival,
  kTimer,
  kFailureInjection,
  kControlMessage,
  kMetricSample,
};

const char* to_string(EventKind kind);

// Small fixed payload carried by every event; the meaning is owned by the
// target component.
struct EventPayload {
  uint64_t a = 0;
  uint64_t b = 0;
};

class EventTarget;

struct Event {
  SimTime fire_at;
  uint64_t seq = 0;
  EventKind kind = EventKind::kTimer;
  EventTarget* target = nullptr;
  EventPayload payload;
};

class EventTarget {
 public:
  virtual ~EventTarget() = default;
  virtual void on_event(const Event& event) = 0;
};

struct RunConfig {
  uint64_t seed = 1;
  SimTime duration = SimTime::from_s(60);
};

class Simulator {
 public:
  explicit Simulator(uint64_t seed);
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  SimTime now() const { return now_; }

  // Enqueues an event. Scheduling before now() is a programming error and
  // aborts with a diagnostic. Returns the event's sequence number.
  uint64_t schedule(SimTime at, EventKind kind, EventTarget* target,
                    EventPayload payload = {});
  uint64_t schedule_in(SimTime delay, EventKind kind, EventTarget* target,
                       EventPayload payload = {}) {
    return schedule(now_ + delay, kind, target, payload);
  }

  // Convenience for infrequent one-shot actions.
  uint64_t call_at(SimTime at, EventKind kind, std::function<void()> fn);
  uint64_t call_in(SimTime delay, EventKind kind, std::function<void()> fn) {
    return call_at(now_ + delay, kind, std::move(fn));
  }

  // Processes every event with fire_at <= t in (fire_at, seq) order and
  // leaves the clock at t. Returns the number of events processed.
  uint64_t run_until(SimTime t);

  std::mt19937_64& rng() { return rng_; }
  uint64_t seed() const { return seed_; }
  uint64_t events_processed() const { return processed_; }
  size_t pending() const { return queue_.size(); }

  // Optional hook invoked for every dispatched event (debug tracing).
  void set_trace(std::function<void(const Event&)> trace) {
    trace_ = std::move(trace);
  }

 private:
  struct Later {
    bool operator()(const Event& x, const Event& y) const {
      if (x.fire_at != y.fire_at) return x.fire_at > y.fire_at;
      return x.seq > y.seq;
    }
  };

  class CallbackTarget : public EventTarget {
   public:
    explicit CallbackTarget(Simulator* sim) : sim_(sim) {}
    void on_event(const Event& event) override;

   private:
    Simulator* sim_;
  };

  SimTime now_;
  uint64_t seed_;
  uint64_t next_seq_ = 0;
  uint64_t processed_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::mt19937_64 rng_;
  CallbackTarget callback_target_;
  std::vector<std::function<void()>> callbacks_;
  std::vector<uint64_t> free_callbacks_;
  std::function<void(const Event&)> trace_;
};

}  // namespace sdnft
