#include "sdnft/simulator.hpp"

#include <cstdio>
#include <cstdlib>

namespace sdnft {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kPacketArrival:
      return "packet_arrival";
    case EventKind::kTimer:
      return "timer";
    case EventKind::kFailureInjection:
      return "failure_injection";
    case EventKind::kControlMessage:
      return "control_message";
    case EventKind::kMetricSample:
      return "metric_sample";
  }
  return "unknown";
}

Simulator::Simulator(uint64_t seed)
    : seed_(seed), rng_(seed), callback_target_(this) {}

uint64_t Simulator::schedule(SimTime at, EventKind kind, EventTarget* target,
                             EventPayload payload) {
  if (at < now_) {
    std::fprintf(stderr,
                 "fatal: event of kind %s scheduled at %s, before the current "
                 "time %s\n",
                 to_string(kind), at.to_string().c_str(),
                 now_.to_string().c_str());
    std::abort();
  }
  const uint64_t seq = next_seq_++;
  queue_.push(Event{at, seq, kind, target, payload});
  return seq;
}

uint64_t Simulator::call_at(SimTime at, EventKind kind,
                            std::function<void()> fn) {
  uint64_t slot;
  if (!free_callbacks_.empty()) {
    slot = free_callbacks_.back();
    free_callbacks_.pop_back();
    callbacks_[slot] = std::move(fn);
  } else {
    slot = callbacks_.size();
    callbacks_.push_back(std::move(fn));
  }
  return schedule(at, kind, &callback_target_, EventPayload{slot, 0});
}

void Simulator::CallbackTarget::on_event(const Event& event) {
  const uint64_t slot = event.payload.a;
  std::function<void()> fn = std::move(sim_->callbacks_[slot]);
  sim_->callbacks_[slot] = nullptr;
  sim_->free_callbacks_.push_back(slot);
  fn();
}

uint64_t Simulator::run_until(SimTime t) {
  uint64_t count = 0;
  while (!queue_.empty() && queue_.top().fire_at <= t) {
    const Event event = queue_.top();
    queue_.pop();
    now_ = event.fire_at;
    if (trace_) trace_(event);
    event.target->on_event(event);
    ++count;
  }
  if (t > now_) now_ = t;
  processed_ += count;
  return count;
}

}  // namespace sdnft
