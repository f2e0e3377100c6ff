#pragma once

#include <cstdint>
#include <queue>
#include <stdexcept>
#include <vector>

namespace lbsim {

enum class EventKind { Arrival, Departure, SnapshotUpdate };

struct Event {
    double time;
    std::uint64_t seq;  // assigned at scheduling time, breaks time ties
    EventKind kind;
    int server_id;  // Departure only; -1 otherwise
};

// Future-event list. Pop order is (time, seq): nondecreasing time, and
// insertion order among equal times, so event processing is a
// deterministic total order on every platform.
class EventQueue {
public:
    void schedule(double time, EventKind kind, double clock, int server_id = -1) {
        if (time < clock)
            throw std::logic_error("event scheduled in the past");
        heap_.push(Event{time, next_seq_++, kind, server_id});
    }

    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }

    Event pop() {
        Event e = heap_.top();
        heap_.pop();
        return e;
    }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.seq > b.seq;
        }
    };
    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    std::uint64_t next_seq_ = 0;
};

}  // namespace lbsim
