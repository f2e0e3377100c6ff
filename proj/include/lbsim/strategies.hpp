#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "lbsim/rng.hpp"

namespace lbsim {

enum class StrategyKind { Random, RoundRobin, Usq, Ssq, Hsq };

inline const char* strategy_token(StrategyKind k) {
    switch (k) {
        case StrategyKind::Random: return "random";
        case StrategyKind::RoundRobin: return "rr";
        case StrategyKind::Usq: return "usq";
        case StrategyKind::Ssq: return "ssq";
        case StrategyKind::Hsq: return "hsq";
    }
    throw std::logic_error("bad strategy kind");
}

inline StrategyKind parse_strategy(const std::string& token) {
    if (token == "random") return StrategyKind::Random;
    if (token == "rr") return StrategyKind::RoundRobin;
    if (token == "usq") return StrategyKind::Usq;
    if (token == "ssq") return StrategyKind::Ssq;
    if (token == "hsq") return StrategyKind::Hsq;
    throw std::invalid_argument("unknown strategy token: " + token);
}

// Does the strategy consume periodic queue-length snapshots?
inline bool uses_snapshots(StrategyKind k) {
    return k == StrategyKind::Ssq || k == StrategyKind::Hsq;
}

// The dispatcher's belief about per-server queue lengths. For SSQ this is
// the last snapshot verbatim; for HSQ it additionally carries one
// increment per job dispatched since that snapshot.
struct DispatcherView {
    std::vector<int> believed_lengths;

    explicit DispatcherView(int n_servers = 0)
        : believed_lengths(static_cast<std::size_t>(n_servers), 0) {}

    void apply_snapshot(const std::vector<int>& true_lengths) {
        if (true_lengths.size() != believed_lengths.size())
            throw std::logic_error("snapshot length mismatch");
        believed_lengths = true_lengths;
    }
};

// Uniform pick over [0, n_servers); one uniform per decision.
inline int choose_random(int n_servers, RandomStream& tiebreak) {
    int i = static_cast<int>(tiebreak.next_uniform() * n_servers);
    return std::min(i, n_servers - 1);
}

// Index of a minimal entry; ties resolved uniformly with a single draw.
inline int choose_shortest(const std::vector<int>& lengths,
                           RandomStream& tiebreak) {
    int min_len = *std::min_element(lengths.begin(), lengths.end());
    int ties = 0;
    for (int len : lengths)
        if (len == min_len) ++ties;
    int pick = std::min(static_cast<int>(tiebreak.next_uniform() * ties),
                        ties - 1);
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        if (lengths[i] == min_len && pick-- == 0) return static_cast<int>(i);
    }
    throw std::logic_error("unreachable");
}

// History-augmented stale shortest queue decision: draw one uniform per
// server (in server-id order), pick the minimal believed length breaking
// ties by least draw, then record the dispatch in the view. Always
// consumes exactly N uniforms.
inline int choose_hsq(DispatcherView& view, RandomStream& tiebreak) {
    const auto& len = view.believed_lengths;
    std::vector<double> draw(len.size());
    for (auto& d : draw) d = tiebreak.next_uniform();
    int best = 0;
    for (std::size_t i = 1; i < len.size(); ++i) {
        if (len[i] < len[best] ||
            (len[i] == len[best] && draw[i] < draw[best]))
            best = static_cast<int>(i);
    }
    ++view.believed_lengths[static_cast<std::size_t>(best)];
    return best;
}

// One policy instance owned by a single run. Random and RoundRobin never
// see queue lengths; USQ reads true lengths at every decision; SSQ and
// HSQ read only the snapshot view.
class Strategy {
public:
    Strategy(StrategyKind kind, int n_servers)
        : kind_(kind), n_servers_(n_servers), view_(n_servers) {}

    StrategyKind kind() const { return kind_; }
    const DispatcherView& view() const { return view_; }

    int choose(const std::vector<int>& true_lengths, RandomStream& tiebreak) {
        switch (kind_) {
            case StrategyKind::Random:
                return choose_random(n_servers_, tiebreak);
            case StrategyKind::RoundRobin: {
                int s = rr_next_;
                rr_next_ = (rr_next_ + 1) % n_servers_;
                return s;
            }
            case StrategyKind::Usq:
                return choose_shortest(true_lengths, tiebreak);
            case StrategyKind::Ssq:
                return choose_shortest(view_.believed_lengths, tiebreak);
            case StrategyKind::Hsq:
                return choose_hsq(view_, tiebreak);
        }
        throw std::logic_error("bad strategy kind");
    }

    void apply_snapshot(const std::vector<int>& true_lengths) {
        view_.apply_snapshot(true_lengths);
    }

private:
    StrategyKind kind_;
    int n_servers_;
    int rr_next_ = 0;
    DispatcherView view_;
};

}  // namespace lbsim
