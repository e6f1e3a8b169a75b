#ifndef NSPLAN_RL_REPLAY_HPP
#define NSPLAN_RL_REPLAY_HPP

#include <cstdint>
#include <deque>
#include <map>
#include <random>
#include <vector>

#include "nsplan/errors.hpp"
#include "nsplan/strips/task.hpp"

namespace nsplan {

// One visited non-terminal state with everything needed to recompute its
// TD target later: applicable actions, successors, cached shaped rewards
// and terminal flags. Rewards and potentials are pure functions of the
// states, so caching them at push time is exact.
struct BufferEntry {
    const GroundTask* task = nullptr;
    State state;
    std::vector<int> actions;
    std::vector<State> successors;
    std::vector<double> reward;    // shaped reward per successor
    std::vector<char> succ_goal;   // successor satisfies the goal
    std::vector<char> succ_dead;   // non-goal successor without actions
    double phi = 0.0;              // potential of `state`
};

// FIFO replay buffer bucketed by object count. The globally oldest entry
// retires when the capacity is reached, regardless of its bucket.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {}

    void push(BufferEntry entry) {
        std::size_t key = entry.task->object_count();
        buckets_[key].push_back({stamp_++, std::move(entry)});
        ++size_;
        while (size_ > capacity_) evict_oldest();
    }

    // Bucket chosen uniformly among the non-empty ones, then entries
    // uniformly with replacement within it.
    std::vector<const BufferEntry*> sample(std::size_t batch, std::mt19937_64& rng) const {
        if (size_ == 0) throw TaskError("replay buffer is empty");
        std::size_t pick = rng() % buckets_.size();
        auto it = buckets_.begin();
        std::advance(it, pick);
        const auto& bucket = it->second;
        std::vector<const BufferEntry*> out;
        out.reserve(batch);
        for (std::size_t i = 0; i < batch; ++i)
            out.push_back(&bucket[rng() % bucket.size()].second);
        return out;
    }

    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }
    std::map<std::size_t, std::size_t> bucket_sizes() const {
        std::map<std::size_t, std::size_t> out;
        for (const auto& [k, b] : buckets_) out[k] = b.size();
        return out;
    }

private:
    void evict_oldest() {
        auto oldest = buckets_.end();
        for (auto it = buckets_.begin(); it != buckets_.end(); ++it)
            if (oldest == buckets_.end() ||
                it->second.front().first < oldest->second.front().first)
                oldest = it;
        oldest->second.pop_front();
        --size_;
        if (oldest->second.empty()) buckets_.erase(oldest);
    }

    std::size_t capacity_;
    std::size_t size_ = 0;
    uint64_t stamp_ = 0;
    // keyed by |O|; empty buckets are erased so sampling sees only
    // non-empty ones
    std::map<std::size_t, std::deque<std::pair<uint64_t, BufferEntry>>> buckets_;
};

}  // namespace nsplan

#endif
