// SPDX-License-Identifier: Apache-2.0
#include "sparsecache/simulator.hpp"

#include <algorithm>
#include <limits>

namespace sparsecache {

PrefixCache::PrefixCache(Index capacity) : capacity_(capacity) {
  if (capacity < 0) throw Error(ErrorKind::kBadParams, "capacity must be >= 0");
}

const CacheEntry* PrefixCache::find(std::int64_t insertion_index) const {
  if (entries_.empty()) return nullptr;
  const std::int64_t offset = insertion_index - entries_.front().insertion_index;
  if (offset < 0 || offset >= static_cast<std::int64_t>(entries_.size())) return nullptr;
  return &entries_[static_cast<std::size_t>(offset)];
}

std::optional<PrefixCache::Hit> PrefixCache::match_longest_prefix(
    const Request& request) const {
  if (entries_.empty()) return std::nullopt;

  if (request.depth_mode()) {
    const Index depth = *request.overlap_depth;
    if (depth < 1) return std::nullopt;
    for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
      if (it->length >= depth) return Hit{&*it, depth};
    }
    const CacheEntry& latest = entries_.back();
    return Hit{&latest, std::min(depth, latest.length)};
  }

  const auto match = trie_.longest_match(request.tokens);
  if (!match) return std::nullopt;
  return Hit{find(match->key), match->depth};
}

void PrefixCache::insert(CacheEntry entry) {
  if (capacity_ == 0) return;
  entry.insertion_index = next_index_++;
  if (!entry.tokens.empty()) trie_.insert(entry.tokens, entry.insertion_index);
  resident_slots_ += entry.checkpoints.size();
  resident_tokens_ += entry.length;
  entries_.push_back(std::move(entry));
  while (static_cast<Index>(entries_.size()) > capacity_) {
    const CacheEntry& oldest = entries_.front();
    if (!oldest.tokens.empty()) trie_.erase(oldest.tokens);
    resident_slots_ -= oldest.checkpoints.size();
    resident_tokens_ -= oldest.length;
    entries_.pop_front();
  }
}

namespace {

// The estimate restricted to depths 1..length, zero-padded when the entry is
// longer than the tracked range. Empty when it carries no mass there.
std::optional<OverlapHistogram> planning_histogram(const OverlapHistogram& h,
                                                   Index length) {
  const Index shared = std::min(length, h.size());
  if (h.prefix_mass(shared) <= 0.0) return std::nullopt;
  if (length <= h.size()) return h.truncated(length);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(length);
  counts.head(shared) = h.mass();
  return OverlapHistogram::from_counts(counts);
}

}  // namespace

Simulator::Simulator(const SimConfig& config, Index estimator_positions)
    : config_(config),
      cache_(config.capacity),
      estimator_(estimator_positions, config.decay) {
  if (config.refresh_every < 1) {
    throw Error(ErrorKind::kBadParams, "refresh cadence must be >= 1");
  }
  if (config.planner.budget < 0) {
    throw Error(ErrorKind::kBadParams, "budget must be >= 0");
  }
}

const CheckpointSet& Simulator::schedule_for(Index length) {
  if (auto it = schedules_.find(length); it != schedules_.end()) return it->second;

  PlannerConfig planner = config_.planner;
  planner.budget = std::min(planner.budget, length);
  std::optional<OverlapHistogram> h;
  if (snapshot_ && planner.strategy == Strategy::kDp) {
    h = planning_histogram(*snapshot_, length);
  }
  CheckpointSet schedule = plan(planner, length, h ? &*h : nullptr);
  return schedules_.emplace(length, std::move(schedule)).first->second;
}

RequestRecord Simulator::serve(const Request& request) {
  const Index length = request.length();
  if (length < 1) throw Error(ErrorKind::kBadInput, "request has no tokens");

  RequestRecord rec;
  rec.id = request.id;
  rec.group = request.group;
  rec.length = length;

  if (const auto hit = cache_.match_longest_prefix(request)) {
    rec.hit = true;
    rec.overlap_depth = std::min(hit->depth, length);
    rec.reusable_depth = reusable_depth(hit->entry->checkpoints, rec.overlap_depth);
    rec.recompute = rec.overlap_depth - rec.reusable_depth;
  }
  rec.new_suffix = length - rec.overlap_depth;

  // Plan before mutating anything so a planner failure leaves state intact.
  std::optional<CacheEntry> entry;
  if (cache_.capacity() > 0) {
    entry.emplace();
    entry->length = length;
    entry->checkpoints = schedule_for(length);
    if (!request.depth_mode()) entry->tokens = request.tokens;
  }

  if (rec.hit) {
    const auto clamped_before = estimator_.clamped_count();
    estimator_.observe(rec.overlap_depth);
    totals_.clamped_depths += estimator_.clamped_count() - clamped_before;
  }

  if (entry) {
    rec.slots = entry->checkpoints.size();
    totals_.inserted_entries += 1;
    totals_.inserted_slots += rec.slots;
    cache_.insert(std::move(*entry));
    const auto& cost = config_.cost_model;
    totals_.peak_resident_slots =
        std::max(totals_.peak_resident_slots, cache_.resident_slots());
    totals_.peak_resident_bytes = std::max(
        totals_.peak_resident_bytes,
        cache_.resident_slots() * cost.recurrent_bytes_per_checkpoint +
            cache_.resident_tokens() * cost.kv_bytes_per_token);
  }

  // New schedules take effect for later insertions only.
  if (rec.hit) {
    ++hits_since_refresh_;
    if (!snapshot_ || hits_since_refresh_ >= config_.refresh_every) {
      snapshot_ = estimator_.snapshot();
      schedules_.clear();
      hits_since_refresh_ = 0;
      ++totals_.refreshes;
    }
  }

  totals_.requests += 1;
  totals_.hits += rec.hit ? 1 : 0;
  totals_.total_overlap += rec.overlap_depth;
  totals_.total_recompute += rec.recompute;
  totals_.total_new_tokens += rec.new_suffix;
  return rec;
}

SimSummary Simulator::summary() const {
  SimSummary s = totals_;
  s.hit_rate = s.requests ? static_cast<double>(s.hits) / s.requests : 0.0;
  if (s.total_overlap > 0) {
    s.savings = 1.0 - static_cast<double>(s.total_recompute) / s.total_overlap;
    s.reduction = s.total_recompute > 0
                      ? static_cast<double>(s.total_overlap) / s.total_recompute
                      : std::numeric_limits<double>::infinity();
  }
  s.mean_slots_per_entry =
      s.inserted_entries
          ? static_cast<double>(s.inserted_slots) / s.inserted_entries
          : 0.0;
  return s;
}

SimMetrics run_simulation(std::span<const Request> requests, const SimConfig& config) {
  if (requests.empty()) throw Error(ErrorKind::kEmptyTrace, "trace has no requests");
  Index longest = 0;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    longest = std::max(longest, requests[i].length());
    if (i > 0 && requests[i].arrival_time < requests[i - 1].arrival_time) {
      throw Error(ErrorKind::kBadInput, "trace is not sorted by arrival_time");
    }
  }
  const Index tracked =
      config.estimator_positions > 0 ? config.estimator_positions : longest;

  Simulator sim(config, std::max<Index>(tracked, 1));
  SimMetrics metrics;
  metrics.records.reserve(requests.size());
  for (const Request& r : requests) metrics.records.push_back(sim.serve(r));
  metrics.summary = sim.summary();
  return metrics;
}

}  // namespace sparsecache
