#pragma once

#include <map>
#include <string>
#include <vector>

namespace blockgs {

/// Accounting for global synchronization events.  One collective rendezvous
/// counts once, no matter how many ranks take part or how many logical
/// products were fused into its payload; words_reduced counts the real64
/// values the event combined (the size of its result payload).
struct SyncStats {
  long sync_count = 0;
  long words_reduced = 0;
  std::map<std::string, long> label_counts;
  std::vector<std::string> event_labels;  // one entry per event, issue order

  void record(const std::string& label, long words) {
    ++sync_count;
    words_reduced += words;
    ++label_counts[label];
    event_labels.push_back(label);
  }

  void reset() { *this = SyncStats{}; }
};

/// Events recorded after `before` was captured (sub-range of `after`).
inline SyncStats stats_since(const SyncStats& before, const SyncStats& after) {
  SyncStats out;
  out.sync_count = after.sync_count - before.sync_count;
  out.words_reduced = after.words_reduced - before.words_reduced;
  out.event_labels.assign(
      after.event_labels.begin() + static_cast<long>(before.sync_count),
      after.event_labels.end());
  for (const auto& label : out.event_labels) ++out.label_counts[label];
  return out;
}

}  // namespace blockgs
