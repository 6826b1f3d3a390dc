#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>
#include <unordered_set>

#include "opb/lattice.hpp"

namespace opb {

namespace {

class SeenSet {
 public:
  /// True when the key was not present before.
  bool insert(const CanonicalKey& key) {
    Shard& shard = shards_[CanonicalKeyHash{}(key) % kShards];
    std::lock_guard lock(shard.mutex);
    return shard.keys.insert(key).second;
  }

 private:
  static constexpr std::size_t kShards = 64;
  struct Shard {
    std::mutex mutex;
    std::unordered_set<CanonicalKey, CanonicalKeyHash> keys;
  };
  std::array<Shard, kShards> shards_;
};

}  // namespace

ClassStore enumerate_classes(int n, const EnumerateOptions& options) {
  if (n < 1 || n > kMaxQubits) throw PatternError("enumerate: n=" + std::to_string(n) + " out of range");
  const auto started = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count(); };

  ClassStore store;
  store.n = n;
  store.maximal_only = options.maximal_only;
  store.options = options;

  SeenSet seen;
  std::atomic<long long> seen_count{1};
  std::atomic<long long> canonicalized{1};
  std::atomic<bool> out_of_budget{false};

  std::vector<CanonicalKey> frontier{canonical_key(standard_matrix(n))};
  seen.insert(frontier.front());

  const int jobs = std::max(1, options.jobs);
  std::vector<std::pair<CanonicalKey, ClassInfo>> processed;

  while (!frontier.empty() && !out_of_budget) {
    std::atomic<std::size_t> cursor{0};
    std::vector<std::vector<CanonicalKey>> next(jobs);
    std::vector<std::vector<std::pair<CanonicalKey, ClassInfo>>> done(jobs);

    auto worker = [&](int id) {
      for (;;) {
        if (out_of_budget) return;
        const std::size_t i = cursor.fetch_add(1);
        if (i >= frontier.size()) return;
        const CanonicalKey& key = frontier[i];
        PatternMatrix rep = matrix_from_key(key);
        auto parents = splits(rep);
        for (const auto& [parent, desc] : parents) {
          CanonicalKey pk = canonical_key(parent);
          canonicalized.fetch_add(1, std::memory_order_relaxed);
          if (seen.insert(pk)) {
            next[id].push_back(std::move(pk));
            if (seen_count.fetch_add(1) + 1 > options.max_classes) out_of_budget = true;
          }
        }
        ClassInfo info{rep, signature(rep), parents.empty(), is_reducible(rep).has_value()};
        done[id].emplace_back(key, std::move(info));
        if (elapsed() > options.max_seconds) out_of_budget = true;
      }
    };

    if (jobs == 1) {
      worker(0);
    } else {
      std::vector<std::thread> threads;
      for (int id = 0; id < jobs; ++id) threads.emplace_back(worker, id);
      for (auto& t : threads) t.join();
    }

    frontier.clear();
    for (int id = 0; id < jobs; ++id) {
      frontier.insert(frontier.end(), std::make_move_iterator(next[id].begin()), std::make_move_iterator(next[id].end()));
      processed.insert(processed.end(), std::make_move_iterator(done[id].begin()), std::make_move_iterator(done[id].end()));
    }
  }

  store.complete = !out_of_budget && frontier.empty();
  store.classes_seen = seen_count;
  store.matrices_canonicalized = canonicalized;
  for (auto& [key, info] : processed) {
    if (info.maximal) ++store.maximal_seen;
    if (options.maximal_only && !info.maximal) continue;
    store.classes.emplace(std::move(key), std::move(info));
  }
  store.seconds = elapsed();
  return store;
}

}  // namespace opb
