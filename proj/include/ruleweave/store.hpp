#pragma once

#include <cstdint>
#include <functional>
#include <list>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ruleweave/codec.hpp"
#include "ruleweave/kv.hpp"
#include "ruleweave/metamodel.hpp"
#include "ruleweave/trigger_report.hpp"

namespace ruleweave {

/// Reserved class tags for nodes the engine weaves into the graph. They use
/// a '$' prefix, which the metamodel syntax cannot produce, so they can
/// never collide with data classes. Engine-owned member names (the "$rules"
/// back-relation) follow the same convention and bypass conformance checks.
namespace kind {
inline constexpr std::string_view Rule = "$rule";
inline constexpr std::string_view And = "$cond.and";
inline constexpr std::string_view Or = "$cond.or";
inline constexpr std::string_view Not = "$cond.not";
inline constexpr std::string_view Eq = "$cond.eq";
inline constexpr std::string_view Neq = "$cond.neq";
inline constexpr std::string_view Gt = "$cond.gt";
inline constexpr std::string_view Gte = "$cond.gte";
inline constexpr std::string_view Lt = "$cond.lt";
inline constexpr std::string_view Lte = "$cond.lte";
inline constexpr std::string_view Const = "$cond.const";
inline constexpr std::string_view Ref = "$cond.ref";
}  // namespace kind

inline constexpr std::string_view kRulesRelation = "$rules";

bool is_reserved_kind(std::string_view class_name);

struct StoreStats {
  std::uint64_t loads = 0;      // backend reads that materialized a node
  std::uint64_t evictions = 0;  // nodes dropped from residency
  std::uint64_t writes = 0;     // backend puts
  std::size_t resident_count = 0;
  std::size_t max_resident = 0;  // high-water mark of resident_count
  std::size_t pinned_count = 0;  // currently pinned nodes
};

struct NodeHandle {
  NodeId id = 0;
  std::string class_name;
};

/// Persistent graph of nodes behind a bounded LRU cache. Nodes load lazily
/// from the key-value backend on access; dirty nodes write back on eviction
/// and on flush. Pinned nodes are never evicted. Single logical owner; may
/// be handed between threads at operation boundaries only.
class Store {
 public:
  using CreatedHook = std::function<void(NodeId, const std::string& class_name)>;
  using AttributeHook = std::function<TriggerReport(NodeId, const std::string& attribute)>;
  using EvictListener = std::function<void(NodeId)>;

  Store(std::shared_ptr<KvBackend> backend, std::size_t cache_capacity, const MetaModel& mm);
  ~Store();

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  /// class_name must be a metamodel class or a reserved kind tag. Fires the
  /// created hook once the node is resident.
  NodeId create_node(std::string_view class_name);

  /// Loads the node if it is not resident, evicting the least recently used
  /// unpinned node first when the cache is full.
  NodeHandle resolve(NodeId id);

  /// nullopt means the attribute is unset. Undeclared names on data nodes
  /// are an error; '$'-prefixed names and reserved-kind nodes are exempt.
  std::optional<Value> get_attribute(NodeId id, std::string_view name);

  /// Writes the attribute, then evaluates every rule registered for this
  /// (class, attribute) pair via the engine hook. Throws on type mismatch,
  /// undeclared names, and cascade-depth overflow.
  TriggerReport set_attribute(NodeId id, std::string_view name, Value value);

  void add_relation(NodeId id, std::string_view name, NodeId target);
  void remove_relation(NodeId id, std::string_view name, NodeId target);

  /// Current target list; never resolves the targets themselves.
  std::vector<NodeId> get_relation(NodeId id, std::string_view name);

  /// Pins nest: a node stays unevictable until every pin is released.
  void pin(NodeId id);
  void unpin(NodeId id);

  /// Writes every dirty node (ascending id) and the id counter.
  void flush();
  /// Flush + backend close (file backends compact). Idempotent; any other
  /// operation afterwards throws.
  void close();

  /// Evicts every unpinned resident node, writing back dirty ones.
  void evict_all();

  const StoreStats& stats() const { return stats_; }
  const MetaModel& metamodel() const { return *mm_; }
  std::size_t capacity() const { return capacity_; }
  /// Ids are dense: every id in [1, next_id) exists and is never reused.
  NodeId next_id() const { return next_id_; }

  void set_created_hook(CreatedHook hook) { on_created_ = std::move(hook); }
  void set_attribute_hook(AttributeHook hook) { on_attribute_ = std::move(hook); }
  void set_evict_listener(EvictListener listener) { on_evict_ = std::move(listener); }

 private:
  struct Entry {
    NodeRecord rec;
    bool dirty = false;
    std::uint32_t pins = 0;
    std::list<NodeId>::iterator lru_it;
  };

  void require_open() const;
  Entry& require_resident(NodeId id);
  Entry& touch(NodeId id);
  void evict_one();
  void make_room();
  void write_back(const NodeRecord& rec);
  void persist_counter();

  const ClassDef* data_class(const NodeRecord& rec) const;
  const ClassDef& checked_class(const NodeRecord& rec, std::string_view member) const;

  std::shared_ptr<KvBackend> backend_;
  const MetaModel* mm_;
  std::size_t capacity_;
  std::unordered_map<NodeId, Entry> resident_;
  std::list<NodeId> lru_;  // front = most recently used
  NodeId next_id_ = 1;
  NodeId persisted_next_id_ = 1;
  bool closed_ = false;
  StoreStats stats_;
  CreatedHook on_created_;
  AttributeHook on_attribute_;
  EvictListener on_evict_;
};

/// Pins a node for the current scope; used to keep the evaluation path
/// resident while conditions and actions run.
class PinGuard {
 public:
  PinGuard(Store& store, NodeId id) : store_(store), id_(id) { store_.pin(id_); }
  ~PinGuard() { store_.unpin(id_); }
  PinGuard(const PinGuard&) = delete;
  PinGuard& operator=(const PinGuard&) = delete;

 private:
  Store& store_;
  NodeId id_;
};

}  // namespace ruleweave
