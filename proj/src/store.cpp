#include "ruleweave/store.hpp"

#include <algorithm>

#include "ruleweave/diagnostics.hpp"

namespace ruleweave {

bool is_reserved_kind(std::string_view class_name) {
  return !class_name.empty() && class_name[0] == '$';
}

namespace {

bool is_engine_member(std::string_view name) { return !name.empty() && name[0] == '$'; }

bool known_kind(std::string_view tag) {
  return tag == kind::Rule || tag == kind::And || tag == kind::Or || tag == kind::Not ||
         tag == kind::Eq || tag == kind::Neq || tag == kind::Gt || tag == kind::Gte ||
         tag == kind::Lt || tag == kind::Lte || tag == kind::Const || tag == kind::Ref;
}

}  // namespace

Store::Store(std::shared_ptr<KvBackend> backend, std::size_t cache_capacity, const MetaModel& mm)
    : backend_(std::move(backend)), mm_(&mm), capacity_(cache_capacity) {
  if (capacity_ < 1) throw Error(Errc::Precondition, "cache capacity must be >= 1");
  if (!backend_) throw Error(Errc::Precondition, "null backend");

  // Resume the id counter past anything already persisted. The stored
  // counter alone is not trusted: an unclean shutdown may have evicted
  // nodes beyond it.
  if (auto meta = backend_->get(meta_key())) {
    std::size_t pos = 0;
    next_id_ = read_leb128(std::span<const std::uint8_t>(*meta), pos);
  }
  Bytes prefix{kTagNode};
  backend_->iterate_prefix(prefix, [&](std::span<const std::uint8_t> key) {
    if (key.size() != 9) throw Error(Errc::Corrupt, "bad node key length");
    std::uint64_t id = 0;
    for (int i = 1; i < 9; ++i) id = (id << 8) | key[i];
    next_id_ = std::max(next_id_, id + 1);
  });
  persisted_next_id_ = next_id_;
}

Store::~Store() {
  try {
    close();
  } catch (...) {
  }
}

void Store::require_open() const {
  if (closed_) throw Error(Errc::UseAfterClose, "store is closed");
}

const ClassDef* Store::data_class(const NodeRecord& rec) const {
  if (is_reserved_kind(rec.class_name)) return nullptr;
  return mm_->lookup_class(rec.class_name);
}

const ClassDef& Store::checked_class(const NodeRecord& rec, std::string_view member) const {
  const ClassDef* cls = data_class(rec);
  if (!cls)
    throw Error(Errc::UnknownClass,
                "node " + std::to_string(rec.id) + " of kind " + rec.class_name +
                    " has no declared member '" + std::string(member) + "'");
  return *cls;
}

void Store::write_back(const NodeRecord& rec) {
  Bytes key = node_key(rec.id);
  Bytes value = encode_node(rec);
  backend_->put(key, value);
  ++stats_.writes;
}

void Store::evict_one() {
  for (auto it = lru_.rbegin(); it != lru_.rend(); ++it) {
    auto ent = resident_.find(*it);
    if (ent->second.pins > 0) continue;
    NodeId victim = *it;
    if (ent->second.dirty) write_back(ent->second.rec);
    lru_.erase(std::next(it).base());
    resident_.erase(ent);
    --stats_.resident_count;
    ++stats_.evictions;
    if (on_evict_) on_evict_(victim);
    return;
  }
  throw Error(Errc::CacheExhausted,
              "cannot evict: all " + std::to_string(resident_.size()) + " resident nodes pinned");
}

void Store::make_room() {
  while (resident_.size() >= capacity_) evict_one();
}

Store::Entry& Store::touch(NodeId id) {
  auto it = resident_.find(id);
  lru_.splice(lru_.begin(), lru_, it->second.lru_it);
  return it->second;
}

Store::Entry& Store::require_resident(NodeId id) {
  require_open();
  auto it = resident_.find(id);
  if (it != resident_.end()) return touch(id);

  if (id == 0 || id >= next_id_) throw Error(Errc::UnknownId, std::to_string(id));
  auto raw = backend_->get(node_key(id));
  if (!raw) throw Error(Errc::UnknownId, std::to_string(id));
  NodeRecord rec = decode_node(id, *raw);
  ++stats_.loads;

  make_room();
  lru_.push_front(id);
  Entry& entry = resident_[id];
  entry.rec = std::move(rec);
  entry.lru_it = lru_.begin();
  stats_.resident_count = resident_.size();
  stats_.max_resident = std::max(stats_.max_resident, stats_.resident_count);
  return entry;
}

NodeId Store::create_node(std::string_view class_name) {
  require_open();
  if (!is_reserved_kind(class_name)) {
    if (!mm_->lookup_class(class_name)) throw Error(Errc::UnknownClass, std::string(class_name));
  } else if (!known_kind(class_name)) {
    throw Error(Errc::UnknownClass, std::string(class_name));
  }

  make_room();
  NodeId id = next_id_++;
  lru_.push_front(id);
  Entry& entry = resident_[id];
  entry.rec.id = id;
  entry.rec.class_name = std::string(class_name);
  entry.dirty = true;
  entry.lru_it = lru_.begin();
  stats_.resident_count = resident_.size();
  stats_.max_resident = std::max(stats_.max_resident, stats_.resident_count);

  if (on_created_) on_created_(id, std::string(class_name));
  return id;
}

NodeHandle Store::resolve(NodeId id) {
  Entry& entry = require_resident(id);
  return NodeHandle{id, entry.rec.class_name};
}

std::optional<Value> Store::get_attribute(NodeId id, std::string_view name) {
  Entry& entry = require_resident(id);
  if (!is_engine_member(name) && !is_reserved_kind(entry.rec.class_name)) {
    const ClassDef& cls = checked_class(entry.rec, name);
    if (!cls.find_attribute(name))
      throw Error(Errc::UnknownAttribute, cls.qualified_name + "." + std::string(name));
  }
  auto it = entry.rec.attributes.find(std::string(name));
  if (it == entry.rec.attributes.end()) return std::nullopt;
  return it->second;
}

TriggerReport Store::set_attribute(NodeId id, std::string_view name, Value value) {
  Entry& entry = require_resident(id);
  if (!is_engine_member(name) && !is_reserved_kind(entry.rec.class_name)) {
    const ClassDef& cls = checked_class(entry.rec, name);
    const AttributeDef* attr = cls.find_attribute(name);
    if (!attr) throw Error(Errc::UnknownAttribute, cls.qualified_name + "." + std::string(name));
    if (attr->value_type != value.kind())
      throw Error(Errc::TypeMismatch, cls.qualified_name + "." + std::string(name) + " is " +
                                          to_string(attr->value_type) + ", got " +
                                          to_string(value.kind()));
  }
  entry.rec.attributes.insert_or_assign(std::string(name), std::move(value));
  entry.dirty = true;

  if (on_attribute_) return on_attribute_(id, std::string(name));
  return {};
}

void Store::add_relation(NodeId id, std::string_view name, NodeId target) {
  bool many = true;
  {
    Entry& entry = require_resident(id);
    if (!is_engine_member(name) && !is_reserved_kind(entry.rec.class_name)) {
      const ClassDef& cls = checked_class(entry.rec, name);
      const ReferenceDef* ref = cls.find_reference(name);
      if (!ref) throw Error(Errc::UnknownRelation, cls.qualified_name + "." + std::string(name));
      many = ref->many;
      // resolving the target may evict `id`; re-resolve below
      NodeHandle th = resolve(target);
      if (th.class_name != ref->target_class)
        throw Error(Errc::ClassMismatch, "relation " + cls.qualified_name + "." +
                                             std::string(name) + " targets " + ref->target_class +
                                             ", got " + th.class_name);
    }
  }
  Entry& entry = require_resident(id);
  auto& targets = entry.rec.relations[std::string(name)];
  if (std::find(targets.begin(), targets.end(), target) != targets.end()) return;
  if (!many && !targets.empty())
    targets[0] = target;  // single-valued re-add replaces
  else
    targets.push_back(target);
  entry.dirty = true;
}

void Store::remove_relation(NodeId id, std::string_view name, NodeId target) {
  Entry& entry = require_resident(id);
  if (!is_engine_member(name) && !is_reserved_kind(entry.rec.class_name)) {
    const ClassDef& cls = checked_class(entry.rec, name);
    if (!cls.find_reference(name))
      throw Error(Errc::UnknownRelation, cls.qualified_name + "." + std::string(name));
  }
  auto it = entry.rec.relations.find(std::string(name));
  if (it == entry.rec.relations.end()) return;
  auto& targets = it->second;
  auto pos = std::find(targets.begin(), targets.end(), target);
  if (pos == targets.end()) return;
  targets.erase(pos);
  entry.dirty = true;
}

std::vector<NodeId> Store::get_relation(NodeId id, std::string_view name) {
  Entry& entry = require_resident(id);
  if (!is_engine_member(name) && !is_reserved_kind(entry.rec.class_name)) {
    const ClassDef& cls = checked_class(entry.rec, name);
    if (!cls.find_reference(name))
      throw Error(Errc::UnknownRelation, cls.qualified_name + "." + std::string(name));
  }
  auto it = entry.rec.relations.find(std::string(name));
  if (it == entry.rec.relations.end()) return {};
  return it->second;
}

void Store::pin(NodeId id) {
  Entry& entry = require_resident(id);
  if (entry.pins == 0) {
    if (stats_.pinned_count >= capacity_)
      throw Error(Errc::PinOverflow, "pinned " + std::to_string(stats_.pinned_count) +
                                         " of capacity " + std::to_string(capacity_));
    ++stats_.pinned_count;
  }
  ++entry.pins;
}

void Store::unpin(NodeId id) {
  require_open();
  auto it = resident_.find(id);
  if (it == resident_.end() || it->second.pins == 0)
    throw Error(Errc::Precondition, "unpin of unpinned node " + std::to_string(id));
  if (--it->second.pins == 0) --stats_.pinned_count;
}

void Store::persist_counter() {
  if (persisted_next_id_ == next_id_) return;
  Bytes value;
  append_leb128(value, next_id_);
  backend_->put(meta_key(), value);
  ++stats_.writes;
  persisted_next_id_ = next_id_;
}

void Store::flush() {
  require_open();
  std::vector<NodeId> dirty;
  for (const auto& [id, entry] : resident_)
    if (entry.dirty) dirty.push_back(id);
  std::sort(dirty.begin(), dirty.end());
  for (NodeId id : dirty) {
    Entry& entry = resident_.find(id)->second;
    write_back(entry.rec);
    entry.dirty = false;
  }
  persist_counter();
  backend_->flush();
}

void Store::evict_all() {
  require_open();
  std::size_t pinned = stats_.pinned_count;
  while (resident_.size() > pinned) evict_one();
}

void Store::close() {
  if (closed_) return;
  flush();
  backend_->close();
  closed_ = true;
}

}  // namespace ruleweave
