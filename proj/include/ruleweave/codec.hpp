#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ruleweave/value.hpp"

namespace ruleweave {

using NodeId = std::uint64_t;
using Bytes = std::vector<std::uint8_t>;

/// One graph node: a data node conforming to a metamodel class, or a rule /
/// condition node carrying a reserved kind tag. Attribute and relation maps
/// are ordered so the encoding is deterministic.
struct NodeRecord {
  NodeId id = 0;
  std::string class_name;
  std::map<std::string, Value> attributes;
  std::map<std::string, std::vector<NodeId>> relations;
};

// Key layout: 1 tag byte then big-endian 8-byte id.
inline constexpr std::uint8_t kTagMeta = 0x00;
inline constexpr std::uint8_t kTagNode = 0x01;
inline constexpr std::uint8_t kRecordVersion = 0x01;

Bytes node_key(NodeId id);
Bytes meta_key();

void append_leb128(Bytes& out, std::uint64_t v);

/// Cursor-based readers; all throw Error(Errc::Corrupt) on truncated or
/// malformed input.
std::uint64_t read_leb128(std::span<const std::uint8_t> in, std::size_t& pos);

/// Value layout: version byte, class name (LEB128 length + UTF-8), attribute
/// count, per attribute name / type tag / payload, relation count, per
/// relation name / LEB128-counted big-endian target ids.
Bytes encode_node(const NodeRecord& rec);
NodeRecord decode_node(NodeId id, std::span<const std::uint8_t> in);

}  // namespace ruleweave
