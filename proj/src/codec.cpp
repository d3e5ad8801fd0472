#include "ruleweave/codec.hpp"

#include <cstring>

#include "ruleweave/diagnostics.hpp"

namespace ruleweave {

namespace {

void append_be64(Bytes& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8)
    out.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::uint64_t read_be64(std::span<const std::uint8_t> in, std::size_t& pos) {
  if (pos + 8 > in.size()) throw Error(Errc::Corrupt, "truncated id");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | in[pos++];
  return v;
}

void append_string(Bytes& out, const std::string& s) {
  append_leb128(out, s.size());
  out.insert(out.end(), s.begin(), s.end());
}

std::string read_string(std::span<const std::uint8_t> in, std::size_t& pos) {
  std::uint64_t len = read_leb128(in, pos);
  if (pos + len > in.size()) throw Error(Errc::Corrupt, "truncated string");
  std::string s(reinterpret_cast<const char*>(in.data() + pos), len);
  pos += len;
  return s;
}

void append_value(Bytes& out, const Value& v) {
  out.push_back(static_cast<std::uint8_t>(v.kind()));
  switch (v.kind()) {
    case ValueKind::Bool:
      out.push_back(v.as_bool() ? 1 : 0);
      break;
    case ValueKind::Int: {
      std::uint64_t bits = static_cast<std::uint64_t>(v.as_int());
      for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
      break;
    }
    case ValueKind::Float: {
      std::uint64_t bits;
      double d = v.as_float();
      std::memcpy(&bits, &d, 8);
      for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
      break;
    }
    case ValueKind::String:
      append_string(out, v.as_string());
      break;
  }
}

Value read_value(std::span<const std::uint8_t> in, std::size_t& pos) {
  if (pos >= in.size()) throw Error(Errc::Corrupt, "truncated value tag");
  std::uint8_t tag = in[pos++];
  switch (tag) {
    case 1:
      if (pos >= in.size()) throw Error(Errc::Corrupt, "truncated bool");
      return Value::boolean(in[pos++] != 0);
    case 2: {
      if (pos + 8 > in.size()) throw Error(Errc::Corrupt, "truncated int");
      std::uint64_t bits = 0;
      for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(in[pos++]) << (8 * i);
      return Value::integer(static_cast<std::int64_t>(bits));
    }
    case 3: {
      if (pos + 8 > in.size()) throw Error(Errc::Corrupt, "truncated float");
      std::uint64_t bits = 0;
      for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(in[pos++]) << (8 * i);
      double d;
      std::memcpy(&d, &bits, 8);
      return Value::floating(d);
    }
    case 4:
      return Value::string(read_string(in, pos));
    default:
      throw Error(Errc::Corrupt, "bad value tag " + std::to_string(tag));
  }
}

}  // namespace

void append_leb128(Bytes& out, std::uint64_t v) {
  while (true) {
    std::uint8_t b = v & 0x7F;
    v >>= 7;
    if (v) {
      out.push_back(b | 0x80);
    } else {
      out.push_back(b);
      return;
    }
  }
}

std::uint64_t read_leb128(std::span<const std::uint8_t> in, std::size_t& pos) {
  std::uint64_t v = 0;
  int shift = 0;
  while (true) {
    if (pos >= in.size()) throw Error(Errc::Corrupt, "truncated varint");
    if (shift >= 64) throw Error(Errc::Corrupt, "varint too long");
    std::uint8_t b = in[pos++];
    v |= static_cast<std::uint64_t>(b & 0x7F) << shift;
    if (!(b & 0x80)) return v;
    shift += 7;
  }
}

Bytes node_key(NodeId id) {
  Bytes key;
  key.reserve(9);
  key.push_back(kTagNode);
  append_be64(key, id);
  return key;
}

Bytes meta_key() { return Bytes{kTagMeta}; }

Bytes encode_node(const NodeRecord& rec) {
  Bytes out;
  out.reserve(32);
  out.push_back(kRecordVersion);
  append_string(out, rec.class_name);
  append_leb128(out, rec.attributes.size());
  for (const auto& [name, value] : rec.attributes) {
    append_string(out, name);
    append_value(out, value);
  }
  append_leb128(out, rec.relations.size());
  for (const auto& [name, targets] : rec.relations) {
    append_string(out, name);
    append_leb128(out, targets.size());
    for (NodeId t : targets) append_be64(out, t);
  }
  return out;
}

NodeRecord decode_node(NodeId id, std::span<const std::uint8_t> in) {
  std::size_t pos = 0;
  if (pos >= in.size() || in[pos++] != kRecordVersion)
    throw Error(Errc::Corrupt, "bad record version");
  NodeRecord rec;
  rec.id = id;
  rec.class_name = read_string(in, pos);
  std::uint64_t nattrs = read_leb128(in, pos);
  for (std::uint64_t i = 0; i < nattrs; ++i) {
    std::string name = read_string(in, pos);
    rec.attributes.emplace(std::move(name), read_value(in, pos));
  }
  std::uint64_t nrels = read_leb128(in, pos);
  for (std::uint64_t i = 0; i < nrels; ++i) {
    std::string name = read_string(in, pos);
    std::uint64_t count = read_leb128(in, pos);
    std::vector<NodeId> targets;
    targets.reserve(count);
    for (std::uint64_t j = 0; j < count; ++j) targets.push_back(read_be64(in, pos));
    rec.relations.emplace(std::move(name), std::move(targets));
  }
  if (pos != in.size()) throw Error(Errc::Corrupt, "trailing bytes in record");
  return rec;
}

}  // namespace ruleweave
