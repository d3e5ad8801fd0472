#include <doctest.h>

#include <fstream>

#include "ruleweave/kv.hpp"
#include "support/tmpdir.hpp"

using namespace ruleweave;

namespace {

Bytes bytes(std::initializer_list<std::uint8_t> xs) { return Bytes(xs); }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void exercise_backend(KvBackend& kv) {
  CHECK_FALSE(kv.get(node_key(1)).has_value());
  kv.put(node_key(1), bytes({0xAA}));
  kv.put(node_key(2), bytes({0xBB, 0xCC}));
  kv.put(node_key(1), bytes({0xDD}));  // overwrite
  CHECK(*kv.get(node_key(1)) == bytes({0xDD}));
  CHECK(*kv.get(node_key(2)) == bytes({0xBB, 0xCC}));

  kv.erase(node_key(2));
  CHECK_FALSE(kv.get(node_key(2)).has_value());

  kv.put(meta_key(), bytes({0x05}));
  CHECK(*kv.get(meta_key()) == bytes({0x05}));

  std::vector<NodeId> seen;
  Bytes prefix{kTagNode};
  kv.iterate_prefix(prefix, [&](std::span<const std::uint8_t> key) {
    std::uint64_t id = 0;
    for (int i = 1; i < 9; ++i) id = (id << 8) | key[i];
    seen.push_back(id);
  });
  CHECK(seen == std::vector<NodeId>{1});
}

}  // namespace

TEST_CASE("memory backend basics") {
  MemoryBackend kv;
  exercise_backend(kv);
}

TEST_CASE("file backend basics and reopen") {
  testsupport::TmpDir dir;
  {
    FileLogBackend kv(dir.path());
    exercise_backend(kv);
    kv.close();
  }
  {
    FileLogBackend kv(dir.path());
    CHECK(*kv.get(node_key(1)) == bytes({0xDD}));
    CHECK_FALSE(kv.get(node_key(2)).has_value());
    CHECK(*kv.get(meta_key()) == bytes({0x05}));
  }
}

TEST_CASE("file backend compacts on close") {
  testsupport::TmpDir dir;
  {
    FileLogBackend kv(dir.path());
    for (int round = 0; round < 10; ++round)
      for (NodeId id = 1; id <= 5; ++id)
        kv.put(node_key(id), bytes({static_cast<std::uint8_t>(round)}));
    kv.flush();
    CHECK(slurp(dir.sub("store.log")).size() > 5 * 11);
    kv.close();
  }
  // after compaction: 5 records of (1-byte keylen, 9-byte key, 1-byte vallen, 1-byte value)
  CHECK(slurp(dir.sub("store.log")).size() == 5 * 12);
  {
    FileLogBackend kv(dir.path());
    for (NodeId id = 1; id <= 5; ++id) CHECK(*kv.get(node_key(id)) == bytes({9}));
  }
}

TEST_CASE("meta lives in store.meta, not the log") {
  testsupport::TmpDir dir;
  {
    FileLogBackend kv(dir.path());
    kv.put(meta_key(), bytes({0x2A}));
    kv.flush();
  }
  CHECK(slurp(dir.sub("store.meta")) == "\x2a");
  CHECK(slurp(dir.sub("store.log")).empty());
}

TEST_CASE("unflushed appends are still readable") {
  testsupport::TmpDir dir;
  FileLogBackend kv(dir.path());
  kv.put(node_key(7), bytes({1, 2, 3}));
  CHECK(*kv.get(node_key(7)) == bytes({1, 2, 3}));
}
