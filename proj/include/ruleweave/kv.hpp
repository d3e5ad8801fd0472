#pragma once

#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "ruleweave/codec.hpp"

namespace ruleweave {

/// Minimal key-value contract the store persists through. Implementations
/// are single-owner, like the store itself.
class KvBackend {
 public:
  virtual ~KvBackend() = default;

  virtual std::optional<Bytes> get(std::span<const std::uint8_t> key) = 0;
  virtual void put(std::span<const std::uint8_t> key, std::span<const std::uint8_t> value) = 0;
  virtual void erase(std::span<const std::uint8_t> key) = 0;

  /// Visits every live key with the given prefix, in ascending key order.
  virtual void iterate_prefix(std::span<const std::uint8_t> prefix,
                              const std::function<void(std::span<const std::uint8_t>)>& fn) = 0;

  virtual void flush() {}
  virtual void close() {}
};

/// Plain ordered map. Outlives any store opened over it, so a test can close
/// one store and reopen another on the same contents.
class MemoryBackend final : public KvBackend {
 public:
  std::optional<Bytes> get(std::span<const std::uint8_t> key) override;
  void put(std::span<const std::uint8_t> key, std::span<const std::uint8_t> value) override;
  void erase(std::span<const std::uint8_t> key) override;
  void iterate_prefix(std::span<const std::uint8_t> prefix,
                      const std::function<void(std::span<const std::uint8_t>)>& fn) override;

  std::size_t size() const { return map_.size(); }

 private:
  std::map<Bytes, Bytes> map_;
};

/// Single-file append-only log with an in-memory offset index rebuilt on
/// open and compaction on close.
///
/// Directory layout:
///   store.log  - records: LEB128 key length, key, LEB128 value length,
///                value. A zero value length is a tombstone. Compaction
///                rewrites live records sorted by key.
///   store.meta - latest value of the meta key (the store's id counter).
class FileLogBackend final : public KvBackend {
 public:
  explicit FileLogBackend(std::string directory);
  ~FileLogBackend() override;

  std::optional<Bytes> get(std::span<const std::uint8_t> key) override;
  void put(std::span<const std::uint8_t> key, std::span<const std::uint8_t> value) override;
  void erase(std::span<const std::uint8_t> key) override;
  void iterate_prefix(std::span<const std::uint8_t> prefix,
                      const std::function<void(std::span<const std::uint8_t>)>& fn) override;
  void flush() override;
  void close() override;

 private:
  struct Slot {
    std::uint64_t offset;  // of the value payload
    std::uint32_t length;
  };

  std::string log_path() const { return dir_ + "/store.log"; }
  std::string meta_path() const { return dir_ + "/store.meta"; }
  void load_existing();
  void append_record(std::span<const std::uint8_t> key, std::span<const std::uint8_t> value);

  std::string dir_;
  std::FILE* log_ = nullptr;
  std::FILE* read_ = nullptr;
  std::map<Bytes, Slot> index_;
  std::optional<Bytes> meta_;
  bool meta_dirty_ = false;
  std::uint64_t log_size_ = 0;
  std::uint64_t flushed_size_ = 0;
  bool closed_ = false;
};

}  // namespace ruleweave
