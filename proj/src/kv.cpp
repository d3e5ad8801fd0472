#include "ruleweave/kv.hpp"

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <filesystem>

#include "ruleweave/diagnostics.hpp"

namespace ruleweave {

namespace {

Bytes to_bytes(std::span<const std::uint8_t> s) { return Bytes(s.begin(), s.end()); }

bool has_prefix(const Bytes& key, std::span<const std::uint8_t> prefix) {
  return key.size() >= prefix.size() && std::equal(prefix.begin(), prefix.end(), key.begin());
}

bool is_meta(std::span<const std::uint8_t> key) { return !key.empty() && key[0] == kTagMeta; }

}  // namespace

std::optional<Bytes> MemoryBackend::get(std::span<const std::uint8_t> key) {
  auto it = map_.find(to_bytes(key));
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

void MemoryBackend::put(std::span<const std::uint8_t> key, std::span<const std::uint8_t> value) {
  map_[to_bytes(key)] = to_bytes(value);
}

void MemoryBackend::erase(std::span<const std::uint8_t> key) { map_.erase(to_bytes(key)); }

void MemoryBackend::iterate_prefix(std::span<const std::uint8_t> prefix,
                                   const std::function<void(std::span<const std::uint8_t>)>& fn) {
  auto it = map_.lower_bound(to_bytes(prefix));
  for (; it != map_.end() && has_prefix(it->first, prefix); ++it) fn(it->first);
}

FileLogBackend::FileLogBackend(std::string directory) : dir_(std::move(directory)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(Errc::BackendIo, "cannot create " + dir_ + ": " + ec.message());
  load_existing();
  log_ = std::fopen(log_path().c_str(), "ab");
  if (!log_) throw Error(Errc::BackendIo, "cannot open " + log_path());
  std::fflush(log_);  // ensure the file exists before opening the read handle
  read_ = std::fopen(log_path().c_str(), "rb");
  if (!read_) throw Error(Errc::BackendIo, "cannot open " + log_path());
  flushed_size_ = log_size_;
}

FileLogBackend::~FileLogBackend() {
  try {
    close();
  } catch (...) {
    if (log_) std::fclose(log_);
    if (read_) std::fclose(read_);
    log_ = read_ = nullptr;
  }
}

void FileLogBackend::load_existing() {
  if (std::filesystem::exists(meta_path())) {
    std::FILE* f = std::fopen(meta_path().c_str(), "rb");
    if (!f) throw Error(Errc::BackendIo, "cannot open " + meta_path());
    Bytes content;
    std::uint8_t buf[256];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) content.insert(content.end(), buf, buf + n);
    std::fclose(f);
    meta_ = std::move(content);
  }
  if (!std::filesystem::exists(log_path())) return;

  std::FILE* f = std::fopen(log_path().c_str(), "rb");
  if (!f) throw Error(Errc::BackendIo, "cannot open " + log_path());
  Bytes content;
  {
    std::uint8_t buf[1 << 16];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) content.insert(content.end(), buf, buf + n);
  }
  std::fclose(f);

  std::span<const std::uint8_t> in(content);
  std::size_t pos = 0;
  while (pos < in.size()) {
    std::uint64_t klen = read_leb128(in, pos);
    if (pos + klen > in.size()) throw Error(Errc::Corrupt, "truncated log key");
    Bytes key(in.begin() + pos, in.begin() + pos + klen);
    pos += klen;
    std::uint64_t vlen = read_leb128(in, pos);
    if (pos + vlen > in.size()) throw Error(Errc::Corrupt, "truncated log value");
    if (vlen == 0) {
      index_.erase(key);
    } else {
      index_[std::move(key)] = Slot{pos, static_cast<std::uint32_t>(vlen)};
    }
    pos += vlen;
  }
  log_size_ = in.size();
}

void FileLogBackend::append_record(std::span<const std::uint8_t> key,
                                   std::span<const std::uint8_t> value) {
  Bytes rec;
  rec.reserve(key.size() + value.size() + 8);
  append_leb128(rec, key.size());
  rec.insert(rec.end(), key.begin(), key.end());
  append_leb128(rec, value.size());
  std::uint64_t value_offset = log_size_ + rec.size();
  rec.insert(rec.end(), value.begin(), value.end());
  if (std::fwrite(rec.data(), 1, rec.size(), log_) != rec.size())
    throw Error(Errc::BackendIo, "write failed: " + std::string(std::strerror(errno)));
  log_size_ += rec.size();
  if (!value.empty())
    index_[to_bytes(key)] = Slot{value_offset, static_cast<std::uint32_t>(value.size())};
  else
    index_.erase(to_bytes(key));
}

std::optional<Bytes> FileLogBackend::get(std::span<const std::uint8_t> key) {
  if (closed_) throw Error(Errc::BackendIo, "backend closed");
  if (is_meta(key)) return meta_;
  auto it = index_.find(to_bytes(key));
  if (it == index_.end()) return std::nullopt;
  const Slot& slot = it->second;
  if (log_ && slot.offset + slot.length > flushed_size_) {
    std::fflush(log_);
    flushed_size_ = log_size_;
  }
  Bytes value(slot.length);
  bool ok = std::fseek(read_, static_cast<long>(slot.offset), SEEK_SET) == 0 &&
            std::fread(value.data(), 1, slot.length, read_) == slot.length;
  if (!ok) throw Error(Errc::BackendIo, "short read from " + log_path());
  return value;
}

void FileLogBackend::put(std::span<const std::uint8_t> key, std::span<const std::uint8_t> value) {
  if (closed_) throw Error(Errc::BackendIo, "backend closed");
  if (is_meta(key)) {
    meta_ = to_bytes(value);
    meta_dirty_ = true;
    return;
  }
  append_record(key, value);
}

void FileLogBackend::erase(std::span<const std::uint8_t> key) {
  if (closed_) throw Error(Errc::BackendIo, "backend closed");
  if (is_meta(key)) {
    meta_.reset();
    meta_dirty_ = true;
    return;
  }
  if (index_.count(to_bytes(key))) append_record(key, {});
}

void FileLogBackend::iterate_prefix(std::span<const std::uint8_t> prefix,
                                    const std::function<void(std::span<const std::uint8_t>)>& fn) {
  if (is_meta(prefix) || prefix.empty()) {
    if (meta_) {
      Bytes key = meta_key();
      if (has_prefix(key, prefix)) fn(key);
    }
  }
  auto it = prefix.empty() ? index_.begin() : index_.lower_bound(to_bytes(prefix));
  for (; it != index_.end() && has_prefix(it->first, prefix); ++it) fn(it->first);
}

void FileLogBackend::flush() {
  if (closed_) return;
  if (std::fflush(log_) != 0) throw Error(Errc::BackendIo, "flush failed");
  flushed_size_ = log_size_;
  if (meta_dirty_) {
    std::FILE* f = std::fopen(meta_path().c_str(), "wb");
    if (!f) throw Error(Errc::BackendIo, "cannot write " + meta_path());
    bool ok = !meta_ || std::fwrite(meta_->data(), 1, meta_->size(), f) == meta_->size();
    ok = std::fclose(f) == 0 && ok;
    if (!ok) throw Error(Errc::BackendIo, "cannot write " + meta_path());
    meta_dirty_ = false;
  }
}

void FileLogBackend::close() {
  if (closed_) return;
  flush();
  std::fclose(log_);
  log_ = nullptr;

  // compact: rewrite live records sorted by key, then swap in
  std::string tmp = log_path() + ".tmp";
  std::FILE* out = std::fopen(tmp.c_str(), "wb");
  if (!out) throw Error(Errc::BackendIo, "cannot open " + tmp);
  std::uint64_t new_size = 0;
  std::map<Bytes, Slot> new_index;
  for (const auto& [key, slot] : index_) {
    auto value = get(key);  // reads from the old log
    Bytes rec;
    append_leb128(rec, key.size());
    rec.insert(rec.end(), key.begin(), key.end());
    append_leb128(rec, value->size());
    std::uint64_t voff = new_size + rec.size();
    rec.insert(rec.end(), value->begin(), value->end());
    if (std::fwrite(rec.data(), 1, rec.size(), out) != rec.size()) {
      std::fclose(out);
      throw Error(Errc::BackendIo, "compaction write failed");
    }
    new_size += rec.size();
    new_index[key] = Slot{voff, static_cast<std::uint32_t>(value->size())};
  }
  if (std::fclose(out) != 0) throw Error(Errc::BackendIo, "compaction close failed");
  std::fclose(read_);
  read_ = nullptr;
  std::filesystem::rename(tmp, log_path());
  index_ = std::move(new_index);
  log_size_ = flushed_size_ = new_size;
  closed_ = true;
}

}  // namespace ruleweave
