#include "rdfidx/pager.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>

#include "rdfidx/bytes.hpp"

namespace rdfidx {

namespace {

constexpr char kMagic[8] = {'R', 'D', 'F', 'I', 'D', 'X', 'P', 'G'};
constexpr std::size_t kDirOffset = 20;
constexpr std::size_t kDirEntrySize = 64;

bool valid_block_size(std::uint32_t bs) { return bs >= 512 && (bs & (bs - 1)) == 0; }

[[noreturn]] void io_fail(const std::string& what, const std::filesystem::path& p) {
  throw StorageError(what + " '" + p.string() + "': " + std::strerror(errno));
}

std::size_t max_dir_entries(std::uint32_t block_size) {
  return (block_size - kDirOffset) / kDirEntrySize;
}

}  // namespace

PageStore PageStore::in_memory(std::uint32_t block_size) {
  if (!valid_block_size(block_size)) {
    throw std::invalid_argument("block size must be a power of two >= 512");
  }
  PageStore store;
  store.in_memory_ = true;
  store.block_size_ = block_size;
  store.memory_.emplace_back(block_size, 0);
  store.stats_.allocated = 1;
  store.write_header();
  return store;
}

PageStore PageStore::create(const std::filesystem::path& path, std::uint32_t block_size) {
  if (!valid_block_size(block_size)) {
    throw std::invalid_argument("block size must be a power of two >= 512");
  }
  std::error_code ec;
  if (std::filesystem::exists(path, ec) && std::filesystem::file_size(path, ec) > 0) {
    // Refuse to clobber anything that is not one of our stores of the same geometry.
    PageStore existing = open(path);
    if (existing.block_size() != block_size) {
      throw StorageError("existing page file '" + path.string() + "' has block size " +
                         std::to_string(existing.block_size()));
    }
  }
  PageStore store;
  store.path_ = path;
  store.block_size_ = block_size;
  store.fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_TRUNC, 0644);
  if (store.fd_ < 0) io_fail("cannot create page file", path);
  store.stats_.allocated = 1;
  store.write_header();
  return store;
}

PageStore PageStore::open(const std::filesystem::path& path) {
  PageStore store;
  store.path_ = path;
  store.fd_ = ::open(path.c_str(), O_RDWR);
  if (store.fd_ < 0) io_fail("cannot open page file", path);

  std::uint8_t probe[kDirOffset] = {};
  if (::pread(store.fd_, probe, sizeof probe, 0) != static_cast<ssize_t>(sizeof probe) ||
      std::memcmp(probe, kMagic, sizeof kMagic) != 0) {
    throw StorageError("'" + path.string() + "' is not a page file (bad magic)");
  }
  const std::span<const std::uint8_t> head(probe, sizeof probe);
  if (bytes::get_u16(head, 8) != kVersion) {
    throw StorageError("unsupported page file version in '" + path.string() + "'");
  }
  store.block_size_ = bytes::get_u32(head, 10);
  if (!valid_block_size(store.block_size_)) {
    throw StorageError("corrupt block size in '" + path.string() + "'");
  }
  store.load_header(store.read_backing(kHeaderPage));
  return store;
}

PageStore::PageStore(PageStore&& other) noexcept { *this = std::move(other); }

PageStore& PageStore::operator=(PageStore&& other) noexcept {
  if (this != &other) {
    close();
    path_ = std::move(other.path_);
    fd_ = std::exchange(other.fd_, -1);
    memory_ = std::move(other.memory_);
    in_memory_ = other.in_memory_;
    block_size_ = other.block_size_;
    directory_ = std::move(other.directory_);
    metered_ = other.metered_;
    cache_capacity_ = other.cache_capacity_;
    lru_ = std::move(other.lru_);
    lru_index_ = std::move(other.lru_index_);
    cache_mutex_ = std::move(other.cache_mutex_);
    stats_ = other.stats_;
  }
  return *this;
}

PageStore::~PageStore() { close(); }

void PageStore::close() noexcept {
  if (fd_ >= 0) {
    try {
      write_header();
    } catch (...) {
    }
    ::fsync(fd_);
    ::close(fd_);
    fd_ = -1;
  }
}

PageId PageStore::alloc() {
  if (stats_.allocated >= 0xFFFFFFFFull) throw StorageError("page address space exhausted");
  ++stats_.allocated;
  if (in_memory_) memory_.emplace_back(block_size_, 0);
  return PageId{static_cast<std::uint32_t>(stats_.allocated)};
}

void PageStore::check_id(PageId id) const {
  if (!id.valid() || id.value > stats_.allocated) {
    throw StorageError("invalid page id " + std::to_string(id.value));
  }
}

Block PageStore::read_backing(PageId id) const {
  if (in_memory_) return memory_[id.value - 1];
  Block block(block_size_, 0);
  const auto offset = static_cast<off_t>(id.value - 1) * block_size_;
  std::size_t done = 0;
  while (done < block.size()) {
    const ssize_t n = ::pread(fd_, block.data() + done, block.size() - done,
                              offset + static_cast<off_t>(done));
    if (n < 0) {
      if (errno == EINTR) continue;
      io_fail("read failed on", path_);
    }
    if (n == 0) break;  // allocated but never written: reads as zeros
    done += static_cast<std::size_t>(n);
  }
  return block;
}

void PageStore::write_backing(PageId id, std::span<const std::uint8_t> block) {
  if (in_memory_) {
    std::copy(block.begin(), block.end(), memory_[id.value - 1].begin());
    return;
  }
  const auto offset = static_cast<off_t>(id.value - 1) * block_size_;
  std::size_t done = 0;
  while (done < block.size()) {
    const ssize_t n = ::pwrite(fd_, block.data() + done, block.size() - done,
                               offset + static_cast<off_t>(done));
    if (n < 0) {
      if (errno == EINTR) continue;
      io_fail("write failed on", path_);
    }
    done += static_cast<std::size_t>(n);
  }
}

Block PageStore::read(PageId id) {
  check_id(id);
  if (metered_) {
    ++stats_.reads;
    return read_backing(id);
  }
  std::lock_guard lock(*cache_mutex_);
  if (auto it = lru_index_.find(id.value); it != lru_index_.end()) {
    lru_.splice(lru_.begin(), lru_, it->second);
    return it->second->second;
  }
  ++stats_.reads;
  Block block = read_backing(id);
  if (cache_capacity_ > 0) {
    lru_.emplace_front(id.value, block);
    lru_index_[id.value] = lru_.begin();
    if (lru_.size() > cache_capacity_) {
      lru_index_.erase(lru_.back().first);
      lru_.pop_back();
    }
  }
  return block;
}

void PageStore::write(PageId id, std::span<const std::uint8_t> block) {
  check_id(id);
  if (block.size() != block_size_) {
    throw std::invalid_argument("block must be exactly " + std::to_string(block_size_) + " bytes");
  }
  ++stats_.writes;
  write_backing(id, block);
  if (!metered_) {
    std::lock_guard lock(*cache_mutex_);
    if (auto it = lru_index_.find(id.value); it != lru_index_.end()) {
      it->second->second.assign(block.begin(), block.end());
    }
  }
}

void PageStore::flush() {
  write_header();
  if (fd_ >= 0 && ::fsync(fd_) != 0) io_fail("fsync failed on", path_);
}

IoStats PageStore::stats() const { return stats_; }

void PageStore::reset_read_counter() { stats_.reads = 0; }

void PageStore::set_metered(bool metered, std::size_t cache_blocks) {
  std::lock_guard lock(*cache_mutex_);
  metered_ = metered;
  cache_capacity_ = metered ? 0 : cache_blocks;
  lru_.clear();
  lru_index_.clear();
}

std::optional<TreeMeta> PageStore::tree(const std::string& name) const {
  auto it = std::find_if(directory_.begin(), directory_.end(),
                         [&](const TreeMeta& m) { return m.name == name; });
  if (it == directory_.end()) return std::nullopt;
  return *it;
}

void PageStore::put_tree(const TreeMeta& meta) {
  if (meta.name.empty() || meta.name.size() > kMaxTreeName) {
    throw std::invalid_argument("tree name must be 1.." + std::to_string(kMaxTreeName) + " bytes");
  }
  auto it = std::find_if(directory_.begin(), directory_.end(),
                         [&](const TreeMeta& m) { return m.name == meta.name; });
  if (it != directory_.end()) {
    *it = meta;
    return;
  }
  if (directory_.size() >= max_dir_entries(block_size_)) {
    throw StorageError("header directory full");
  }
  directory_.push_back(meta);
}

void PageStore::write_header() {
  Block header(block_size_, 0);
  std::copy(std::begin(kMagic), std::end(kMagic), header.begin());
  bytes::put_u16(header, 8, kVersion);
  bytes::put_u32(header, 10, block_size_);
  bytes::put_u32(header, 14, static_cast<std::uint32_t>(stats_.allocated));
  bytes::put_u16(header, 18, static_cast<std::uint16_t>(directory_.size()));
  std::size_t at = kDirOffset;
  for (const auto& m : directory_) {
    std::copy(m.name.begin(), m.name.end(), header.begin() + static_cast<std::ptrdiff_t>(at));
    bytes::put_u32(header, at + 32, m.root.value);
    bytes::put_u32(header, at + 36, m.key_width);
    bytes::put_u32(header, at + 40, m.value_width);
    bytes::put_u32(header, at + 44, m.height);
    bytes::put_u64(header, at + 48, m.entries);
    bytes::put_u32(header, at + 56, m.leaves);
    at += kDirEntrySize;
  }
  write_backing(kHeaderPage, header);
}

void PageStore::load_header(std::span<const std::uint8_t> header) {
  stats_.allocated = bytes::get_u32(header, 14);
  const std::size_t count = bytes::get_u16(header, 18);
  if (stats_.allocated < 1 || count > max_dir_entries(block_size_)) {
    throw StorageError("corrupt page file header in '" + path_.string() + "'");
  }
  directory_.clear();
  std::size_t at = kDirOffset;
  for (std::size_t i = 0; i < count; ++i, at += kDirEntrySize) {
    TreeMeta m;
    const auto* name = reinterpret_cast<const char*>(header.data() + at);
    m.name.assign(name, strnlen(name, kMaxTreeName));
    m.root = PageId{bytes::get_u32(header, at + 32)};
    m.key_width = bytes::get_u32(header, at + 36);
    m.value_width = bytes::get_u32(header, at + 40);
    m.height = bytes::get_u32(header, at + 44);
    m.entries = bytes::get_u64(header, at + 48);
    m.leaves = bytes::get_u32(header, at + 56);
    directory_.push_back(std::move(m));
  }
}

}  // namespace rdfidx
