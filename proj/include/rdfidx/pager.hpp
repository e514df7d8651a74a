#pragma once

// Fixed-size block storage with 32-bit block references and exact I/O
// accounting.
//
// File layout: PageId p (p >= 1) lives at byte offset (p - 1) * block_size.
// PageId 1 is the header page:
//
//   0   8 bytes  magic "RDFIDXPG"
//   8   u16      format version (1)
//   10  u32      block_size
//   14  u32      allocated (highest PageId issued)
//   18  u16      directory entry count
//   20  entries, 64 bytes each:
//         name[32] (NUL padded), u32 root, u32 key_width, u32 value_width,
//         u32 height, u64 entry count, u32 leaf count, u32 reserved
//
// All integers little-endian. PageId 0 is the null reference.

#include <cstdint>
#include <filesystem>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace rdfidx {

class StorageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PageId {
  std::uint32_t value = 0;

  constexpr bool valid() const noexcept { return value != 0; }
  friend constexpr bool operator==(PageId, PageId) = default;
  friend constexpr auto operator<=>(PageId, PageId) = default;
};

inline constexpr PageId kNullPage{0};
inline constexpr PageId kHeaderPage{1};
inline constexpr std::uint32_t kDefaultBlockSize = 8192;

using Block = std::vector<std::uint8_t>;

struct IoStats {
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  std::uint64_t allocated = 0;

  friend bool operator==(const IoStats&, const IoStats&) = default;
};

/// Directory entry describing one B+tree stored in the file.
struct TreeMeta {
  std::string name;
  PageId root;
  std::uint32_t key_width = 0;
  std::uint32_t value_width = 0;
  std::uint32_t height = 0;
  std::uint64_t entries = 0;
  std::uint32_t leaves = 0;

  friend bool operator==(const TreeMeta&, const TreeMeta&) = default;
};

class PageStore {
 public:
  static constexpr std::size_t kMaxTreeName = 32;
  static constexpr std::uint16_t kVersion = 1;

  /// Creates (or truncates) a page file. An existing non-empty file must carry
  /// our magic and the same block size.
  static PageStore create(const std::filesystem::path& path,
                          std::uint32_t block_size = kDefaultBlockSize);
  static PageStore open(const std::filesystem::path& path);
  /// Store backed by process memory; never touches the filesystem.
  static PageStore in_memory(std::uint32_t block_size = kDefaultBlockSize);

  PageStore(PageStore&&) noexcept;
  PageStore& operator=(PageStore&&) noexcept;
  PageStore(const PageStore&) = delete;
  PageStore& operator=(const PageStore&) = delete;
  ~PageStore();

  PageId alloc();
  Block read(PageId id);
  void write(PageId id, std::span<const std::uint8_t> block);
  /// Writes the header page and syncs the backing file.
  void flush();

  IoStats stats() const;
  void reset_read_counter();

  /// Metered mode (the default) counts every read() call and never caches.
  /// Unmetered mode serves repeated reads from an LRU cache of the given
  /// capacity and counts only reads that reach the backing storage.
  void set_metered(bool metered, std::size_t cache_blocks = 256);
  bool metered() const noexcept { return metered_; }

  std::uint32_t block_size() const noexcept { return block_size_; }
  const std::filesystem::path& path() const noexcept { return path_; }

  std::optional<TreeMeta> tree(const std::string& name) const;
  void put_tree(const TreeMeta& meta);
  const std::vector<TreeMeta>& trees() const noexcept { return directory_; }

 private:
  PageStore() = default;

  void check_id(PageId id) const;
  Block read_backing(PageId id) const;
  void write_backing(PageId id, std::span<const std::uint8_t> block);
  void write_header();
  void load_header(std::span<const std::uint8_t> header);
  void close() noexcept;

  std::filesystem::path path_;
  int fd_ = -1;
  std::vector<Block> memory_;
  bool in_memory_ = false;
  std::uint32_t block_size_ = kDefaultBlockSize;
  std::vector<TreeMeta> directory_;

  bool metered_ = true;
  std::size_t cache_capacity_ = 0;
  std::list<std::pair<std::uint32_t, Block>> lru_;
  std::unordered_map<std::uint32_t, std::list<std::pair<std::uint32_t, Block>>::iterator> lru_index_;
  std::unique_ptr<std::mutex> cache_mutex_ = std::make_unique<std::mutex>();

  IoStats stats_{};
};

}  // namespace rdfidx
