#pragma once

// Out-of-line payload storage shared by TripleT buckets and HexTree lists.
// A payload of `length` bytes occupies ceil(length / block_size) consecutive
// pages starting at `page`; the B+tree value that references it is the 8-byte
// record  u32 page | u32 length.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rdfidx/core.hpp"
#include "rdfidx/pager.hpp"

namespace rdfidx {

struct PayloadRef {
  static constexpr std::uint32_t kEncodedSize = 8;

  PageId page;
  std::uint32_t length = 0;

  std::string encode() const;
  static PayloadRef decode(std::string_view value);

  friend bool operator==(const PayloadRef&, const PayloadRef&) = default;
};

inline std::uint64_t payload_blocks(std::uint64_t length, std::uint32_t block_size) {
  return (length + block_size - 1) / block_size;
}

PayloadRef write_payload(PageStore& store, std::span<const std::uint8_t> bytes);
/// Reads every page of the payload: exactly payload_blocks(length) reads.
std::vector<std::uint8_t> read_payload(PageStore& store, const PayloadRef& ref);

using AtomPair = std::pair<Atom, Atom>;

/// Builds the byte image of payloads made of fixed-width atom fields.
class PayloadWriter {
 public:
  explicit PayloadWriter(std::uint32_t atom_width) : width_(atom_width) {}
  void u32(std::uint32_t v);
  void atom(const Atom& a);
  const std::vector<std::uint8_t>& bytes() const noexcept { return buf_; }

 private:
  std::uint32_t width_;
  std::vector<std::uint8_t> buf_;
};

class PayloadReader {
 public:
  PayloadReader(std::span<const std::uint8_t> bytes, std::uint32_t atom_width)
      : bytes_(bytes), width_(atom_width) {}
  std::uint32_t u32();
  Atom atom();
  bool done() const noexcept { return at_ >= bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::uint32_t width_;
  std::size_t at_ = 0;
};

}  // namespace rdfidx
