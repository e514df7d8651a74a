#include "rdfidx/payload.hpp"

#include <algorithm>
#include <cstring>

#include "rdfidx/bytes.hpp"

namespace rdfidx {

std::string PayloadRef::encode() const {
  std::string out(kEncodedSize, '\0');
  auto* p = reinterpret_cast<std::uint8_t*>(out.data());
  bytes::put_u32({p, kEncodedSize}, 0, page.value);
  bytes::put_u32({p, kEncodedSize}, 4, length);
  return out;
}

PayloadRef PayloadRef::decode(std::string_view value) {
  if (value.size() != kEncodedSize) throw StorageError("payload reference must be 8 bytes");
  const std::span<const std::uint8_t> in(reinterpret_cast<const std::uint8_t*>(value.data()), kEncodedSize);
  return {PageId{bytes::get_u32(in, 0)}, bytes::get_u32(in, 4)};
}

PayloadRef write_payload(PageStore& store, std::span<const std::uint8_t> data) {
  const std::uint32_t bs = store.block_size();
  const auto blocks = payload_blocks(data.size(), bs);
  if (blocks == 0) return {kNullPage, 0};
  std::vector<PageId> pages;
  pages.reserve(blocks);
  for (std::uint64_t i = 0; i < blocks; ++i) pages.push_back(store.alloc());
  Block block(bs);
  for (std::uint64_t i = 0; i < blocks; ++i) {
    std::fill(block.begin(), block.end(), 0);
    const std::size_t from = i * bs;
    const std::size_t n = std::min<std::size_t>(bs, data.size() - from);
    std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(from), n, block.begin());
    store.write(pages[i], block);
  }
  return {pages.front(), static_cast<std::uint32_t>(data.size())};
}

std::vector<std::uint8_t> read_payload(PageStore& store, const PayloadRef& ref) {
  const std::uint32_t bs = store.block_size();
  std::vector<std::uint8_t> out;
  out.reserve(ref.length);
  const auto blocks = payload_blocks(ref.length, bs);
  for (std::uint64_t i = 0; i < blocks; ++i) {
    const Block block = store.read(PageId{ref.page.value + static_cast<std::uint32_t>(i)});
    const std::size_t n = std::min<std::size_t>(bs, ref.length - out.size());
    out.insert(out.end(), block.begin(), block.begin() + static_cast<std::ptrdiff_t>(n));
  }
  return out;
}

void PayloadWriter::u32(std::uint32_t v) {
  const auto at = buf_.size();
  buf_.resize(at + 4);
  bytes::put_u32(buf_, at, v);
}

void PayloadWriter::atom(const Atom& a) {
  if (a.size() > width_) throw std::invalid_argument("atom wider than payload field");
  const auto at = buf_.size();
  buf_.resize(at + width_, 0);
  std::memcpy(buf_.data() + at, a.bytes().data(), a.size());
}

std::uint32_t PayloadReader::u32() {
  if (at_ + 4 > bytes_.size()) throw StorageError("truncated payload");
  const auto v = bytes::get_u32(bytes_, at_);
  at_ += 4;
  return v;
}

Atom PayloadReader::atom() {
  if (at_ + width_ > bytes_.size()) throw StorageError("truncated payload");
  const char* p = reinterpret_cast<const char*>(bytes_.data() + at_);
  at_ += width_;
  return Atom(std::string_view(p, strnlen(p, width_)));
}

}  // namespace rdfidx
