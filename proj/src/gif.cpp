#include "mkit/gif.h"

#include <algorithm>
#include <unordered_map>

#include "mkit/errors.h"

namespace mkit::gif {

namespace {

class BitWriter {
 public:
  void write(unsigned code, int bits) {
    acc_ |= static_cast<std::uint32_t>(code) << nbits_;
    nbits_ += bits;
    while (nbits_ >= 8) {
      out_.push_back(static_cast<std::uint8_t>(acc_ & 0xFF));
      acc_ >>= 8;
      nbits_ -= 8;
    }
  }
  std::vector<std::uint8_t> finish() {
    if (nbits_ > 0) out_.push_back(static_cast<std::uint8_t>(acc_ & 0xFF));
    acc_ = 0;
    nbits_ = 0;
    return std::move(out_);
  }

 private:
  std::vector<std::uint8_t> out_;
  std::uint32_t acc_ = 0;
  int nbits_ = 0;
};

void put16(std::string& out, int v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

int table_bits(std::size_t entries) {
  int bits = 1;
  while ((std::size_t{1} << bits) < entries) ++bits;
  return bits;
}

class Reader {
 public:
  explicit Reader(std::string_view d) : d_(d) {}
  bool has(std::size_t n) const { return pos_ + n <= d_.size(); }
  std::uint8_t u8() {
    if (!has(1)) throw UndecodableImage("truncated GIF");
    return static_cast<std::uint8_t>(d_[pos_++]);
  }
  int u16() {
    const int lo = u8();
    return lo | (u8() << 8);
  }
  std::string_view bytes(std::size_t n) {
    if (!has(n)) throw UndecodableImage("truncated GIF");
    auto out = d_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::string sub_blocks() {
    std::string out;
    for (;;) {
      const std::size_t n = u8();
      if (n == 0) return out;
      out += bytes(n);
    }
  }
  Palette palette(int bits) {
    Palette p(std::size_t{1} << bits);
    for (auto& c : p) c = {u8(), u8(), u8()};
    return p;
  }

 private:
  std::string_view d_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> lzw_encode(const std::vector<std::uint8_t>& indices, int min_code_size) {
  const unsigned clear = 1u << min_code_size;
  const unsigned eoi = clear + 1;
  BitWriter w;
  int size = min_code_size + 1;
  unsigned next = eoi + 1;
  std::unordered_map<std::uint32_t, std::uint16_t> dict;
  w.write(clear, size);
  if (indices.empty()) {
    w.write(eoi, size);
    return w.finish();
  }
  unsigned cur = indices[0];
  for (std::size_t i = 1; i < indices.size(); ++i) {
    const std::uint8_t k = indices[i];
    const std::uint32_t key = (cur << 8) | k;
    if (auto it = dict.find(key); it != dict.end()) {
      cur = it->second;
      continue;
    }
    w.write(cur, size);
    dict.emplace(key, static_cast<std::uint16_t>(next));
    if (next >= (1u << size) && size < 12) ++size;
    ++next;
    if (next == 4096) {
      w.write(clear, size);
      dict.clear();
      size = min_code_size + 1;
      next = eoi + 1;
    }
    cur = k;
  }
  w.write(cur, size);
  if (next >= (1u << size) && size < 12) ++size;
  w.write(eoi, size);
  return w.finish();
}

std::vector<std::uint8_t> lzw_decode(std::string_view data, int min_code_size, std::size_t expected) {
  if (min_code_size < 1 || min_code_size > 11) throw UndecodableImage("bad LZW code size");
  const unsigned clear = 1u << min_code_size;
  const unsigned eoi = clear + 1;
  std::vector<std::uint16_t> prefix(4096);
  std::vector<std::uint8_t> suffix(4096), first(4096);
  for (unsigned i = 0; i < clear; ++i) suffix[i] = first[i] = static_cast<std::uint8_t>(i);

  std::vector<std::uint8_t> out;
  out.reserve(expected);
  std::vector<std::uint8_t> stack;
  int size = min_code_size + 1;
  unsigned next = eoi + 1;
  int prev = -1;
  std::uint32_t acc = 0;
  int nbits = 0;
  std::size_t pos = 0;

  auto emit = [&](unsigned code) {
    stack.clear();
    while (code > eoi) {
      stack.push_back(suffix[code]);
      code = prefix[code];
    }
    stack.push_back(static_cast<std::uint8_t>(code));
    out.insert(out.end(), stack.rbegin(), stack.rend());
  };

  while (out.size() < expected) {
    while (nbits < size && pos < data.size()) {
      acc |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(data[pos++])) << nbits;
      nbits += 8;
    }
    if (nbits < size) break;
    const unsigned code = acc & ((1u << size) - 1);
    acc >>= size;
    nbits -= size;

    if (code == clear) {
      size = min_code_size + 1;
      next = eoi + 1;
      prev = -1;
      continue;
    }
    if (code == eoi) break;
    if (prev < 0) {
      if (code >= clear) throw UndecodableImage("bad LZW stream");
      emit(code);
      prev = static_cast<int>(code);
      continue;
    }
    std::uint8_t head;
    if (code < next) {
      head = first[code];
    } else if (code == next) {
      head = first[prev];
    } else {
      throw UndecodableImage("bad LZW code");
    }
    if (next < 4096) {
      prefix[next] = static_cast<std::uint16_t>(prev);
      suffix[next] = head;
      first[next] = first[prev];
      ++next;
      if (next == (1u << size) && size < 12) ++size;
    }
    emit(code);
    prev = static_cast<int>(code);
  }
  out.resize(expected, 0);
  return out;
}

std::string encode(int width, int height, const std::vector<Frame>& frames, int loop_count) {
  if (width <= 0 || height <= 0 || width > 65535 || height > 65535)
    throw Error("GIF dimensions out of range");
  std::string out = "GIF89a";
  put16(out, width);
  put16(out, height);
  out += std::string("\0\0\0", 3);  // no global table, background 0, square pixels

  out += "\x21\xFF\x0BNETSCAPE2.0\x03\x01";
  put16(out, loop_count);
  out.push_back('\0');

  const std::size_t area = static_cast<std::size_t>(width) * height;
  for (const auto& f : frames) {
    if (f.indices.size() != area) throw Error("GIF frame size mismatch");
    if (f.palette.empty() || f.palette.size() > 256) throw Error("GIF palette must hold 1..256 colors");
    out += "\x21\xF9\x04";
    out.push_back(0x04);  // disposal: leave in place
    put16(out, std::clamp(f.delay_cs, 0, 65535));
    out.push_back('\0');
    out.push_back('\0');

    const int bits = table_bits(f.palette.size());
    out.push_back(0x2C);
    put16(out, 0);
    put16(out, 0);
    put16(out, width);
    put16(out, height);
    out.push_back(static_cast<char>(0x80 | (bits - 1)));
    for (std::size_t i = 0; i < (std::size_t{1} << bits); ++i) {
      const Color c = i < f.palette.size() ? f.palette[i] : Color{0, 0, 0};
      out.append(reinterpret_cast<const char*>(c.data()), 3);
    }
    const int min_code = std::max(2, bits);
    out.push_back(static_cast<char>(min_code));
    const auto packed = lzw_encode(f.indices, min_code);
    for (std::size_t i = 0; i < packed.size(); i += 255) {
      const std::size_t n = std::min<std::size_t>(255, packed.size() - i);
      out.push_back(static_cast<char>(n));
      out.append(reinterpret_cast<const char*>(packed.data() + i), n);
    }
    out.push_back('\0');
  }
  out.push_back(0x3B);
  return out;
}

Animation decode(std::string_view bytes) {
  Reader r(bytes);
  const auto sig = r.bytes(6);
  if (sig != "GIF87a" && sig != "GIF89a") throw UndecodableImage("not a GIF");
  Animation anim;
  anim.width = r.u16();
  anim.height = r.u16();
  if (anim.width == 0 || anim.height == 0) throw UndecodableImage("GIF has zero size");
  const std::uint8_t flags = r.u8();
  const std::uint8_t bg_index = r.u8();
  r.u8();
  Palette global;
  if (flags & 0x80) global = r.palette((flags & 7) + 1);
  const Color background = bg_index < global.size() ? global[bg_index] : Color{0, 0, 0};

  RgbImage canvas(anim.width, anim.height, background);
  int delay = 0, disposal = 0, transparent = -1;

  try {
    while (r.has(1)) {
      const std::uint8_t block = r.u8();
      if (block == 0x3B) break;
      if (block == 0x21) {
        const std::uint8_t label = r.u8();
        const std::string body = r.sub_blocks();
        if (label == 0xF9 && body.size() >= 4) {
          const auto b = reinterpret_cast<const std::uint8_t*>(body.data());
          disposal = (b[0] >> 2) & 7;
          delay = b[1] | (b[2] << 8);
          transparent = (b[0] & 1) ? b[3] : -1;
        } else if (label == 0xFF && body.size() >= 14 && body.substr(0, 11) == "NETSCAPE2.0") {
          const auto b = reinterpret_cast<const std::uint8_t*>(body.data());
          anim.loop_count = b[12] | (b[13] << 8);
        }
        continue;
      }
      if (block != 0x2C) throw UndecodableImage("unexpected GIF block");

      const int left = r.u16(), top = r.u16(), w = r.u16(), h = r.u16();
      const std::uint8_t iflags = r.u8();
      Palette local;
      if (iflags & 0x80) local = r.palette((iflags & 7) + 1);
      const Palette& table = local.empty() ? global : local;
      if (table.empty()) throw UndecodableImage("GIF frame without color table");
      const int min_code = r.u8();
      const std::string data = r.sub_blocks();
      const std::size_t count = static_cast<std::size_t>(w) * h;
      auto indices = lzw_decode(data, min_code, count);

      if (iflags & 0x40) {
        std::vector<std::uint8_t> rows(count);
        int src = 0;
        static constexpr int starts[] = {0, 4, 2, 1}, steps[] = {8, 8, 4, 2};
        for (int pass = 0; pass < 4; ++pass)
          for (int y = starts[pass]; y < h; y += steps[pass], ++src)
            std::copy_n(indices.begin() + static_cast<std::ptrdiff_t>(src) * w, w,
                        rows.begin() + static_cast<std::ptrdiff_t>(y) * w);
        indices.swap(rows);
      }

      const RgbImage before = canvas;
      for (int y = 0; y < h; ++y) {
        const int cy = top + y;
        if (cy >= anim.height) break;
        for (int x = 0; x < w; ++x) {
          const int cx = left + x;
          if (cx >= anim.width) break;
          const int idx = indices[static_cast<std::size_t>(y) * w + x];
          if (idx == transparent) continue;
          const Color c = idx < static_cast<int>(table.size()) ? table[idx] : Color{0, 0, 0};
          std::copy(c.begin(), c.end(), canvas.at(cx, cy));
        }
      }
      anim.frames.push_back(canvas);
      anim.delays_cs.push_back(delay);

      if (disposal == 2) {
        for (int y = top; y < std::min(top + h, anim.height); ++y)
          for (int x = left; x < std::min(left + w, anim.width); ++x)
            std::copy(background.begin(), background.end(), canvas.at(x, y));
      } else if (disposal == 3) {
        canvas = before;
      }
      delay = 0;
      disposal = 0;
      transparent = -1;
    }
  } catch (const UndecodableImage&) {
    if (anim.frames.empty()) throw;
  }
  if (anim.frames.empty()) throw UndecodableImage("GIF has no frames");
  return anim;
}

namespace {

struct Bucket {
  std::uint32_t rgb;
  std::uint64_t count;
  int channel(int c) const { return static_cast<int>((rgb >> (16 - 8 * c)) & 0xFF); }
};

struct Box {
  std::size_t begin, end;  // range in the bucket array
  int range = 0;
  int channel = 0;
};

void measure(Box& box, const std::vector<Bucket>& buckets) {
  int lo[3] = {255, 255, 255}, hi[3] = {0, 0, 0};
  for (std::size_t i = box.begin; i < box.end; ++i)
    for (int c = 0; c < 3; ++c) {
      lo[c] = std::min(lo[c], buckets[i].channel(c));
      hi[c] = std::max(hi[c], buckets[i].channel(c));
    }
  box.range = -1;
  for (int c = 0; c < 3; ++c)
    if (hi[c] - lo[c] > box.range) {
      box.range = hi[c] - lo[c];
      box.channel = c;
    }
}

}  // namespace

Palette median_cut(const RgbImage& image, std::size_t max_colors) {
  max_colors = std::clamp<std::size_t>(max_colors, 1, 256);
  std::unordered_map<std::uint32_t, std::uint64_t> hist;
  for (std::size_t i = 0; i + 2 < image.pixels.size(); i += 3)
    ++hist[(std::uint32_t{image.pixels[i]} << 16) | (std::uint32_t{image.pixels[i + 1]} << 8) |
           image.pixels[i + 2]];
  std::vector<Bucket> buckets;
  buckets.reserve(hist.size());
  for (const auto& [rgb, n] : hist) buckets.push_back({rgb, n});
  std::sort(buckets.begin(), buckets.end(), [](auto& a, auto& b) { return a.rgb < b.rgb; });
  if (buckets.empty()) return {Color{0, 0, 0}};

  std::vector<Box> boxes{{0, buckets.size()}};
  measure(boxes[0], buckets);
  while (boxes.size() < max_colors) {
    std::size_t pick = boxes.size();
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      if (boxes[i].end - boxes[i].begin < 2 || boxes[i].range <= 0) continue;
      if (pick == boxes.size() || boxes[i].range > boxes[pick].range) pick = i;
    }
    if (pick == boxes.size()) break;
    Box box = boxes[pick];
    const int ch = box.channel;
    std::stable_sort(buckets.begin() + static_cast<std::ptrdiff_t>(box.begin),
                     buckets.begin() + static_cast<std::ptrdiff_t>(box.end),
                     [ch](const Bucket& a, const Bucket& b) { return a.channel(ch) < b.channel(ch); });
    std::uint64_t total = 0;
    for (std::size_t i = box.begin; i < box.end; ++i) total += buckets[i].count;
    std::uint64_t running = 0;
    std::size_t split = box.begin + 1;
    for (std::size_t i = box.begin; i < box.end - 1; ++i) {
      running += buckets[i].count;
      split = i + 1;
      if (running * 2 >= total) break;
    }
    Box a{box.begin, split}, b{split, box.end};
    measure(a, buckets);
    measure(b, buckets);
    boxes[pick] = a;
    boxes.push_back(b);
  }

  Palette out;
  for (const auto& box : boxes) {
    double sum[3] = {0, 0, 0};
    double n = 0;
    for (std::size_t i = box.begin; i < box.end; ++i) {
      for (int c = 0; c < 3; ++c) sum[c] += static_cast<double>(buckets[i].channel(c)) * buckets[i].count;
      n += static_cast<double>(buckets[i].count);
    }
    Color c;
    for (int k = 0; k < 3; ++k) c[k] = static_cast<std::uint8_t>(std::clamp(sum[k] / n + 0.5, 0.0, 255.0));
    out.push_back(c);
  }
  return out;
}

std::vector<std::uint8_t> map_to_palette(const RgbImage& image, const Palette& palette) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(image.width) * image.height);
  std::unordered_map<std::uint32_t, std::uint8_t> cache;
  for (std::size_t p = 0; p < out.size(); ++p) {
    const std::uint8_t* px = &image.pixels[p * 3];
    const std::uint32_t key = (std::uint32_t{px[0]} << 16) | (std::uint32_t{px[1]} << 8) | px[2];
    if (auto it = cache.find(key); it != cache.end()) {
      out[p] = it->second;
      continue;
    }
    int best = 0;
    long best_d = -1;
    for (std::size_t i = 0; i < palette.size(); ++i) {
      long d = 0;
      for (int c = 0; c < 3; ++c) {
        const long diff = static_cast<long>(px[c]) - palette[i][c];
        d += diff * diff;
      }
      if (best_d < 0 || d < best_d) {
        best_d = d;
        best = static_cast<int>(i);
      }
    }
    cache.emplace(key, static_cast<std::uint8_t>(best));
    out[p] = static_cast<std::uint8_t>(best);
  }
  return out;
}

}  // namespace mkit::gif
