#include "hyperstar/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace hyperstar {

namespace {

constexpr char kMagic[4] = {'H', 'S', 'G', '2'};

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  Reader(const std::string& buf, std::string path) : buf_(buf), path_(std::move(path)) {}

  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > buf_.size())
      throw value_error("truncated checkpoint " + path_);
    T v;
    std::memcpy(&v, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string bytes(size_t n) {
    if (pos_ + n > buf_.size()) throw value_error("truncated checkpoint " + path_);
    std::string v = buf_.substr(pos_, n);
    pos_ += n;
    return v;
  }

  size_t remaining() const { return buf_.size() - pos_; }

 private:
  const std::string& buf_;
  std::string path_;
  size_t pos_ = 0;
};

size_t payload_size(const Blob& b) {
  int64_t count = 1;
  for (int64_t d : b.dims) count *= d;
  switch (b.dtype) {
    case Blob::kF32: return static_cast<size_t>(count) * 4;
    case Blob::kI64: return static_cast<size_t>(count) * 8;
    default: return b.payload.size();
  }
}

}  // namespace

void write_container(const std::string& path, const BlobMap& entries, uint32_t version) {
  std::string out;
  out.append(kMagic, 4);
  put<uint32_t>(out, version);
  put<uint32_t>(out, static_cast<uint32_t>(entries.size()));
  for (const auto& [name, blob] : entries) {
    put<uint32_t>(out, static_cast<uint32_t>(name.size()));
    out.append(name);
    put<uint8_t>(out, blob.dtype);
    put<uint32_t>(out, static_cast<uint32_t>(blob.dims.size()));
    for (int64_t d : blob.dims) put<int64_t>(out, d);
    put<uint64_t>(out, blob.payload.size());
    out.append(reinterpret_cast<const char*>(blob.payload.data()), blob.payload.size());
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw value_error("cannot write checkpoint " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw value_error("failed writing checkpoint " + path);
}

BlobMap read_container(const std::string& path, uint32_t expect_version) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw value_error("cannot open checkpoint " + path);
  std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  Reader r(buf, path);

  const std::string magic = r.bytes(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0)
    throw value_error(path + " is not a checkpoint (bad magic)");
  const uint32_t version = r.get<uint32_t>();
  if (version != expect_version)
    throw value_error("checkpoint " + path + " has version " + std::to_string(version) +
                      ", this build reads version " + std::to_string(expect_version));
  const uint32_t count = r.get<uint32_t>();

  BlobMap entries;
  entries.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    const uint32_t name_len = r.get<uint32_t>();
    std::string name = r.bytes(name_len);
    Blob b;
    b.dtype = r.get<uint8_t>();
    if (b.dtype > Blob::kBytes)
      throw value_error("checkpoint " + path + ": entry " + name + " has unknown dtype");
    const uint32_t ndims = r.get<uint32_t>();
    b.dims.resize(ndims);
    for (uint32_t d = 0; d < ndims; ++d) b.dims[d] = r.get<int64_t>();
    const uint64_t len = r.get<uint64_t>();
    const std::string payload = r.bytes(len);
    b.payload.assign(payload.begin(), payload.end());
    if (b.dtype != Blob::kBytes && b.payload.size() != payload_size(b))
      throw value_error("checkpoint " + path + ": entry " + name +
                        " payload does not match its shape");
    entries.emplace_back(std::move(name), std::move(b));
  }
  if (r.remaining() != 0)
    throw value_error("checkpoint " + path + " has trailing bytes");
  return entries;
}

const Blob* find_blob(const BlobMap& m, const std::string& name) {
  for (const auto& [k, v] : m)
    if (k == name) return &v;
  return nullptr;
}

const Blob& require_blob(const BlobMap& m, const std::string& name) {
  const Blob* b = find_blob(m, name);
  if (!b) throw value_error("checkpoint is missing entry " + name);
  return *b;
}

Blob blob_from_tensor(const Tensor& t) {
  Blob b;
  b.dtype = Blob::kF32;
  b.dims = t.shape();
  b.payload.resize(static_cast<size_t>(t.numel()) * 4);
  const double* src = t.data();
  for (int64_t i = 0; i < t.numel(); ++i) {
    const float v = static_cast<float>(src[i]);
    std::memcpy(b.payload.data() + static_cast<size_t>(i) * 4, &v, 4);
  }
  return b;
}

void tensor_from_blob(const Blob& b, Tensor& into, const std::string& name) {
  if (b.dtype != Blob::kF32)
    throw value_error("checkpoint entry " + name + " is not tensor data");
  if (b.dims != into.shape())
    throw shape_error("checkpoint entry " + name + " has shape " + shape_str(b.dims) +
                      " but the model expects " + shape_str(into.shape()));
  double* dst = into.data();
  for (int64_t i = 0; i < into.numel(); ++i) {
    float v;
    std::memcpy(&v, b.payload.data() + static_cast<size_t>(i) * 4, 4);
    dst[i] = static_cast<double>(v);
  }
}

Blob blob_from_i64(int64_t v) {
  Blob b;
  b.dtype = Blob::kI64;
  b.payload.resize(8);
  std::memcpy(b.payload.data(), &v, 8);
  return b;
}

int64_t i64_from_blob(const Blob& b, const std::string& name) {
  if (b.dtype != Blob::kI64 || b.payload.size() != 8)
    throw value_error("checkpoint entry " + name + " is not an integer");
  int64_t v;
  std::memcpy(&v, b.payload.data(), 8);
  return v;
}

Blob blob_from_string(const std::string& s) {
  Blob b;
  b.dtype = Blob::kBytes;
  b.payload.assign(s.begin(), s.end());
  return b;
}

std::string string_from_blob(const Blob& b) {
  return std::string(b.payload.begin(), b.payload.end());
}

}  // namespace hyperstar
