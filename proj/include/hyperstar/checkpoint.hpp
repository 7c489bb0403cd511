#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hyperstar/tensor.hpp"

namespace hyperstar {

// Binary container: magic "HSG2", version, then named blobs. Tensors are
// stored as 32-bit floats, which is exact because training state is kept on
// the 32-bit grid.
constexpr uint32_t kCheckpointVersion = 1;

struct Blob {
  enum Dtype : uint8_t { kF32 = 0, kI64 = 1, kBytes = 2 };
  uint8_t dtype = kBytes;
  std::vector<int64_t> dims;  // empty for scalars / raw bytes
  std::vector<uint8_t> payload;
};

using BlobMap = std::vector<std::pair<std::string, Blob>>;

void write_container(const std::string& path, const BlobMap& entries,
                     uint32_t version = kCheckpointVersion);
// Throws value_error on bad magic, unsupported version, or truncation.
BlobMap read_container(const std::string& path,
                       uint32_t expect_version = kCheckpointVersion);

const Blob* find_blob(const BlobMap& m, const std::string& name);
const Blob& require_blob(const BlobMap& m, const std::string& name);

Blob blob_from_tensor(const Tensor& t);
// Copies into an existing tensor; throws shape_error on mismatch.
void tensor_from_blob(const Blob& b, Tensor& into, const std::string& name);

Blob blob_from_i64(int64_t v);
int64_t i64_from_blob(const Blob& b, const std::string& name);

Blob blob_from_string(const std::string& s);
std::string string_from_blob(const Blob& b);

}  // namespace hyperstar
