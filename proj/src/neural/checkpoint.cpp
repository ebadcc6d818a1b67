#include "botsense/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace botsense {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.append(b, 4);
}

class Reader {
 public:
  explicit Reader(const std::string& s) : s_(s) {}
  bool done() const { return pos_ == s_.size(); }
  std::string take(std::size_t n, const char* what) {
    if (s_.size() - pos_ < n) throw Error("io", std::string("checkpoint truncated while reading ") + what);
    std::string out = s_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint32_t u32(const char* what) {
    const std::string b = take(4, what);
    std::uint32_t v;
    std::memcpy(&v, b.data(), 4);
    return v;
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;
};

std::size_t dtype_size(DType d) {
  switch (d) {
    case DType::Float32: return 4;
    case DType::Float64: return 8;
  }
  throw Error("io", "unknown checkpoint dtype");
}

template <typename T>
constexpr DType dtype_of() {
  return sizeof(T) == 4 ? DType::Float32 : DType::Float64;
}

}  // namespace

std::string encode_checkpoint(const std::vector<CheckpointTensor>& tensors) {
  std::string out(kCheckpointMagic, 5);
  put_u32(out, kCheckpointVersion);
  for (const CheckpointTensor& t : tensors) {
    if (t.bytes.size() != shape_count(t.shape) * dtype_size(t.dtype)) {
      throw Error("io", "checkpoint tensor " + t.name + " has inconsistent byte length");
    }
    put_u32(out, static_cast<std::uint32_t>(t.name.size()));
    out += t.name;
    out.push_back(static_cast<char>(t.dtype));
    put_u32(out, static_cast<std::uint32_t>(t.shape.size()));
    for (int d : t.shape) put_u32(out, static_cast<std::uint32_t>(d));
    out += t.bytes;
  }
  return out;
}

std::vector<CheckpointTensor> decode_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  if (r.take(5, "magic") != std::string(kCheckpointMagic, 5)) throw Error("io", "not a BSNN1 checkpoint");
  const std::uint32_t version = r.u32("version");
  if (version != kCheckpointVersion) throw Error("io", "unsupported checkpoint version " + std::to_string(version));
  std::vector<CheckpointTensor> out;
  while (!r.done()) {
    CheckpointTensor t;
    const std::uint32_t len = r.u32("name length");
    t.name = r.take(len, "name");
    const std::uint8_t code = static_cast<std::uint8_t>(r.take(1, "dtype")[0]);
    if (code != 1 && code != 2) throw Error("io", "unknown dtype code " + std::to_string(code) + " for " + t.name);
    t.dtype = static_cast<DType>(code);
    const std::uint32_t rank = r.u32("rank");
    for (std::uint32_t i = 0; i < rank; ++i) t.shape.push_back(static_cast<int>(r.u32("shape")));
    t.bytes = r.take(shape_count(t.shape) * dtype_size(t.dtype), "values");
    out.push_back(std::move(t));
  }
  return out;
}

void write_checkpoint_file(const std::string& path, const std::vector<CheckpointTensor>& tensors) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("io", "cannot write checkpoint " + path);
  const std::string bytes = encode_checkpoint(tensors);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("io", "failed writing checkpoint " + path);
}

std::vector<CheckpointTensor> read_checkpoint_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("io", "cannot read checkpoint " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return decode_checkpoint(ss.str());
}

template <typename T>
CheckpointTensor to_checkpoint(const Param<T>& p) {
  CheckpointTensor t;
  t.name = p.name;
  t.dtype = dtype_of<T>();
  t.shape = p.value.shape;
  t.bytes.assign(reinterpret_cast<const char*>(p.value.ptr()), p.value.size() * sizeof(T));
  return t;
}

template <typename T>
void load_params(const std::vector<CheckpointTensor>& stored, const std::vector<Param<T>*>& params) {
  std::map<std::string, const CheckpointTensor*> by_name;
  for (const CheckpointTensor& t : stored) {
    if (!by_name.emplace(t.name, &t).second) throw Error("io", "duplicate checkpoint tensor " + t.name);
  }
  if (by_name.size() != params.size()) {
    throw Error("io", "checkpoint has " + std::to_string(by_name.size()) + " tensors, model expects " +
                          std::to_string(params.size()));
  }
  for (Param<T>* p : params) {
    auto it = by_name.find(p->name);
    if (it == by_name.end()) throw Error("io", "checkpoint is missing tensor " + p->name);
    const CheckpointTensor& t = *it->second;
    if (t.shape != p->value.shape) {
      throw Error("io", "checkpoint tensor " + p->name + " has shape " + shape_str(t.shape) + ", model expects " +
                            shape_str(p->value.shape));
    }
    if (t.dtype != dtype_of<T>()) throw Error("io", "checkpoint tensor " + p->name + " has a different dtype");
    std::memcpy(p->value.ptr(), t.bytes.data(), t.bytes.size());
  }
}

template CheckpointTensor to_checkpoint(const Param<float>&);
template CheckpointTensor to_checkpoint(const Param<double>&);
template void load_params(const std::vector<CheckpointTensor>&, const std::vector<Param<float>*>&);
template void load_params(const std::vector<CheckpointTensor>&, const std::vector<Param<double>*>&);

}  // namespace botsense
