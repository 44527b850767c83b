#include "sst/autodiff/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>

#include "sst/error.hpp"
#include "sst/io.hpp"

namespace sst::ad {
namespace {

template <typename U>
void put_le(std::string& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  template <typename U>
  U get() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      v |= static_cast<U>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(U);
    return v;
  }

  std::string bytes(std::size_t n) {
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool at_end() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > data_.size()) throw Error("checkpoint truncated");
  }
  std::string data_;
  std::size_t pos_ = 0;
};

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors,
                      DType dtype) {
  std::string out(kCheckpointMagic, 7);
  put_le<std::uint32_t>(out, kCheckpointVersion);
  for (const auto& [name, t] : tensors) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape()) put_le<std::uint64_t>(out, d);
    out.push_back(static_cast<char>(dtype));
    for (double v : t.values()) {
      if (dtype == DType::f64) {
        put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
      } else {
        put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
      }
    }
  }
  write_file_atomic(path, out);
}

std::vector<NamedTensor> read_checkpoint(const std::filesystem::path& path) {
  Reader in(read_file(path));
  if (in.bytes(7) != std::string(kCheckpointMagic, 7)) {
    throw Error("not a checkpoint (bad magic): " + path.string());
  }
  const auto version = in.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw Error("unsupported checkpoint version " + std::to_string(version));
  }
  std::vector<NamedTensor> out;
  while (!in.at_end()) {
    NamedTensor nt;
    nt.name = in.bytes(in.get<std::uint32_t>());
    const auto rank = in.get<std::uint32_t>();
    std::vector<std::size_t> shape(rank);
    for (auto& d : shape) d = static_cast<std::size_t>(in.get<std::uint64_t>());
    const auto tag = in.get<std::uint8_t>();
    std::vector<double> values(shape_product(shape));
    for (double& v : values) {
      if (tag == static_cast<std::uint8_t>(DType::f64)) {
        v = std::bit_cast<double>(in.get<std::uint64_t>());
      } else if (tag == static_cast<std::uint8_t>(DType::f32)) {
        v = static_cast<double>(std::bit_cast<float>(in.get<std::uint32_t>()));
      } else {
        throw Error("unknown dtype tag " + std::to_string(tag) + " for tensor " + nt.name);
      }
    }
    nt.tensor = Tensor(std::move(shape), std::move(values));
    out.push_back(std::move(nt));
  }
  return out;
}

void save_parameters(const std::filesystem::path& path, const ParameterStore& store, DType dtype) {
  std::vector<NamedTensor> tensors;
  tensors.reserve(store.size());
  for (std::size_t i = 0; i < store.size(); ++i) tensors.push_back({store.name(i), store.value(i)});
  write_checkpoint(path, tensors, dtype);
}

void load_parameters(const std::filesystem::path& path, ParameterStore& store) {
  std::map<std::string, Tensor> loaded;
  for (auto& nt : read_checkpoint(path)) loaded.emplace(std::move(nt.name), std::move(nt.tensor));
  for (std::size_t i = 0; i < store.size(); ++i) {
    auto it = loaded.find(store.name(i));
    if (it == loaded.end()) throw Error("checkpoint is missing tensor " + store.name(i));
    if (it->second.shape() != store.value(i).shape()) {
      throw Error("checkpoint tensor " + store.name(i) + " has the wrong shape");
    }
    store.value(i) = std::move(it->second);
  }
}

}  // namespace sst::ad
