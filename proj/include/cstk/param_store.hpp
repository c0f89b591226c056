// cstk/param_store.hpp
//
// Copyright (c)  2026  The cstk authors
#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "cstk/common.hpp"
#include "cstk/rng.hpp"
#include "cstk/tensor.hpp"

namespace cstk {

namespace io {

inline void write_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline bool read_u32(std::istream& is, std::uint32_t* v) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) return false;
  *v = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
       (static_cast<std::uint32_t>(b[2]) << 16) |
       (static_cast<std::uint32_t>(b[3]) << 24);
  return true;
}

inline void write_f32(std::ostream& os, float f) {
  std::uint32_t v;
  std::memcpy(&v, &f, 4);
  write_u32(os, v);
}

inline bool read_f32(std::istream& is, float* f) {
  std::uint32_t v;
  if (!read_u32(is, &v)) return false;
  std::memcpy(f, &v, 4);
  return true;
}

}  // namespace io

// Named parameter tensors with paired gradient buffers; the unit of
// checkpointing.  Iteration follows insertion order.
template <typename Real>
class ParamStore {
 public:
  Tensor<Real>& create(const std::string& name, std::vector<int> dims) {
    if (name.empty()) throw UsageError("parameter name must be non-empty");
    if (index_.count(name))
      throw UsageError("duplicate parameter name: " + name);
    Tensor<Real> t(std::move(dims));
    t.grad();  // parameters always carry a gradient buffer
    index_.emplace(name, tensors_.size());
    order_.push_back(name);
    tensors_.push_back(t);
    return tensors_.back();
  }

  Tensor<Real>& create_uniform(const std::string& name, std::vector<int> dims,
                               Real bound, Rng& rng) {
    Tensor<Real>& t = create(name, std::move(dims));
    for (std::size_t i = 0; i < t.numel(); ++i)
      t.data()[i] = static_cast<Real>(rng.uniform(-bound, bound));
    return t;
  }

  bool contains(const std::string& name) const { return index_.count(name) > 0; }

  Tensor<Real>& at(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw UsageError("no such parameter: " + name);
    return tensors_[it->second];
  }
  const Tensor<Real>& at(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw UsageError("no such parameter: " + name);
    return tensors_[it->second];
  }

  const std::vector<std::string>& names() const { return order_; }
  std::size_t size() const { return tensors_.size(); }

  Tensor<Real>& tensor(std::size_t i) { return tensors_[i]; }
  const Tensor<Real>& tensor(std::size_t i) const { return tensors_[i]; }

  void zero_grads() {
    for (auto& t : tensors_) t.zero_grad();
  }

  std::size_t param_count() const {
    std::size_t n = 0;
    for (const auto& t : tensors_) n += t.numel();
    return n;
  }

  // Checkpoint layout (bit-exact): magic "CSTK", u32 version=1, u32 tensor
  // count; per tensor: u32 name length, UTF-8 name, u32 ndim, u32 dims[],
  // u8 dtype (0 = f32), payload little-endian row-major.
  void save(std::ostream& os) const {
    os.write("CSTK", 4);
    io::write_u32(os, 1u);
    io::write_u32(os, static_cast<std::uint32_t>(tensors_.size()));
    for (std::size_t i = 0; i < tensors_.size(); ++i) {
      const std::string& name = order_[i];
      io::write_u32(os, static_cast<std::uint32_t>(name.size()));
      os.write(name.data(), static_cast<std::streamsize>(name.size()));
      const Tensor<Real>& t = tensors_[i];
      io::write_u32(os, static_cast<std::uint32_t>(t.ndim()));
      for (int d = 0; d < t.ndim(); ++d)
        io::write_u32(os, static_cast<std::uint32_t>(t.dim(d)));
      os.put(static_cast<char>(0));  // dtype f32
      for (std::size_t j = 0; j < t.numel(); ++j)
        io::write_f32(os, static_cast<float>(t.data()[j]));
    }
    if (!os) throw FormatError("checkpoint write failed");
  }

  void save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open checkpoint for writing: " + path);
    save(os);
  }

  static ParamStore load(std::istream& is) {
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "CSTK", 4) != 0)
      throw FormatError("bad checkpoint magic");
    std::uint32_t version = 0, count = 0;
    if (!io::read_u32(is, &version) || version != 1)
      throw FormatError("unsupported checkpoint version");
    if (!io::read_u32(is, &count)) throw FormatError("truncated checkpoint");
    ParamStore ps;
    for (std::uint32_t i = 0; i < count; ++i) {
      std::uint32_t name_len = 0;
      if (!io::read_u32(is, &name_len) || name_len == 0 || name_len > (1u << 20))
        throw FormatError("bad parameter name length");
      std::string name(name_len, '\0');
      if (!is.read(name.data(), name_len)) throw FormatError("truncated name");
      std::uint32_t ndim = 0;
      if (!io::read_u32(is, &ndim) || ndim == 0 || ndim > 8)
        throw FormatError("bad tensor rank");
      std::vector<int> dims(ndim);
      std::uint64_t numel = 1;
      for (auto& d : dims) {
        std::uint32_t v = 0;
        if (!io::read_u32(is, &v) || v == 0) throw FormatError("bad tensor dim");
        numel *= v;
        if (numel > (1ull << 32)) throw FormatError("tensor dims overflow");
        d = static_cast<int>(v);
      }
      const int dtype = is.get();
      if (dtype != 0) throw FormatError("unsupported dtype");
      Tensor<Real>& t = ps.create(name, dims);
      for (std::size_t j = 0; j < t.numel(); ++j) {
        float f;
        if (!io::read_f32(is, &f)) throw FormatError("truncated payload");
        t.data()[j] = static_cast<Real>(f);
      }
    }
    is.peek();
    if (!is.eof()) throw FormatError("trailing bytes after checkpoint payload");
    return ps;
  }

  static ParamStore load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open checkpoint: " + path);
    return load(is);
  }

 private:
  std::vector<std::string> order_;
  std::vector<Tensor<Real>> tensors_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace cstk
