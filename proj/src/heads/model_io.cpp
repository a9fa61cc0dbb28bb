#include "poolbench/heads/model_io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>

#include "poolbench/errors.hpp"

namespace poolbench {

namespace {

enum class Kind : unsigned char {
  kLinearSoftmax = 1,
  kLinearHinge = 2,
  kCnn = 3,
  kBiLstm = 4,
};

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  void u8(unsigned char v) { put(&v, 1); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }

 private:
  void le(std::uint64_t v, int n) {
    std::array<unsigned char, 8> b{};
    for (int i = 0; i < n; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    put(b.data(), static_cast<std::size_t>(n));
  }
  void put(const unsigned char* p, std::size_t n) {
    out_.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n));
    if (!out_) throw std::ios_base::failure("model write failed");
  }
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}
  unsigned char u8() { return static_cast<unsigned char>(le(1)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  double f64() {
    const double v = std::bit_cast<double>(le(8));
    if (!std::isfinite(v)) throw DataError("model file contains a non-finite value");
    return v;
  }

 private:
  std::uint64_t le(int n) {
    std::array<unsigned char, 8> b{};
    in_.read(reinterpret_cast<char*>(b.data()), n);
    if (in_.gcount() != n) {
      throw DataError("unexpected end of model stream at byte offset " +
                      std::to_string(offset_ + static_cast<std::uint64_t>(in_.gcount())));
    }
    offset_ += static_cast<std::uint64_t>(n);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  std::istream& in_;
  std::uint64_t offset_ = 0;
};

void write_params(Writer& w, std::span<const double> params) {
  w.u64(params.size());
  for (double p : params) w.f64(p);
}

void read_params(Reader& r, std::span<double> params) {
  const std::uint64_t n = r.u64();
  if (n != params.size()) {
    throw DataError("model parameter count " + std::to_string(n) + " does not match its shape (" +
                    std::to_string(params.size()) + ")");
  }
  for (auto& p : params) p = r.f64();
}

}  // namespace

void save_model(const AnyModel& model, std::ostream& out) {
  Writer w(out);
  w.u8(kModelFormatVersion);
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearModel>) {
          w.u8(static_cast<unsigned char>(m.loss_kind() == LinearLoss::kSoftmaxCe
                                              ? Kind::kLinearSoftmax
                                              : Kind::kLinearHinge));
          w.u32(static_cast<std::uint32_t>(m.classes()));
          w.u32(static_cast<std::uint32_t>(m.dim()));
          w.u8(m.reg().kind == RegKind::kL1 ? 1 : 2);
          w.f64(m.reg().lambda);
        } else if constexpr (std::is_same_v<T, CnnHead>) {
          w.u8(static_cast<unsigned char>(Kind::kCnn));
          w.u32(static_cast<std::uint32_t>(m.classes()));
          w.u32(static_cast<std::uint32_t>(m.dim()));
          w.u32(static_cast<std::uint32_t>(m.arch().kernel_width));
          w.u32(static_cast<std::uint32_t>(m.arch().filters));
        } else {
          w.u8(static_cast<unsigned char>(Kind::kBiLstm));
          w.u32(static_cast<std::uint32_t>(m.classes()));
          w.u32(static_cast<std::uint32_t>(m.dim()));
          w.u32(static_cast<std::uint32_t>(m.arch().hidden));
        }
        write_params(w, m.parameters());
      },
      model);
}

AnyModel load_model(std::istream& in) {
  Reader r(in);
  const unsigned char version = r.u8();
  if (version != kModelFormatVersion) {
    throw DataError("unsupported model format version " + std::to_string(version));
  }
  const auto kind = static_cast<Kind>(r.u8());
  // Shape errors from the constructors are data errors here.
  try {
    switch (kind) {
      case Kind::kLinearSoftmax:
      case Kind::kLinearHinge: {
        const std::size_t classes = r.u32();
        const std::size_t dim = r.u32();
        const unsigned char reg_tag = r.u8();
        if (reg_tag != 1 && reg_tag != 2) throw DataError("unknown regularization tag");
        RegularizationSpec reg{reg_tag == 1 ? RegKind::kL1 : RegKind::kL2, r.f64()};
        LinearModel m(classes, dim,
                      kind == Kind::kLinearSoftmax ? LinearLoss::kSoftmaxCe : LinearLoss::kHingeOvr,
                      reg);
        read_params(r, m.parameters());
        return m;
      }
      case Kind::kCnn: {
        const std::size_t classes = r.u32();
        const std::size_t dim = r.u32();
        CnnArch arch;
        arch.kernel_width = r.u32();
        arch.filters = r.u32();
        CnnHead m(classes, dim, arch);
        read_params(r, m.parameters());
        return m;
      }
      case Kind::kBiLstm: {
        const std::size_t classes = r.u32();
        const std::size_t dim = r.u32();
        BiLstmArch arch;
        arch.hidden = r.u32();
        BiLstmHead m(classes, dim, arch);
        read_params(r, m.parameters());
        return m;
      }
    }
  } catch (const ConfigError& e) {
    throw DataError(std::string("invalid model shape: ") + e.what());
  }
  throw DataError("unknown model kind tag " + std::to_string(static_cast<int>(kind)));
}

void save_model_file(const AnyModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  save_model(model, out);
}

AnyModel load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return load_model(in);
}

}  // namespace poolbench
