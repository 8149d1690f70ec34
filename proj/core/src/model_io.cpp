#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "wisig/error.hpp"
#include "wisig/svm.hpp"

namespace wisig {

namespace {

constexpr std::string_view kMagicPrefix = "WISVM";
constexpr char kVersion = '1';
constexpr std::size_t kHeaderBytes = 6 + 4 + 4 + 8 + 8 + 8;

template <typename T>
void put_le(std::string& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t b = 0; b < sizeof(U); ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get(const char* what) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    if (bytes_.size() - pos_ < sizeof(U)) {
      throw ParseError(std::string("model file truncated while reading ") + what + " at byte " +
                           std::to_string(pos_),
                       ParseError::Unit::byte_offset, pos_);
    }
    U bits = 0;
    for (std::size_t b = 0; b < sizeof(U); ++b) {
      bits |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + b])) << (8 * b);
    }
    pos_ += sizeof(U);
    return std::bit_cast<T>(bits);
  }

  std::size_t pos() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }
  void skip(std::size_t n) noexcept { pos_ += n; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

[[noreturn]] void fail(const std::string& what, std::size_t offset) {
  throw ParseError("model file: " + what + " at byte " + std::to_string(offset),
                   ParseError::Unit::byte_offset, offset);
}

}  // namespace

std::string serialize_model(const SvmModel& model) {
  std::string out;
  const std::size_t n_sv = model.support_vector_count();
  out.reserve(kHeaderBytes + n_sv * 8 + model.support_vectors().size() * 4);
  out.append(kMagicPrefix);
  out.push_back(kVersion);
  put_le(out, static_cast<std::uint32_t>(model.dim()));
  put_le(out, static_cast<std::uint32_t>(n_sv));
  put_le(out, model.gamma());
  put_le(out, model.c());
  put_le(out, model.bias());
  for (double a : model.dual_coefficients()) put_le(out, a);
  for (float v : model.support_vectors()) put_le(out, v);
  return out;
}

SvmModel deserialize_model(std::string_view bytes) {
  if (bytes.empty()) fail("empty file", 0);
  if (bytes.size() < kMagicPrefix.size() + 1) fail("truncated magic", bytes.size());
  if (bytes.substr(0, kMagicPrefix.size()) != kMagicPrefix) fail("bad magic", 0);
  if (bytes[kMagicPrefix.size()] != kVersion) {
    throw VersionError(std::string("model file version '") + bytes[kMagicPrefix.size()] +
                       "' is not supported (expected '" + kVersion + "')");
  }

  Reader in(bytes);
  in.skip(kMagicPrefix.size() + 1);
  const auto dim = in.get<std::uint32_t>("dim");
  const auto n_sv = in.get<std::uint32_t>("n_sv");
  if (dim == 0) fail("dim is zero", in.pos() - 8);
  if (n_sv == 0) fail("model has no support vectors", in.pos() - 4);
  const std::size_t gamma_at = in.pos();
  const auto gamma = in.get<double>("gamma");
  const auto c = in.get<double>("c");
  const auto bias = in.get<double>("bias");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) fail("invalid gamma", gamma_at);
  if (!(c > 0.0) || !std::isfinite(c)) fail("invalid c", gamma_at + 8);
  if (!std::isfinite(bias)) fail("invalid bias", gamma_at + 16);

  const std::size_t payload = std::size_t{n_sv} * 8 + std::size_t{n_sv} * dim * 4;
  if (in.remaining() < payload) fail("truncated payload", bytes.size());
  if (in.remaining() > payload) fail("trailing bytes", in.pos() + payload);

  std::vector<double> coefs(n_sv);
  for (auto& a : coefs) {
    const std::size_t at = in.pos();
    a = in.get<double>("dual coefficient");
    if (!std::isfinite(a) || std::fabs(a) > c) fail("dual coefficient outside [-c, c]", at);
  }
  std::vector<float> svs(std::size_t{n_sv} * dim);
  for (auto& v : svs) {
    const std::size_t at = in.pos();
    v = in.get<float>("support vector");
    if (!std::isfinite(v)) fail("non-finite support vector value", at);
  }
  return SvmModel(dim, std::move(svs), std::move(coefs), bias, gamma, c);
}

void save_model(const SvmModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  const std::string bytes = serialize_model(model);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

SvmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return deserialize_model(bytes);
}

}  // namespace wisig
