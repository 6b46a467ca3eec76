#include "automlp/model/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "automlp/errors.hpp"

namespace automlp::model {
namespace {

constexpr std::array<char, 8> kMagic{'A', 'M', 'L', 'P', 'C', 'K', 'P', 'T'};

template <typename U>
void put_le(std::ostream& out, U v) {
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

template <typename U>
U get_le(std::istream& in) {
  std::array<unsigned char, sizeof(U)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw DataError("checkpoint is truncated");
  }
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(bytes[i]) << (8 * i);
  return v;
}

nlohmann::json tensor_list(const ModelParams& p, const ArchWeights& a) {
  auto list = nlohmann::json::array();
  p.for_each([&](const std::string& name, const Tensor2& t) {
    list.push_back({{"name", name}, {"rows", t.rows()}, {"cols", t.cols()}});
  });
  list.push_back({{"name", "alpha"}, {"rows", a.alpha.rows()}, {"cols", a.alpha.cols()}});
  return list;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  validate_params(ckpt.params, ckpt.config);
  nlohmann::json header{{"config", ckpt.config},
                        {"candidates", ckpt.arch.candidates},
                        {"tensors", tensor_list(ckpt.params, ckpt.arch)},
                        {"metadata", ckpt.metadata}};
  const std::string text = header.dump();
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  auto emit = [&](const Tensor2& t) {
    for (double v : t.values()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  };
  ckpt.params.for_each([&](const std::string&, const Tensor2& t) { emit(t); });
  emit(ckpt.arch.alpha);
}

Checkpoint read_checkpoint(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw DataError("not a checkpoint file (bad magic)");
  }
  const auto version = get_le<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto len = get_le<std::uint64_t>(in);
  if (len > (1ull << 32)) throw DataError("checkpoint header length is implausible");
  std::string text(len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(len))) {
    throw DataError("checkpoint header is truncated");
  }

  Checkpoint ckpt;
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
    ckpt.config = header.at("config").get<ModelConfig>();
    ckpt.arch.candidates = header.at("candidates").get<std::vector<std::size_t>>();
    ckpt.metadata = header.value("metadata", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed checkpoint header: ") + e.what());
  }
  ckpt.config.validate();

  // Build correctly shaped tensors from the config, then check the header
  // declares exactly those shapes before reading any values.
  numkit::Rng dummy(0);
  ckpt.params = init_params(ckpt.config, dummy);
  ckpt.arch.alpha = Tensor2(1, ckpt.arch.candidates.size());
  const auto expected = tensor_list(ckpt.params, ckpt.arch);
  const auto& declared = header.at("tensors");
  if (declared.size() != expected.size()) {
    throw DataError("checkpoint declares " + std::to_string(declared.size()) +
                    " tensors, config implies " + std::to_string(expected.size()));
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (declared[i] != expected[i]) {
      throw DataError("checkpoint tensor " + declared[i].dump() + " does not match expected " +
                      expected[i].dump());
    }
  }
  if (ckpt.arch.candidates.size() != ckpt.config.candidates.size()) {
    throw DataError("checkpoint architecture weights do not match the candidate windows");
  }
  auto fill = [&](Tensor2& t) {
    for (double& v : t.values()) v = std::bit_cast<double>(get_le<std::uint64_t>(in));
  };
  for (Tensor2* t : ckpt.params.tensors()) fill(*t);
  fill(ckpt.arch.alpha);
  if (in.peek() != std::char_traits<char>::eof()) throw DataError("trailing bytes after checkpoint");
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint '" + path.string() + "'");
  write_checkpoint(out, ckpt);
  if (!out) throw IoError("failed writing checkpoint '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path.string() + "'");
  return read_checkpoint(in);
}

}  // namespace automlp::model
