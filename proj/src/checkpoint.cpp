#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <string>

#include "mtgae/errors.hpp"
#include "mtgae/model.hpp"

namespace mtgae::model {

namespace {

constexpr const char* kFormat = "mtgae-checkpoint-v1";

void put_le64(std::ostream& out, double value) {
  auto bits = std::bit_cast<std::uint64_t>(value);
  char bytes[8];
  for (char& byte : bytes) {
    byte = static_cast<char>(bits & 0xFF);
    bits >>= 8;
  }
  out.write(bytes, 8);
}

double get_le64(const unsigned char* bytes) {
  std::uint64_t bits = 0;
  for (int k = 7; k >= 0; --k) {
    bits = (bits << 8) | bytes[k];
  }
  return std::bit_cast<double>(bits);
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  const auto dims = ckpt.params.dims();
  const nlohmann::json header = {
      {"format", kFormat},
      {"dims", {dims.input_dim, dims.hidden1, dims.hidden2, dims.num_classes}},
      {"zeta", ckpt.zeta},
      {"config", ckpt.config},
  };
  out << header.dump() << '\n';
  for (const auto block : ckpt.params.blocks()) {
    for (const double x : block) {
      put_le64(out, x);
    }
  }
  if (!out) {
    throw std::runtime_error("failed to write checkpoint");
  }
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  write_checkpoint(out, ckpt);
}

Checkpoint read_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ArtifactError("checkpoint is empty");
  }
  Checkpoint ckpt;
  ModelDims dims;
  try {
    const auto header = nlohmann::json::parse(line);
    if (header.at("format").get<std::string>() != kFormat) {
      throw ArtifactError("unsupported checkpoint format");
    }
    const auto d = header.at("dims").get<std::vector<std::size_t>>();
    if (d.size() != 4) {
      throw ArtifactError("checkpoint dims must have four entries");
    }
    dims = {d[0], d[1], d[2], d[3]};
    ckpt.zeta = header.at("zeta").get<double>();
    ckpt.config = header.at("config");
  } catch (const nlohmann::json::exception& e) {
    throw ArtifactError(std::string("corrupt checkpoint header: ") + e.what());
  }

  try {
    ckpt.params = ModelParams::zeros(dims);
  } catch (const std::invalid_argument& e) {
    throw ArtifactError(std::string("invalid checkpoint dims: ") + e.what());
  }

  const std::string payload{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  const std::size_t expected = 8 * ckpt.params.parameter_count();
  if (payload.size() != expected) {
    throw ArtifactError("checkpoint payload has " + std::to_string(payload.size()) +
                        " bytes, expected " + std::to_string(expected) +
                        (payload.size() < expected ? " (truncated)" : " (trailing data)"));
  }
  const auto* bytes = reinterpret_cast<const unsigned char*>(payload.data());
  for (auto block : ckpt.params.blocks()) {
    for (double& x : block) {
      x = get_le64(bytes);
      bytes += 8;
    }
  }
  ckpt.params.generation = 0;
  return ckpt;
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ArtifactError("cannot open checkpoint '" + path + "'");
  }
  return read_checkpoint(in);
}

}  // namespace mtgae::model
