#include "influencerrank/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "influencerrank/config.hpp"
#include "influencerrank/errors.hpp"
#include "influencerrank/featurizer.hpp"

namespace infrank {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'I', 'N', 'F', 'R', 'A', 'N', 'K', '\0'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint payload is written in host order; big-endian hosts need byte swapping");

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T take(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw DataError("checkpoint truncated");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

json layout_descriptor() {
  json slices = json::array();
  for (const auto& s : FeatureLayout::kSlices)
    slices.push_back({{"name", s.name}, {"offset", s.offset}, {"width", s.width}});
  return {{"width", FeatureLayout::kWidth}, {"slices", slices}, {"columns", FeatureLayout::column_names()}};
}

}  // namespace

std::string encode_checkpoint(const Checkpoint& ckpt) {
  const auto& p = ckpt.params;
  json tensors = json::array();
  for (std::size_t i = 0; i < p.size(); ++i)
    tensors.push_back({{"name", p.names[i]}, {"rows", p.tensors[i].rows()}, {"cols", p.tensors[i].cols()}});
  json header = {{"model", to_json(p.config)},
                 {"feature_layout", layout_descriptor()},
                 {"feature_scale", p.feature_scale},
                 {"tensors", tensors},
                 {"metadata", ckpt.metadata}};
  const std::string text = header.dump();

  std::string out(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, text.size());
  out += text;
  for (const auto& t : p.tensors)
    out.append(reinterpret_cast<const char*>(t.data().data()), t.size() * sizeof(double));
  return out;
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  if (bytes.size() < sizeof kMagic || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
    throw DataError("not a checkpoint file (bad magic)");
  std::size_t pos = sizeof kMagic;
  const auto version = take<std::uint32_t>(bytes, pos);
  if (version != kCheckpointVersion)
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  const auto header_len = take<std::uint64_t>(bytes, pos);
  if (pos + header_len > bytes.size()) throw DataError("checkpoint truncated");
  json header = json::parse(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                            bytes.begin() + static_cast<std::ptrdiff_t>(pos + header_len), nullptr, false);
  if (header.is_discarded()) throw DataError("checkpoint header is not valid JSON");
  pos += header_len;

  Checkpoint ckpt;
  try {
    ckpt.params.config = model_config_from_json(header.at("model"));
    ckpt.params.feature_scale = header.at("feature_scale").get<std::vector<double>>();
    if (header.at("feature_layout").at("width").get<std::size_t>() != FeatureLayout::kWidth)
      throw DataError("checkpoint feature layout width differs from this build");
    for (const auto& t : header.at("tensors")) {
      const auto rows = t.at("rows").get<std::size_t>();
      const auto cols = t.at("cols").get<std::size_t>();
      std::vector<double> data(rows * cols);
      const std::size_t n = data.size() * sizeof(double);
      if (pos + n > bytes.size()) throw DataError("checkpoint payload truncated");
      std::memcpy(data.data(), bytes.data() + pos, n);
      pos += n;
      ckpt.params.names.push_back(t.at("name").get<std::string>());
      ckpt.params.tensors.emplace_back(rows, cols, std::move(data));
    }
    ckpt.metadata = header.value("metadata", json::object());
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed checkpoint header: ") + e.what());
  } catch (const ContractError& e) {
    throw DataError(std::string("malformed checkpoint header: ") + e.what());
  }
  if (pos != bytes.size()) throw DataError("checkpoint has trailing bytes");

  // Shapes must agree with what the config implies.
  const ModelParams expected = init_params(ckpt.params.config);
  if (expected.names != ckpt.params.names) throw DataError("checkpoint tensor names do not match config");
  for (std::size_t i = 0; i < expected.size(); ++i)
    if (!expected.tensors[i].same_shape(ckpt.params.tensors[i]))
      throw DataError("checkpoint tensor '" + expected.names[i] + "' has the wrong shape");
  if (ckpt.params.feature_scale.size() != ckpt.params.config.input_dim)
    throw DataError("checkpoint feature scale has the wrong length");
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& file, const Checkpoint& ckpt) {
  if (file.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(file.parent_path(), ec);
  }
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write checkpoint " + file.string());
  const std::string bytes = encode_checkpoint(ckpt);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed for " + file.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_checkpoint(buf.str());
}

}  // namespace infrank
