#include "foc/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "foc/errors.hpp"

namespace foc {

namespace {

constexpr char kMagic[4] = {'F', 'O', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

using nlohmann::json;

void write_blob(std::ofstream& out, const std::vector<float>& v) {
  std::uint64_t n = v.size();
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(n * sizeof(float)));
}

std::vector<float> read_blob(std::ifstream& in) {
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  std::vector<float> v(n);
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(n * sizeof(float)));
  if (!in) throw DataError("checkpoint: truncated blob");
  return v;
}

json adam_meta(const std::optional<AdamState>& s) {
  json j;
  j["present"] = s.has_value();
  if (s) j["t"] = s->t;
  return j;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  json hdr;
  hdr["format_version"] = kVersion;
  hdr["backbone"] =
      ckpt.config.backbone == BackboneKind::TinyConv ? "tiny-conv" : "residual";
  hdr["input_channels"] = ckpt.config.input_channels;
  hdr["image_size"] = ckpt.config.image_size;
  hdr["k_gt"] = ckpt.config.k_gt;
  hdr["k"] = ckpt.config.k;
  hdr["heads_per_type"] = ckpt.config.heads_per_type;
  hdr["norm_mean"] = ckpt.norm.mean;
  hdr["norm_std"] = ckpt.norm.stddev;
  hdr["phase"] = ckpt.phase;
  hdr["epoch"] = ckpt.epoch;
  hdr["seed"] = ckpt.seed;
  hdr["unlabeled_cursor"] = ckpt.unlabeled_cursor;
  hdr["rng_state"] = ckpt.rng_state;
  hdr["adam_backbone"] = adam_meta(ckpt.adam_backbone);
  hdr["adam_normal"] = adam_meta(ckpt.adam_normal);
  hdr["adam_over"] = adam_meta(ckpt.adam_over);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("checkpoint: cannot write " + path);
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(&kVersion), sizeof(kVersion));
  std::string hs = hdr.dump();
  std::uint64_t hlen = hs.size();
  out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  out.write(hs.data(), static_cast<std::streamsize>(hlen));
  write_blob(out, ckpt.parameters);
  for (const auto* a : {&ckpt.adam_backbone, &ckpt.adam_normal, &ckpt.adam_over}) {
    if (a->has_value()) {
      write_blob(out, (*a)->m);
      write_blob(out, (*a)->v);
    }
  }
  if (!out) throw DataError("checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("checkpoint: cannot open " + path);
  char magic[4];
  std::uint32_t version = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("checkpoint: bad magic in " + path);
  if (version != kVersion)
    throw DataError("checkpoint: unsupported format version");
  std::uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
  std::string hs(hlen, '\0');
  in.read(hs.data(), static_cast<std::streamsize>(hlen));
  json hdr = json::parse(hs);

  Checkpoint ckpt;
  ckpt.config.backbone = hdr.at("backbone") == "tiny-conv"
                             ? BackboneKind::TinyConv
                             : BackboneKind::Residual;
  ckpt.config.input_channels = hdr.at("input_channels");
  ckpt.config.image_size = hdr.at("image_size");
  ckpt.config.k_gt = hdr.at("k_gt");
  ckpt.config.k = hdr.at("k");
  ckpt.config.heads_per_type = hdr.at("heads_per_type");
  ckpt.norm.mean = hdr.at("norm_mean").get<std::vector<float>>();
  ckpt.norm.stddev = hdr.at("norm_std").get<std::vector<float>>();
  ckpt.phase = hdr.at("phase");
  ckpt.epoch = hdr.at("epoch");
  ckpt.seed = hdr.at("seed");
  ckpt.unlabeled_cursor = hdr.at("unlabeled_cursor");
  ckpt.rng_state = hdr.at("rng_state");
  ckpt.parameters = read_blob(in);
  auto read_adam = [&](const char* key) -> std::optional<AdamState> {
    if (!hdr.at(key).at("present").get<bool>()) return std::nullopt;
    AdamState s;
    s.t = hdr.at(key).at("t");
    s.m = read_blob(in);
    s.v = read_blob(in);
    return s;
  };
  ckpt.adam_backbone = read_adam("adam_backbone");
  ckpt.adam_normal = read_adam("adam_normal");
  ckpt.adam_over = read_adam("adam_over");
  return ckpt;
}

Checkpoint snapshot_model(Model& model) {
  Checkpoint ckpt;
  ckpt.config = model.config();
  ckpt.norm = model.norm_stats();
  ckpt.parameters = model.parameters_flat();
  return ckpt;
}

Model restore_model(const Checkpoint& ckpt) {
  Model model(ckpt.config, ckpt.seed);
  model.norm_stats() = ckpt.norm;
  model.set_parameters_flat(ckpt.parameters);
  return model;
}

std::string checkpoint_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("checkpoint_digest: cannot open " + path);
  // FNV-1a over the file contents
  std::uint64_t h = 1469598103934665603ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
    if (!in) break;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

}  // namespace foc
