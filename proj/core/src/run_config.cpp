#include "foc/run_config.hpp"

#include <fstream>
#include <sstream>

#include "foc/errors.hpp"

namespace foc {

void TrainConfig::apply_mode_constraints() {
  if (mode == TrainMode::FocLight) {
    weights.lambda_u = 0.0;
    epochs.warmup = 0;
    epochs.finetune = 0;
    ratio.repetitions = 1;
    model.heads_per_type = 1;
  }
}

void TrainConfig::validate() const {
  if (weights.lambda_s < 0 || weights.lambda_u < 0)
    throw ConfigError("config: lambda_s and lambda_u must be >= 0");
  if (ratio.r < 0 || ratio.r > 1)
    throw ConfigError("config: r must be in [0,1]");
  if (ratio.batch_size < 1) throw ConfigError("config: batch_size must be >= 1");
  if (ratio.repetitions < 1) throw ConfigError("config: repetitions must be >= 1");
  if (model.k <= model.k_gt) throw ConfigError("config: k must exceed k_gt");
  if (model.heads_per_type < 1)
    throw ConfigError("config: heads_per_type must be >= 1");
  if (epochs.warmup < 0 || epochs.finetune < 0 || epochs.main < 0)
    throw ConfigError("config: epoch counts must be >= 0");
}

std::string mode_name(TrainMode mode) {
  switch (mode) {
    case TrainMode::Foc: return "foc";
    case TrainMode::FocLight: return "foc-light";
    case TrainMode::WarmupOnly: return "warm-up-only";
  }
  return {};
}

namespace {

TrainMode parse_mode(const std::string& v) {
  if (v == "foc") return TrainMode::Foc;
  if (v == "foc-light") return TrainMode::FocLight;
  if (v == "warm-up-only") return TrainMode::WarmupOnly;
  throw ConfigError("config: unknown mode '" + v + "'");
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config: bad boolean for key '" + key + "'");
}

}  // namespace

TrainConfig parse_run_config_text(const std::string& text) {
  TrainConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    // trim
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: missing '=' on line " + std::to_string(line_no));
    auto trim = [](std::string s) {
      auto a = s.find_first_not_of(" \t");
      auto b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "mode") cfg.mode = parse_mode(val);
      else if (key == "lambda_s") cfg.weights.lambda_s = std::stod(val);
      else if (key == "lambda_u") cfg.weights.lambda_u = std::stod(val);
      else if (key == "r") cfg.ratio.r = std::stod(val);
      else if (key == "batch_size") cfg.ratio.batch_size = std::stoi(val);
      else if (key == "repetitions") cfg.ratio.repetitions = std::stoi(val);
      else if (key == "heads_per_type") cfg.model.heads_per_type = std::stoi(val);
      else if (key == "k") cfg.model.k = std::stoi(val);
      else if (key == "k_gt") cfg.model.k_gt = std::stoi(val);
      else if (key == "image_size") cfg.model.image_size = std::stoi(val);
      else if (key == "epochs.warmup") cfg.epochs.warmup = std::stoi(val);
      else if (key == "epochs.finetune") cfg.epochs.finetune = std::stoi(val);
      else if (key == "epochs.main") cfg.epochs.main = std::stoi(val);
      else if (key == "lr.warmup") cfg.lr.warmup = std::stod(val);
      else if (key == "lr.finetune") cfg.lr.finetune = std::stod(val);
      else if (key == "lr.main") cfg.lr.main = std::stod(val);
      else if (key == "seed") cfg.seed = std::stoull(val);
      else if (key == "augmentation.crop_min") cfg.augmentation.crop_min = std::stod(val);
      else if (key == "augmentation.crop_max") cfg.augmentation.crop_max = std::stod(val);
      else if (key == "augmentation.flip_prob") cfg.augmentation.flip_prob = std::stod(val);
      else if (key == "augmentation.brightness") cfg.augmentation.brightness = std::stod(val);
      else if (key == "augmentation.hue_degrees") cfg.augmentation.hue_degrees = std::stod(val);
      else if (key == "augmentation.sobel") cfg.augmentation.sobel = parse_bool(val, key);
      else if (key == "backbone") {
        if (val == "tiny-conv") cfg.model.backbone = BackboneKind::TinyConv;
        else if (val == "residual") cfg.model.backbone = BackboneKind::Residual;
        else throw ConfigError("config: unknown backbone '" + val + "'");
      }
      else if (key == "input_channels") cfg.model.input_channels = std::stoi(val);
      else if (key == "include_labeled_pairs_in_mi")
        cfg.include_labeled_pairs_in_mi = parse_bool(val, key);
      else if (key == "ce_inverse_on_unlabeled")
        cfg.ce_inverse_on_unlabeled = parse_bool(val, key);
      else if (key == "alternate_per_epoch")
        cfg.alternate_per_epoch = parse_bool(val, key);
      else
        throw ConfigError("config: unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw ConfigError("config: bad value for key '" + key + "'");
    }
  }
  cfg.apply_mode_constraints();
  cfg.validate();
  return cfg;
}

TrainConfig parse_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config_text(ss.str());
}

void write_run_config(const std::string& path, const TrainConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw ConfigError("config: cannot write " + path);
  out << "mode = " << mode_name(cfg.mode) << '\n'
      << "lambda_s = " << cfg.weights.lambda_s << '\n'
      << "lambda_u = " << cfg.weights.lambda_u << '\n'
      << "r = " << cfg.ratio.r << '\n'
      << "batch_size = " << cfg.ratio.batch_size << '\n'
      << "repetitions = " << cfg.ratio.repetitions << '\n'
      << "heads_per_type = " << cfg.model.heads_per_type << '\n'
      << "k = " << cfg.model.k << '\n'
      << "k_gt = " << cfg.model.k_gt << '\n'
      << "image_size = " << cfg.model.image_size << '\n'
      << "backbone = "
      << (cfg.model.backbone == BackboneKind::TinyConv ? "tiny-conv" : "residual")
      << '\n'
      << "input_channels = " << cfg.model.input_channels << '\n'
      << "epochs.warmup = " << cfg.epochs.warmup << '\n'
      << "epochs.finetune = " << cfg.epochs.finetune << '\n'
      << "epochs.main = " << cfg.epochs.main << '\n'
      << "lr.warmup = " << cfg.lr.warmup << '\n'
      << "lr.finetune = " << cfg.lr.finetune << '\n'
      << "lr.main = " << cfg.lr.main << '\n'
      << "seed = " << cfg.seed << '\n'
      << "augmentation.crop_min = " << cfg.augmentation.crop_min << '\n'
      << "augmentation.crop_max = " << cfg.augmentation.crop_max << '\n'
      << "augmentation.flip_prob = " << cfg.augmentation.flip_prob << '\n'
      << "augmentation.brightness = " << cfg.augmentation.brightness << '\n'
      << "augmentation.hue_degrees = " << cfg.augmentation.hue_degrees << '\n'
      << "augmentation.sobel = " << (cfg.augmentation.sobel ? "true" : "false") << '\n'
      << "include_labeled_pairs_in_mi = "
      << (cfg.include_labeled_pairs_in_mi ? "true" : "false") << '\n'
      << "ce_inverse_on_unlabeled = "
      << (cfg.ce_inverse_on_unlabeled ? "true" : "false") << '\n'
      << "alternate_per_epoch = "
      << (cfg.alternate_per_epoch ? "true" : "false") << '\n';
}

}  // namespace foc
