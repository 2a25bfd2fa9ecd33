#include "foc/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "foc/errors.hpp"
#include "foc/rng.hpp"

namespace foc {

DatasetSplit partition_dataset(std::vector<Sample> samples,
                               const PartitionOptions& opts) {
  DatasetSplit out;
  std::vector<Sample> auto_certain;
  for (auto& s : samples) {
    bool certain = s.has_label() && is_certain(s.label());
    s.certain = certain;
    switch (s.split_tag) {
      case SplitTag::Val:
        out.validation.push_back(std::move(s));
        break;
      case SplitTag::Unlabeled:
        out.unlabeled.push_back(std::move(s));
        break;
      case SplitTag::Train:
        if (certain) out.labeled.push_back(std::move(s));
        else out.unlabeled.push_back(std::move(s));
        break;
      case SplitTag::Auto:
        if (certain) auto_certain.push_back(std::move(s));
        else out.unlabeled.push_back(std::move(s));
        break;
    }
  }

  if (!auto_certain.empty()) {
    // seeded stratified split of auto-tagged certain samples
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < auto_certain.size(); ++i)
      by_class[hard_label(auto_certain[i].label())].push_back(i);
    std::set<std::size_t> to_val;
    Rng rng(derive_seed(opts.seed, 0x5117));
    for (auto& [cls, idxs] : by_class) {
      std::shuffle(idxs.begin(), idxs.end(), rng);
      auto n_val = static_cast<std::size_t>(
          opts.val_fraction * static_cast<double>(idxs.size()));
      for (std::size_t j = 0; j < n_val; ++j) to_val.insert(idxs[j]);
    }
    for (std::size_t i = 0; i < auto_certain.size(); ++i) {
      if (to_val.count(i)) out.validation.push_back(std::move(auto_certain[i]));
      else out.labeled.push_back(std::move(auto_certain[i]));
    }
  }

  if (out.labeled.empty())
    throw ConfigError("partition_dataset: empty labeled pool, training impossible");
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, ',')) fields.push_back(cur);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

SplitTag parse_split_tag(const std::string& s, const std::string& where) {
  if (s == "train") return SplitTag::Train;
  if (s == "val") return SplitTag::Val;
  if (s == "unlabeled") return SplitTag::Unlabeled;
  if (s == "auto") return SplitTag::Auto;
  throw DataError("manifest: unknown split '" + s + "' at " + where);
}

}  // namespace

std::vector<Sample> read_manifest_rows(const std::string& directory,
                                       const std::string& manifest_path,
                                       bool load_images) {
  std::ifstream in(manifest_path);
  if (!in) throw DataError("manifest: cannot open " + manifest_path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("manifest: empty file " + manifest_path);
  auto header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "path" || header[1] != "split")
    throw DataError("manifest: bad header in " + manifest_path);
  const std::size_t k_gt = header.size() - 2;
  for (std::size_t c = 0; c < k_gt; ++c) {
    if (header[2 + c] != "vote_" + std::to_string(c))
      throw DataError("manifest: bad vote column header in " + manifest_path);
  }

  std::vector<Sample> samples;
  std::set<std::string> seen_paths;
  int row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty()) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto where = manifest_path + ":" + std::to_string(row_no);
    auto fields = split_csv_line(line);
    if (fields.size() != 2 + k_gt)
      throw DataError("manifest: row of wrong arity at " + where);
    Sample s;
    s.path = fields[0];
    if (!seen_paths.insert(s.path).second)
      throw DataError("manifest: duplicate path '" + s.path + "' at " + where);
    s.split_tag = parse_split_tag(fields[1], where);
    AnnotationSet votes;
    bool any_vote = false;
    for (std::size_t c = 0; c < k_gt; ++c) {
      const std::string& f = fields[2 + c];
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc{} || p != f.data() + f.size() || v < 0)
        throw DataError("manifest: malformed vote '" + f + "' at " + where);
      votes.votes.push_back(v);
      any_vote = any_vote || v > 0;
    }
    if (any_vote) s.set_label(aggregate_annotations(votes));
    if (load_images) s.image = load_png(directory + "/" + s.path);
    samples.push_back(std::move(s));
  }
  if (samples.empty()) throw DataError("manifest: no rows in " + manifest_path);
  return samples;
}

DatasetSplit load_manifest(const std::string& directory,
                           const std::string& manifest_path,
                           const ManifestOptions& opts) {
  return partition_dataset(
      read_manifest_rows(directory, manifest_path, opts.load_images),
      opts.partition);
}

}  // namespace foc
