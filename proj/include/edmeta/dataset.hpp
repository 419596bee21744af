#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace edmeta {

enum class DataKind { NormalEffects, BinomialArms };

// Study-level meta-analysis data: either effects with within-study SDs, or
// binomial event counts per arm (treatment/control).
struct MetaDataset {
  DataKind kind = DataKind::NormalEffects;
  std::vector<std::string> study;

  // NormalEffects
  std::vector<double> y;
  std::vector<double> sigma;

  // BinomialArms
  std::vector<long> events_treat, total_treat, events_control, total_control;

  std::size_t k() const { return study.size(); }

  static MetaDataset normal_effects(std::vector<double> y, std::vector<double> sigma,
                                    std::vector<std::string> labels = {});
  static MetaDataset binomial_arms(std::vector<long> ft, std::vector<long> nt,
                                   std::vector<long> fc, std::vector<long> nc,
                                   std::vector<std::string> labels = {});
};

// Throws DataError on a broken invariant.
void validate(const MetaDataset& d);

// The coaching-program data: y = (28, 8, -3, 7, -1, 1, 18, 12),
// sigma = (15, 10, 16, 11, 9, 11, 10, 18).
MetaDataset eight_schools();

// Resolves `builtin:eight-schools` or a CSV path.
MetaDataset load_dataset(const std::string& source);

// CSV with header `study,y,sigma` or `study,ft,nt,fc,nc`; the header picks
// the kind. Errors name the file and line.
MetaDataset read_dataset_csv(std::istream& in, const std::string& name);
MetaDataset read_dataset_csv(const std::filesystem::path& path);
void write_dataset_csv(std::ostream& out, const MetaDataset& d);

// Log odds ratio per study with a 0.5 continuity correction applied to all
// four cells of a study whenever one of them is zero.
MetaDataset log_odds_ratios(const MetaDataset& arms);

}  // namespace edmeta
