#include "edmeta/dataset.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "edmeta/csv.hpp"
#include "edmeta/error.hpp"

namespace edmeta {
namespace {

std::vector<std::string> default_labels(std::size_t k) {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < k; ++j) out.push_back(std::to_string(j + 1));
  return out;
}

}  // namespace

MetaDataset MetaDataset::normal_effects(std::vector<double> y, std::vector<double> sigma,
                                        std::vector<std::string> labels) {
  MetaDataset d;
  d.kind = DataKind::NormalEffects;
  d.study = labels.empty() ? default_labels(y.size()) : std::move(labels);
  d.y = std::move(y);
  d.sigma = std::move(sigma);
  validate(d);
  return d;
}

MetaDataset MetaDataset::binomial_arms(std::vector<long> ft, std::vector<long> nt,
                                       std::vector<long> fc, std::vector<long> nc,
                                       std::vector<std::string> labels) {
  MetaDataset d;
  d.kind = DataKind::BinomialArms;
  d.study = labels.empty() ? default_labels(ft.size()) : std::move(labels);
  d.events_treat = std::move(ft);
  d.total_treat = std::move(nt);
  d.events_control = std::move(fc);
  d.total_control = std::move(nc);
  validate(d);
  return d;
}

void validate(const MetaDataset& d) {
  std::size_t k = d.study.size();
  if (k == 0) throw DataError("dataset has no studies");
  if (d.kind == DataKind::NormalEffects) {
    if (d.y.size() != k || d.sigma.size() != k)
      throw DataError("y and sigma must both have one entry per study");
    for (std::size_t j = 0; j < k; ++j) {
      if (!std::isfinite(d.y[j])) throw DataError("study " + d.study[j] + ": non-finite y");
      if (!(d.sigma[j] > 0.0) || !std::isfinite(d.sigma[j]))
        throw DataError("study " + d.study[j] + ": sigma must be positive");
    }
  } else {
    if (d.events_treat.size() != k || d.total_treat.size() != k ||
        d.events_control.size() != k || d.total_control.size() != k)
      throw DataError("arm counts must have one entry per study");
    for (std::size_t j = 0; j < k; ++j) {
      auto check = [&](long f, long n) {
        if (n < 1 || f < 0 || f > n)
          throw DataError("study " + d.study[j] + ": need 0 <= events <= total and total >= 1");
      };
      check(d.events_treat[j], d.total_treat[j]);
      check(d.events_control[j], d.total_control[j]);
    }
  }
}

MetaDataset eight_schools() {
  return MetaDataset::normal_effects({28, 8, -3, 7, -1, 1, 18, 12}, {15, 10, 16, 11, 9, 11, 10, 18},
                                     {"A", "B", "C", "D", "E", "F", "G", "H"});
}

MetaDataset load_dataset(const std::string& source) {
  if (source == "builtin:eight-schools") return eight_schools();
  if (source.rfind("builtin:", 0) == 0) throw IoError("unknown builtin dataset '" + source + "'");
  return read_dataset_csv(std::filesystem::path(source));
}

MetaDataset read_dataset_csv(std::istream& in, const std::string& name) {
  auto where = [&](std::size_t line) { return name + ":" + std::to_string(line) + ": "; };
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    header = csv::split_line(line);
    break;
  }
  if (header.empty()) throw IoError(name + ": empty file, expected a header line");
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);

  bool normal = header == std::vector<std::string>{"study", "y", "sigma"};
  bool arms = header == std::vector<std::string>{"study", "ft", "nt", "fc", "nc"};
  if (!normal && !arms)
    throw IoError(where(lineno) + "header must be 'study,y,sigma' or 'study,ft,nt,fc,nc'");

  MetaDataset d;
  d.kind = normal ? DataKind::NormalEffects : DataKind::BinomialArms;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto f = csv::split_line(line);
    if (f.size() != header.size())
      throw IoError(where(lineno) + "expected " + std::to_string(header.size()) + " fields, got " +
                    std::to_string(f.size()));
    d.study.push_back(f[0]);
    if (normal) {
      double y = 0, s = 0;
      if (!csv::parse(f[1], y) || !csv::parse(f[2], s))
        throw IoError(where(lineno) + "invalid number");
      d.y.push_back(y);
      d.sigma.push_back(s);
    } else {
      long v[4];
      for (int i = 0; i < 4; ++i)
        if (!csv::parse(f[i + 1], v[i])) throw IoError(where(lineno) + "invalid integer count");
      d.events_treat.push_back(v[0]);
      d.total_treat.push_back(v[1]);
      d.events_control.push_back(v[2]);
      d.total_control.push_back(v[3]);
    }
  }
  try {
    validate(d);
  } catch (const DataError& e) {
    throw IoError(name + ": " + e.what());
  }
  return d;
}

MetaDataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open file");
  return read_dataset_csv(in, path.string());
}

void write_dataset_csv(std::ostream& out, const MetaDataset& d) {
  if (d.kind == DataKind::NormalEffects) {
    out << "study,y,sigma\n";
    for (std::size_t j = 0; j < d.k(); ++j)
      out << d.study[j] << ',' << csv::format(d.y[j]) << ',' << csv::format(d.sigma[j]) << '\n';
  } else {
    out << "study,ft,nt,fc,nc\n";
    for (std::size_t j = 0; j < d.k(); ++j)
      out << d.study[j] << ',' << d.events_treat[j] << ',' << d.total_treat[j] << ','
          << d.events_control[j] << ',' << d.total_control[j] << '\n';
  }
}

MetaDataset log_odds_ratios(const MetaDataset& arms) {
  if (arms.kind != DataKind::BinomialArms) throw DataError("log_odds_ratios needs arm counts");
  std::vector<double> y, s;
  for (std::size_t j = 0; j < arms.k(); ++j) {
    double a = arms.events_treat[j], b = arms.total_treat[j] - arms.events_treat[j];
    double c = arms.events_control[j], e = arms.total_control[j] - arms.events_control[j];
    if (a == 0 || b == 0 || c == 0 || e == 0) {
      a += 0.5;
      b += 0.5;
      c += 0.5;
      e += 0.5;
    }
    y.push_back(std::log(a * e) - std::log(b * c));
    s.push_back(std::sqrt(1 / a + 1 / b + 1 / c + 1 / e));
  }
  return MetaDataset::normal_effects(std::move(y), std::move(s), arms.study);
}

}  // namespace edmeta
