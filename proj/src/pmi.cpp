#include "pmikit/pmi.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>

#include "pmikit/error.hpp"

namespace pmikit {

PmiView::PmiView(const ProbabilityModel& model, double shift, SupportPolicy policy,
                 double floor)
    : model_(&model), shift_(shift), policy_(policy), floor_(floor) {
  if (shift < 0.0) throw UsageError("shift must be nonnegative");
}

bool PmiView::defined(WordId w, WordId c) const { return model_->pair_count(w, c) > 0; }

std::optional<double> PmiView::value(WordId w, WordId c) const {
  const Count n = model_->pair_count(w, c);
  if (n == 0) return std::nullopt;
  return std::log(static_cast<double>(n) / model_->total()) - model_->log_p_word(w) -
         model_->log_p_center(c) - shift_;
}

double PmiView::value_or_throw(WordId w, WordId c) const {
  return model_->log_p_pair(w, c) - model_->log_p_word(w) - model_->log_p_center(c) - shift_;
}

Eigen::VectorXd PmiView::column(WordId w, std::span<const WordId> support) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(support.size()));
  for (std::size_t i = 0; i < support.size(); ++i) {
    const WordId c = support[i];
    const Count n = model_->pair_count(w, c);
    if (n > 0) {
      out[static_cast<Eigen::Index>(i)] = std::log(static_cast<double>(n) / model_->total()) -
                                          model_->log_p_word(w) - model_->log_p_center(c) -
                                          shift_;
    } else if (policy_ == SupportPolicy::strict) {
      throw PositivityError("pmi(" + model_->vocab().word(w) + ", " + model_->vocab().word(c) +
                            ") is undefined (no co-occurrence)");
    } else {
      out[static_cast<Eigen::Index>(i)] = floor_;
    }
  }
  return out;
}

PmiView PmiView::with_shift(double shift) const {
  return PmiView(*model_, shift, policy_, floor_);
}

PmiView PmiView::with_policy(SupportPolicy policy, double floor) const {
  return PmiView(*model_, shift_, policy, floor);
}

PmiMatrix pmi_matrix(const PmiView& view, std::size_t max_bytes) {
  const ProbabilityModel& model = view.model();
  const auto n = static_cast<std::size_t>(model.vocab().size());
  if (n * n > max_bytes / sizeof(double))
    throw CapacityError("a " + std::to_string(n) + "^2 PMI matrix exceeds the memory budget; "
                        "raise min_count or cap the vocabulary");

  PmiMatrix out;
  out.shift = view.shift();
  out.policy = view.policy();
  const auto ni = static_cast<Eigen::Index>(n);

  if (view.policy() == SupportPolicy::strict) {
    const Count defined = model.counts().pair_total();
    if (defined < static_cast<Count>(n * n))
      throw PositivityError("PMI matrix has undefined entries under the strict policy");
    out.values.resize(ni, ni);
  } else {
    out.values = Eigen::MatrixXd::Constant(ni, ni, view.floor());
  }

  // Column c of the matrix is exactly the center row c of the counts, so the
  // fill walks each compressed row once. The arithmetic matches value()
  // term for term; tests hold the two paths bitwise equal.
  const double total = model.total();
  std::size_t defined_entries = 0;
  for (WordId c = 0; c < model.vocab().size(); ++c) {
    auto words = model.counts().center_row_words(c);
    auto counts = model.counts().center_row_counts(c);
    const double lc = model.log_p_center(c);
    for (std::size_t i = 0; i < words.size(); ++i) {
      const WordId w = words[i];
      out.values(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(c)) =
          std::log(static_cast<double>(counts[i]) / total) - model.log_p_word(w) - lc -
          view.shift();
    }
    defined_entries += words.size();
  }
  out.coverage = n == 0 ? 0.0 : static_cast<double>(defined_entries) / (static_cast<double>(n) * static_cast<double>(n));
  return out;
}

namespace {

constexpr char kMatrixMagic[8] = {'P', 'M', 'I', 'K', 'I', 'T', 'M', 'X'};
constexpr std::uint32_t kMatrixVersion = 1;

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T take(std::istream& in, const std::filesystem::path& p) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw FormatError("truncated matrix file " + p.string());
  return v;
}

}  // namespace

void export_pmi_matrix(const std::filesystem::path& path, const PmiMatrix& matrix) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f.write(kMatrixMagic, sizeof kMatrixMagic);
  put(f, kMatrixVersion);
  put(f, static_cast<std::uint64_t>(matrix.values.rows()));
  put(f, matrix.shift);
  put(f, static_cast<std::uint8_t>(matrix.policy));
  for (Eigen::Index r = 0; r < matrix.values.rows(); ++r)
    for (Eigen::Index c = 0; c < matrix.values.cols(); ++c) put(f, matrix.values(r, c));
  if (!f) throw IoError("short write to " + path.string());
}

PmiMatrix import_pmi_matrix(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read " + path.string());
  char magic[8];
  f.read(magic, sizeof magic);
  if (!f || !std::equal(magic, magic + 8, kMatrixMagic))
    throw FormatError(path.string() + " is not a PMI matrix file");
  const auto version = take<std::uint32_t>(f, path);
  if (version != kMatrixVersion)
    throw FormatError("matrix format version " + std::to_string(version) + " is not supported");
  const auto n = take<std::uint64_t>(f, path);
  PmiMatrix out;
  out.shift = take<double>(f, path);
  out.policy = static_cast<SupportPolicy>(take<std::uint8_t>(f, path));
  out.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index r = 0; r < out.values.rows(); ++r)
    for (Eigen::Index c = 0; c < out.values.cols(); ++c)
      out.values(r, c) = take<double>(f, path);
  return out;
}

void export_pmi_matrix_csv(const std::filesystem::path& path, const PmiMatrix& matrix) {
  if (matrix.values.rows() > 512)
    throw CapacityError("CSV export is capped at n = 512; use the binary format");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f.precision(17);
  for (Eigen::Index r = 0; r < matrix.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.values.cols(); ++c) {
      if (c) f << ',';
      f << matrix.values(r, c);
    }
    f << '\n';
  }
  if (!f) throw IoError("short write to " + path.string());
}

}  // namespace pmikit
