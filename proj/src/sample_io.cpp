#include "stiefel_kn/sample_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>

#include "stiefel_kn/errors.hpp"

namespace stiefel_kn::io {
namespace {

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

std::vector<Token> split(std::string_view line) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' ||
                               line[i] == '\r')) {
      ++i;
    }
    const std::size_t begin = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' &&
           line[i] != '\r') {
      ++i;
    }
    if (i > begin) tokens.push_back({line.substr(begin, i - begin), begin + 1});
  }
  return tokens;
}

template <typename T>
T parse_number(const Token& tok, std::size_t line, const char* what) {
  T value{};
  const char* first = tok.text.data();
  const char* last = first + tok.text.size();
  if (!tok.text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw FormatError("cannot parse " + std::string(what) + " from '" +
                      std::string(tok.text) + "'",
                      line, tok.column);
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) {
      throw FormatError("non-finite " + std::string(what), line, tok.column);
    }
  }
  return value;
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next line; false at end of input.
  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++number_;
    return true;
  }
  // Next line that is not blank.
  bool next_nonblank(std::string& line) {
    while (next(line)) {
      if (!split(line).empty()) return true;
    }
    return false;
  }
  std::size_t number() const { return number_; }

 private:
  std::istream& in_;
  std::size_t number_ = 0;
};

Matrix read_block(LineReader& reader, Eigen::Index p, Eigen::Index n,
                  const std::string& label) {
  Matrix block(p, n);
  std::string line;
  for (Eigen::Index i = 0; i < p; ++i) {
    const bool ok = i == 0 ? reader.next_nonblank(line) : reader.next(line);
    if (!ok) {
      throw FormatError("unexpected end of file in " + label + " (row " +
                            std::to_string(i + 1) + " of " + std::to_string(p) +
                            ")",
                        reader.number() + 1, 1);
    }
    const auto tokens = split(line);
    if (static_cast<Eigen::Index>(tokens.size()) != n) {
      const std::size_t column =
          static_cast<Eigen::Index>(tokens.size()) > n
              ? tokens[static_cast<std::size_t>(n)].column
              : line.size() + 1;
      throw FormatError("expected " + std::to_string(n) + " values in " +
                            label + ", found " + std::to_string(tokens.size()),
                        reader.number(), column);
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      block(i, j) = parse_number<double>(tokens[static_cast<std::size_t>(j)],
                                         reader.number(), "matrix entry");
    }
  }
  return block;
}

void write_block(std::ostream& out, const Matrix& m) {
  char buffer[64];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer,
                                           m(i, j), std::chars_format::general,
                                           17);
      if (j > 0) out << ' ';
      out << std::string_view(buffer, static_cast<std::size_t>(ptr - buffer));
    }
    out << '\n';
  }
}

}  // namespace

RawSampleFile parse_sample_file(std::istream& in) {
  LineReader reader(in);
  std::string line;
  if (!reader.next_nonblank(line)) {
    throw FormatError("empty file, expected header 'p n N sigma seed [C]'",
                      1, 1);
  }
  const auto header = split(line);
  if (header.size() != 5 && header.size() != 6) {
    throw FormatError("header must be 'p n N sigma seed [C]'", reader.number(),
                      header.empty() ? 1 : header.front().column);
  }
  const std::size_t header_line = reader.number();
  RawSampleFile raw;
  raw.p = parse_number<Eigen::Index>(header[0], header_line, "p");
  raw.n = parse_number<Eigen::Index>(header[1], header_line, "n");
  const auto count = parse_number<std::size_t>(header[2], header_line, "N");
  raw.sigma = parse_number<double>(header[3], header_line, "sigma");
  raw.seed = parse_number<std::uint64_t>(header[4], header_line, "seed");
  if (raw.n < 1 || raw.p < raw.n) {
    throw FormatError("need 1 <= n <= p", header_line, header[0].column);
  }
  if (count < 1) {
    throw FormatError("N must be at least 1", header_line, header[2].column);
  }
  if (header.size() == 6) {
    if (header[5].text != "C") {
      throw FormatError("trailing header flag must be 'C'", header_line,
                        header[5].column);
    }
    raw.center = read_block(reader, raw.p, raw.n, "center block");
  }
  raw.samples.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    raw.samples.push_back(read_block(reader, raw.p, raw.n,
                                     "sample block " + std::to_string(k + 1)));
  }
  if (reader.next_nonblank(line)) {
    throw FormatError("unexpected content after the last block",
                      reader.number(), split(line).front().column);
  }
  return raw;
}

RawSampleFile read_raw_sample_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  return parse_sample_file(in);
}

SampleSet to_sample_set(const RawSampleFile& raw) {
  const Dims dims(raw.p, raw.n);
  SampleSet set{dims, std::nullopt, raw.sigma, raw.seed, {}};
  if (raw.center) set.center = StiefelPoint::validate(*raw.center, dims);
  set.samples.reserve(raw.samples.size());
  for (std::size_t k = 0; k < raw.samples.size(); ++k) {
    try {
      set.samples.push_back(StiefelPoint::validate(raw.samples[k], dims));
    } catch (const NotOnManifoldError& e) {
      throw NotOnManifoldError(
          "sample " + std::to_string(k + 1) + ": " + e.what(), e.defect());
    }
  }
  return set;
}

SampleSet read_sample_file(const std::filesystem::path& path) {
  return to_sample_set(read_raw_sample_file(path));
}

void write_sample_file(std::ostream& out, const SampleSet& set) {
  out << set.dims.p() << ' ' << set.dims.n() << ' ' << set.samples.size() << ' ';
  char buffer[64];
  const auto [ptr, ec] =
      std::to_chars(buffer, buffer + sizeof buffer, set.sigma,
                    std::chars_format::general, 17);
  out << std::string_view(buffer, static_cast<std::size_t>(ptr - buffer)) << ' '
      << set.seed;
  if (set.center) out << " C";
  out << '\n';
  bool first = true;
  auto emit = [&](const Matrix& m) {
    if (!first) out << '\n';
    first = false;
    write_block(out, m);
  };
  if (set.center) emit(set.center->matrix());
  for (const auto& s : set.samples) emit(s.matrix());
}

void write_sample_file(const std::filesystem::path& path, const SampleSet& set) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  write_sample_file(out, set);
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

void write_point_file(const std::filesystem::path& path,
                      const StiefelPoint& point, double sigma,
                      std::uint64_t seed) {
  SampleSet set{point.dims(), std::nullopt, sigma, seed, {point}};
  write_sample_file(path, set);
}

std::vector<double> read_weights_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  LineReader reader(in);
  std::vector<double> weights;
  std::string line;
  while (reader.next(line)) {
    const auto tokens = split(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 1) {
      throw FormatError("expected one weight per line", reader.number(),
                        tokens[1].column);
    }
    const double w = parse_number<double>(tokens[0], reader.number(), "weight");
    if (!(w > 0.0)) {
      throw FormatError("weights must be positive", reader.number(),
                        tokens[0].column);
    }
    weights.push_back(w);
  }
  return weights;
}

}  // namespace stiefel_kn::io
