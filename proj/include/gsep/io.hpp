// Binary field files and CSV emission.
//
// Field file layout (magic "GSEP", version 1): 4-byte magic, then three
// little-endian u32 (version, flag 0=real / 1=complex, N), then row-major
// little-endian float64 payload: N^2 values for real, 2*N^2 interleaved
// re/im pairs for complex.
#pragma once

#include <string>
#include <variant>
#include <vector>

#include "gsep/grid.hpp"

namespace gsep {

void write_field(const std::string& path, const GridImage& img);
void write_field(const std::string& path, const ComplexField& f);
void write_spectrum(const std::string& path, const Spectrum& s);

using FieldData = std::variant<GridImage, ComplexField>;
FieldData read_field(const std::string& path);
GridImage read_real_field(const std::string& path);
ComplexField read_complex_field(const std::string& path);

// CSV with a fixed header and %.12g numeric formatting; byte-identical output
// for identical rows.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& header);
  ~CsvWriter();
  void row(const std::vector<double>& values);
  void raw_row(const std::string& line);

 private:
  struct Impl;
  Impl* impl_;
};

std::string format_csv_number(double x);

}  // namespace gsep
