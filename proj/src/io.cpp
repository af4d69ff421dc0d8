#include "gsep/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace gsep {

namespace {

constexpr char kMagic[4] = {'G', 'S', 'E', 'P'};
constexpr uint32_t kVersion = 1;

// Payload is little-endian on disk; this code assumes a little-endian host
// (the supported platforms all are).
void put_u32(std::ofstream& out, uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}

uint32_t get_u32(std::ifstream& in) {
  uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 4);
  return v;
}

void write_header(std::ofstream& out, uint32_t flag, uint32_t n) {
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, flag);
  put_u32(out, n);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

}  // namespace

void write_field(const std::string& path, const GridImage& img) {
  std::ofstream out = open_out(path);
  write_header(out, 0, static_cast<uint32_t>(img.n));
  out.write(reinterpret_cast<const char*>(img.v.data()),
            static_cast<std::streamsize>(img.v.size() * sizeof(double)));
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_field(const std::string& path, const ComplexField& f) {
  std::ofstream out = open_out(path);
  write_header(out, 1, static_cast<uint32_t>(f.n));
  out.write(reinterpret_cast<const char*>(f.v.data()),
            static_cast<std::streamsize>(f.v.size() * sizeof(cplx)));
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_spectrum(const std::string& path, const Spectrum& s) {
  ComplexField f(s.n);
  f.v = s.v;
  write_field(path, f);
}

FieldData read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("not a GSEP field file: " + path);
  uint32_t version = get_u32(in);
  if (version != kVersion)
    throw std::runtime_error("unsupported field file version " + std::to_string(version));
  uint32_t flag = get_u32(in);
  uint32_t n = get_u32(in);
  if (flag > 1 || n == 0 || n > (1u << 16))
    throw std::runtime_error("corrupt field header: " + path);
  const size_t count = static_cast<size_t>(n) * n;
  if (flag == 0) {
    GridImage img(static_cast<int>(n));
    in.read(reinterpret_cast<char*>(img.v.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw std::runtime_error("truncated field file: " + path);
    return img;
  }
  ComplexField f(static_cast<int>(n));
  in.read(reinterpret_cast<char*>(f.v.data()),
          static_cast<std::streamsize>(count * sizeof(cplx)));
  if (!in) throw std::runtime_error("truncated field file: " + path);
  return f;
}

GridImage read_real_field(const std::string& path) {
  FieldData d = read_field(path);
  if (auto* img = std::get_if<GridImage>(&d)) return std::move(*img);
  throw std::runtime_error("expected a real field: " + path);
}

ComplexField read_complex_field(const std::string& path) {
  FieldData d = read_field(path);
  if (auto* f = std::get_if<ComplexField>(&d)) return std::move(*f);
  throw std::runtime_error("expected a complex field: " + path);
}

std::string format_csv_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

struct CsvWriter::Impl {
  std::ofstream out;
};

CsvWriter::CsvWriter(const std::string& path, const std::string& header) : impl_(new Impl) {
  impl_->out.open(path, std::ios::trunc);
  if (!impl_->out) {
    delete impl_;
    throw std::runtime_error("cannot open for writing: " + path);
  }
  impl_->out << header << '\n';
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::row(const std::vector<double>& values) {
  std::string line;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) line += ',';
    line += format_csv_number(values[i]);
  }
  impl_->out << line << '\n';
}

void CsvWriter::raw_row(const std::string& line) { impl_->out << line << '\n'; }

}  // namespace gsep
