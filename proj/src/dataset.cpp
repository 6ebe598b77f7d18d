#include "dataset.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "error.hpp"
#include "numfmt.hpp"

namespace chambersim {

namespace fs = std::filesystem;

std::string ppm_bytes(const Raster& r) {
  std::string out = "P6\n" + std::to_string(r.width) + " " + std::to_string(r.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(r.rgb.data()), r.rgb.size());
  return out;
}

void write_ppm(const fs::path& path, const Raster& r) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  const std::string bytes = ppm_bytes(r);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

Raster read_ppm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("image not found: " + path.string());
  std::string magic;
  int maxval = 0;
  Raster r;
  in >> magic >> r.width >> r.height >> maxval;
  if (magic != "P6" || maxval != 255 || r.width <= 0 || r.height <= 0)
    throw IoError("not a P6/255 image: " + path.string());
  in.get();
  r.rgb.resize(static_cast<std::size_t>(r.width) * r.height * 3);
  in.read(reinterpret_cast<char*>(r.rgb.data()), static_cast<std::streamsize>(r.rgb.size()));
  if (!in) throw IoError("truncated image: " + path.string());
  return r;
}

ExperimentWriter::ExperimentWriter(fs::path dir, std::string name, Config config)
    : dir_(std::move(dir)), name_(std::move(name)), config_(config),
      columns_(dataset_columns(config)) {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i] == "im") im_column_ = static_cast<int>(i);
  if (name_.empty() || name_.find('/') != std::string::npos)
    throw Error(ErrorCode::invalid_argument, "invalid experiment name '" + name_ + "'");
}

ExperimentWriter::~ExperimentWriter() {
  if (file_) std::fclose(file_);
}

void ExperimentWriter::flush() {
  if (buffer_.empty()) return;
  if (std::fwrite(buffer_.data(), 1, buffer_.size(), file_) != buffer_.size())
    throw IoError("write failed for " + manifest_.csv_path.string());
  buffer_.clear();
}

void ExperimentWriter::write(const MeasurementRow& row) {
  if (finished_) throw Error(ErrorCode::invalid_argument, "experiment already finished");
  if (row.values.size() != columns_.size())
    throw Error(ErrorCode::invalid_argument,
                "schema mismatch at row " + std::to_string(manifest_.rows) + ": expected " +
                    std::to_string(columns_.size()) + " values, got " +
                    std::to_string(row.values.size()));
  if (!file_) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    manifest_.csv_path = dir_ / (name_ + ".csv");
    file_ = std::fopen(manifest_.csv_path.string().c_str(), "wb");
    if (!file_) throw IoError("cannot create " + manifest_.csv_path.string());
    buffer_ = "timestamp,intervention";
    for (const auto& c : columns_) buffer_ += "," + c;
    buffer_ += '\n';
    if (im_column_ >= 0) {
      manifest_.image_dir = dir_ / ("images_" + name_);
      fs::create_directories(manifest_.image_dir, ec);
      if (ec) throw IoError("cannot create " + manifest_.image_dir.string());
    }
  }
  append_number(buffer_, row.timestamp);
  buffer_ += row.intervention ? ",1" : ",0";
  for (std::size_t i = 0; i < row.values.size(); ++i) {
    buffer_ += ',';
    if (static_cast<int>(i) == im_column_) {
      if (!row.image)
        throw Error(ErrorCode::invalid_argument, "camera row without an image");
      const std::string rel = "images_" + name_ + "/" + std::to_string(manifest_.rows) + ".ppm";
      write_ppm(dir_ / rel, *row.image);
      ++manifest_.images;
      buffer_ += rel;
    } else {
      append_number(buffer_, row.values[i]);
    }
  }
  buffer_ += '\n';
  ++manifest_.rows;
  if (buffer_.size() > (1u << 20)) flush();
}

Manifest ExperimentWriter::finish() {
  if (manifest_.rows == 0) throw Error(ErrorCode::invalid_argument, "empty experiment");
  if (!finished_) {
    flush();
    const bool bad = std::fclose(file_) != 0;
    file_ = nullptr;
    finished_ = true;
    if (bad) throw IoError("close failed for " + manifest_.csv_path.string());
  }
  return manifest_;
}

Manifest write_experiment(const std::vector<MeasurementRow>& rows, const fs::path& dir,
                          const std::string& name, Config config) {
  if (rows.empty()) throw Error(ErrorCode::invalid_argument, "empty experiment");
  ExperimentWriter w(dir, name, config);
  for (const auto& r : rows) w.write(r);
  return w.finish();
}

std::string_view to_string(CellType t) {
  switch (t) {
    case CellType::real:
      return "real";
    case CellType::integer:
      return "integer";
    case CellType::categorical:
      return "categorical";
    case CellType::path:
      return "path";
    case CellType::opaque:
      return "opaque";
  }
  return "opaque";
}

CellType column_cell_type(std::string_view name) {
  if (name == "timestamp") return CellType::real;
  if (name == "intervention") return CellType::integer;
  for (const auto& p : pid_columns())
    if (p == name) return CellType::real;
  for (Chamber ch : {Chamber::wind_tunnel, Chamber::light_tunnel}) {
    for (const auto& v : chamber_variables(ch)) {
      if (v.id != name) continue;
      if (v.column_type == ColumnType::path) return CellType::path;
      if (v.range.shape == Range::Shape::finite_set) return CellType::categorical;
      if (v.column_type == ColumnType::integer) return CellType::integer;
      return CellType::real;
    }
  }
  return CellType::opaque;
}

const Column* Table::find(std::string_view name) const {
  for (const auto& c : columns)
    if (c.name == name) return &c;
  return nullptr;
}

const Column& Table::at(std::string_view name) const {
  const Column* c = find(name);
  if (!c) throw NotFoundError("no column '" + std::string(name) + "'");
  return *c;
}

Table parse_experiment_csv(std::string_view text) {
  Table t;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  bool header = false;
  std::vector<std::string_view> cells;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    cells.clear();
    std::size_t start = 0;
    while (true) {
      auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!header) {
      for (auto c : cells) {
        Column col;
        col.name = std::string(trim(c));
        col.type = column_cell_type(col.name);
        for (const auto& prev : t.columns)
          if (prev.name == col.name) throw ParseError(lineno, "duplicate column '" + col.name + "'");
        t.columns.push_back(std::move(col));
      }
      header = true;
      continue;
    }
    if (cells.size() != t.columns.size())
      throw ParseError(lineno, "expected " + std::to_string(t.columns.size()) + " fields, got " +
                                   std::to_string(cells.size()));
    for (std::size_t i = 0; i < cells.size(); ++i) {
      Column& col = t.columns[i];
      if (col.type == CellType::path || col.type == CellType::opaque) {
        col.text.emplace_back(cells[i]);
        continue;
      }
      auto v = parse_number(cells[i]);
      if (!v)
        throw ParseError(lineno, "malformed number '" + std::string(cells[i]) + "' in column " +
                                     col.name);
      if (col.type == CellType::integer && *v != std::floor(*v))
        throw ParseError(lineno, "non-integer value in integer column " + col.name);
      col.numbers.push_back(*v);
    }
    ++t.rows;
  }
  if (!header) throw ParseError(1, "missing header");
  return t;
}

Table read_experiment(const fs::path& dir, const std::string& name) {
  const fs::path path = dir / (name + ".csv");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("experiment file not found: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment_csv(ss.str());
}

}  // namespace chambersim
