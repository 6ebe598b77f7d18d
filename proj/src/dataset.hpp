#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "engine.hpp"
#include "models.hpp"
#include "variables.hpp"

namespace chambersim {

struct Manifest {
  std::filesystem::path csv_path;
  std::filesystem::path image_dir;  // empty unless images were written
  std::size_t rows = 0;
  std::size_t images = 0;
};

/// P6 with maxval 255.
std::string ppm_bytes(const Raster& r);
void write_ppm(const std::filesystem::path& path, const Raster& r);
Raster read_ppm(const std::filesystem::path& path);

/// Streams rows into `<dir>/<name>.csv`; lt_camera rows also write
/// `<dir>/images_<name>/<row>.ppm` and put the relative path in `im`.
class ExperimentWriter {
 public:
  ExperimentWriter(std::filesystem::path dir, std::string name, Config config);
  ~ExperimentWriter();
  ExperimentWriter(const ExperimentWriter&) = delete;
  ExperimentWriter& operator=(const ExperimentWriter&) = delete;

  void write(const MeasurementRow& row);
  /// Flushes and closes. Throws "empty experiment" when no row was written.
  Manifest finish();

 private:
  void flush();

  std::filesystem::path dir_;
  std::string name_;
  Config config_;
  std::vector<std::string> columns_;
  int im_column_ = -1;
  std::FILE* file_ = nullptr;
  std::string buffer_;
  Manifest manifest_;
  bool finished_ = false;
};

Manifest write_experiment(const std::vector<MeasurementRow>& rows,
                          const std::filesystem::path& dir, const std::string& name,
                          Config config);

enum class CellType { real, integer, categorical, path, opaque };

std::string_view to_string(CellType t);
/// Type of a dataset column by name; unknown names are opaque.
CellType column_cell_type(std::string_view name);

struct Column {
  std::string name;
  CellType type = CellType::opaque;
  std::vector<double> numbers;    // real, integer, categorical
  std::vector<std::string> text;  // path, opaque
};

struct Table {
  std::vector<Column> columns;
  std::size_t rows = 0;

  const Column* find(std::string_view name) const;
  const Column& at(std::string_view name) const;
};

Table read_experiment(const std::filesystem::path& dir, const std::string& name);
Table parse_experiment_csv(std::string_view text);

}  // namespace chambersim
