#ifndef TENSORCIT_IO_HPP
#define TENSORCIT_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "tensorcit/optimizer.hpp"
#include "tensorcit/synthesis.hpp"

namespace tct {

/// Text formats, version tensorcit/1. All files are UTF-8 text with
/// `key=value` headers followed by whitespace-separated data rows; doubles are
/// printed with 17 significant digits so a read-back is bit-identical.

std::string format_double(double v);

void write_tensor_field(const std::filesystem::path& path, const SymTensorField& field);
SymTensorField read_tensor_field(const std::filesystem::path& path);

void write_scalar_field(const std::filesystem::path& path, const ScalarField& field);
ScalarField read_scalar_field(const std::filesystem::path& path);

/// Measurement files hold one block per load; the manifest carries the case,
/// seed, noise level and per-load absolute noise norms.
void write_measurements(const std::filesystem::path& path, const MeasurementSet& set,
                        bool noisy, const FeSpace& space);
void write_manifest(const std::filesystem::path& path, const MeasurementSet& set,
                    const FeSpace& space, TensorLayout layout);

struct Dataset {
  MeasurementSet measurements;
  int mesh_n = 0;
  int state_degree = 0;
  TensorLayout layout = TensorLayout::dg1;
};

/// Read manifest + exact + noisy measurement files from a dataset directory.
Dataset read_dataset(const std::filesystem::path& dir);

void write_history(const std::filesystem::path& path, const ReconstructionResult& result);

void write_cross_section_csv(const std::filesystem::path& path, const SymTensorField& field,
                             int fixed_axis, double offset, int samples,
                             const TensorFunction& truth = nullptr);

/// Legacy ASCII VTK export (triangle cells, tensor components as cell data).
void write_vtk(const std::filesystem::path& path, const SymTensorField& field);

}  // namespace tct

#endif
