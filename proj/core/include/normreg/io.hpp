#pragma once

#include <string>

#include "normreg/matrix.hpp"
#include "normreg/pipeline.hpp"

namespace normreg {

/// Binary matrix container: a magic line, a key-value header naming the
/// shape and element encoding, then the row-major little-endian payload.
void write_mxf(const std::string& path, const DenseMatrix& a);
DenseMatrix read_mxf(const std::string& path);

/// Plain comma-separated text, one matrix row per line, full 17 significant
/// digits. Capped at 200 x 200 in both directions.
void write_csv(const std::string& path, const DenseMatrix& a);
DenseMatrix read_csv(const std::string& path);

/// Dispatch on the file extension: ".csv" is text, everything else MXF.
void save_matrix(const std::string& path, const DenseMatrix& a);
DenseMatrix load_matrix(const std::string& path);

/// Masks serialize as their universe bounds plus two sorted index lists.
std::string format_mask(const SubmatrixMask& mask);
SubmatrixMask parse_mask(const std::string& text);
void write_mask(const std::string& path, const SubmatrixMask& mask);
SubmatrixMask read_mask(const std::string& path);

/// Key-value report document with a stable field order. Timing lines are
/// opt-in so that repeated runs can be compared byte for byte.
std::string format_report(const RegularizationReport& report,
                          bool include_timing = false);
void write_report(const std::string& path, const RegularizationReport& report,
                  bool include_timing = false);

std::string format_verification(const VerificationRecord& record);

/// Read/write a whole file as bytes; IoError on failure.
std::string slurp_file(const std::string& path);
void spit_file(const std::string& path, const std::string& content);

} // namespace normreg
