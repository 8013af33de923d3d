#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "liplab/errors.hpp"
#include "liplab/length_metric.hpp"
#include "liplab/lipschitz.hpp"
#include "liplab/sard.hpp"

namespace liplab::io {

class IoError : public Error {
 public:
  using Error::Error;
};

/// Input that parses but does not follow the file format.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Field file ids do not cover the space's points exactly once.
class IdMismatch : public Error {
 public:
  using Error::Error;
};

/// Shortest decimal form is not used; every double is printed with 17 significant digits so
/// files round-trip bit-exactly and are byte-stable across platforms.
std::string format_double(double x);

// Space file (JSON).
MetricSpace<double> read_space(std::istream& in);
MetricSpace<double> read_space_file(const std::filesystem::path& path);
void write_space(std::ostream& out, const MetricSpace<double>& space);

// Field file (CSV, header "point_id,value").
ScalarField<double> read_field(std::istream& in, Index n);
ScalarField<double> read_field_file(const std::filesystem::path& path, Index n);
void write_field(std::ostream& out, const ScalarField<double>& field);

/// Header row of point ids, then one row per point; unreachable entries print as "inf".
void write_matrix_csv(std::ostream& out, const MatrixX<double>& matrix);

void write_lip_profile(std::ostream& out, const LipProfile<double>& profile);
void write_space_report(std::ostream& out, const SpaceReport<double>& report);
void write_perturb_report(std::ostream& out, const PerturbParams<double>& params, const PerturbResult<double>& result);
void write_verify_report(std::ostream& out, const PerturbParams<double>& params, double epsilon,
                         const VerifyReport<double>& report);

/// Reads the "epsilon" entry of a perturb report.
double read_report_epsilon(const std::filesystem::path& path);

/// Writes via a temporary file in the same directory, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace liplab::io
