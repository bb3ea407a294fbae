#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "monospline/errors.hpp"

namespace monospline {

/// Malformed input file; carries row/column diagnostics in the message.
class CsvError : public ArgumentError {
public:
    explicit CsvError(const std::string& msg) : ArgumentError(msg) {}
};

struct XyData {
    std::vector<double> x;
    Eigen::VectorXd y;
};

/// Strict CSV with required header `x,y`; comma separator, '.' decimal,
/// finite values only. Rows are returned sorted by x (ties keep file order).
XyData read_xy_csv(const std::string& path);

/// Three-column variant for band files (header `x,lower,upper`).
struct BandData {
    std::vector<double> x;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
};
BandData read_band_csv(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace monospline
