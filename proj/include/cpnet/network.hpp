#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cpnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Core/periphery block pattern of an adjacency (or weight) matrix.
/// Entries are nonnegative; a purely boolean pattern is normalized uniformly per row.
struct BlockPattern {
    Matrix cc;  // |C| x |C|
    Matrix cp;  // |C| x |P|
    Matrix pc;  // |P| x |C|
    Matrix pp;  // |P| x |P|

    /// Craig/von Peter tiered pattern: CC ones off the diagonal, PP zero.
    static BlockPattern tiered(Matrix cp, Matrix pc);
};

struct ValidationReport {
    bool valid = true;
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
};

/// Weighted directed interbank network. Agents 0..n_core-1 are core banks,
/// n_core..N-1 are periphery banks. Row i holds the credit shares w_ij of
/// creditor i; every row sums to one and the diagonal is zero.
///
/// Immutable once constructed.
class WeightedNetwork {
public:
    /// Validates and adopts `weights`. Throws cpnet::Error on invariant violations.
    WeightedNetwork(std::size_t n_core, std::size_t n_periphery, Matrix weights,
                    std::optional<double> epsilon = std::nullopt);

    std::size_t n_core() const noexcept { return n_core_; }
    std::size_t n_periphery() const noexcept { return n_periphery_; }
    std::size_t size() const noexcept { return n_core_ + n_periphery_; }
    bool is_core(std::size_t agent) const noexcept { return agent < n_core_; }
    const Matrix& weights() const noexcept { return weights_; }
    std::optional<double> epsilon() const noexcept { return epsilon_; }

private:
    std::size_t n_core_;
    std::size_t n_periphery_;
    Matrix weights_;
    std::optional<double> epsilon_;
};

/// Checks the weight-matrix invariants without throwing. Column regularity of the
/// PC block and row regularity of CP are reported as warnings only.
ValidationReport validate_weights(std::size_t n_core, std::size_t n_periphery, const Matrix& weights);

/// Perfectly tiered market: core rows put (1-eps)/(|C|-1) on each other core bank and
/// eps/|P| on each periphery bank; periphery rows put 1/|C| on each core bank.
WeightedNetwork build_core_periphery(std::size_t n_core, std::size_t n_periphery, double epsilon);

/// Assembles the block matrix and normalizes each row to sum one.
WeightedNetwork build_from_blocks(const BlockPattern& pattern);

/// Theta (A^w - I) with Theta = diag(theta_core on core rows, theta_periphery on periphery rows).
Matrix drift_matrix(const WeightedNetwork& net, double theta_core, double theta_periphery);

/// Per-agent diagonal from tier values (core first).
Vector tier_vector(const WeightedNetwork& net, double core_value, double periphery_value);

// Plain-text CSV form:
//   n_core,n_periphery,epsilon
//   <n_core>,<n_periphery>,<epsilon or empty>
//   N rows of N comma-separated weights
void write_network_csv(std::ostream& out, const WeightedNetwork& net);
void save_network_csv(const std::string& path, const WeightedNetwork& net);
WeightedNetwork read_network_csv(std::istream& in);

/// Parsed CSV contents before invariant checks (for reporting every violation).
struct RawNetwork {
    std::size_t n_core = 0;
    std::size_t n_periphery = 0;
    std::optional<double> epsilon;
    Matrix weights;
};
RawNetwork read_raw_network_csv(std::istream& in);
RawNetwork load_raw_network_csv(const std::string& path);
WeightedNetwork load_network_csv(const std::string& path);

}  // namespace cpnet
