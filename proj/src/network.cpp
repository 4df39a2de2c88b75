#include "cpnet/network.hpp"

#include "cpnet/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cpnet {

namespace {

constexpr double kRowSumTolerance = 1e-12;

std::string agent_label(std::size_t i, std::size_t n_core) {
    return (i < n_core ? "core agent " : "periphery agent ") + std::to_string(i);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        fail(ErrorKind::Io, "network csv line " + std::to_string(line_no) + ": not a number: '" + s + "'");
    }
}

std::size_t parse_count(const std::string& s, std::size_t line_no) {
    double v = parse_double(s, line_no);
    if (v < 0 || v != std::floor(v))
        fail(ErrorKind::Io, "network csv line " + std::to_string(line_no) + ": not a count: '" + s + "'");
    return static_cast<std::size_t>(v);
}

}  // namespace

BlockPattern BlockPattern::tiered(Matrix cp, Matrix pc) {
    const auto nc = cp.rows();
    const auto np = cp.cols();
    BlockPattern p;
    p.cc = Matrix::Ones(nc, nc) - Matrix::Identity(nc, nc);
    p.cp = std::move(cp);
    p.pc = std::move(pc);
    p.pp = Matrix::Zero(np, np);
    return p;
}

ValidationReport validate_weights(std::size_t n_core, std::size_t n_periphery, const Matrix& w) {
    ValidationReport rep;
    auto error = [&](std::string msg) {
        rep.valid = false;
        rep.errors.push_back(std::move(msg));
    };
    const std::size_t n = n_core + n_periphery;
    if (n == 0) {
        error("network has no agents");
        return rep;
    }
    if (static_cast<std::size_t>(w.rows()) != n || static_cast<std::size_t>(w.cols()) != n) {
        error("weight matrix is " + std::to_string(w.rows()) + "x" + std::to_string(w.cols()) +
              ", expected " + std::to_string(n) + "x" + std::to_string(n));
        return rep;
    }
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        bool has_edge = false;
        for (std::size_t j = 0; j < n; ++j) {
            const double v = w(i, j);
            if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
                error("weight (" + std::to_string(i) + "," + std::to_string(j) + ") outside [0,1]");
                continue;
            }
            if (i == j && v != 0.0) error(agent_label(i, n_core) + " lends to herself (nonzero diagonal)");
            if (v > 0.0) has_edge = true;
            sum += v;
        }
        if (!has_edge) {
            error(agent_label(i, n_core) + " has no debtors (all-zero row)");
        } else if (std::abs(sum - 1.0) > kRowSumTolerance) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", sum);
            error(agent_label(i, n_core) + " row sums to " + buf + ", expected 1");
        }
    }
    if (!rep.valid) return rep;

    // Tiered-pattern regularity: advisory only.
    if (n_periphery > 0) {
        for (std::size_t i = 0; i < n_core; ++i) {
            if (w.block(i, n_core, 1, n_periphery).maxCoeff() <= 0.0)
                rep.warnings.push_back("CP block not row regular: core agent " + std::to_string(i) +
                                       " lends to no periphery bank");
        }
        for (std::size_t j = 0; j < n_core; ++j) {
            if (w.block(n_core, j, n_periphery, 1).maxCoeff() <= 0.0)
                rep.warnings.push_back("PC block not column regular: no periphery bank lends to core agent " +
                                       std::to_string(j));
        }
    }
    return rep;
}

WeightedNetwork::WeightedNetwork(std::size_t n_core, std::size_t n_periphery, Matrix weights,
                                 std::optional<double> epsilon)
    : n_core_(n_core), n_periphery_(n_periphery), weights_(std::move(weights)), epsilon_(epsilon) {
    const auto rep = validate_weights(n_core_, n_periphery_, weights_);
    if (!rep.valid) fail(ErrorKind::InvalidArgument, "invalid network: " + rep.errors.front());
    if (epsilon_) require(*epsilon_ > 0.0 && *epsilon_ < 1.0, "epsilon must lie in (0,1)");
}

WeightedNetwork build_core_periphery(std::size_t n_core, std::size_t n_periphery, double epsilon) {
    require(n_core >= 2, "tiered network needs at least 2 core banks");
    require(n_periphery >= 1, "tiered network needs at least 1 periphery bank");
    require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in the open interval (0,1)");

    const std::size_t n = n_core + n_periphery;
    const double w_cc = (1.0 - epsilon) / static_cast<double>(n_core - 1);
    const double w_cp = epsilon / static_cast<double>(n_periphery);
    const double w_pc = 1.0 / static_cast<double>(n_core);

    Matrix w = Matrix::Zero(n, n);
    w.topLeftCorner(n_core, n_core).setConstant(w_cc);
    w.topLeftCorner(n_core, n_core).diagonal().setZero();
    w.topRightCorner(n_core, n_periphery).setConstant(w_cp);
    w.bottomLeftCorner(n_periphery, n_core).setConstant(w_pc);

    // Summation of many equal shares can drift by a few ulps; renormalize core rows.
    for (std::size_t i = 0; i < n_core; ++i) {
        const double s = w.row(i).sum();
        if (std::abs(s - 1.0) > kRowSumTolerance) w.row(i) /= s;
    }
    return WeightedNetwork(n_core, n_periphery, std::move(w), epsilon);
}

WeightedNetwork build_from_blocks(const BlockPattern& p) {
    const auto nc = p.cc.rows();
    const auto np = p.pp.rows();
    require(p.cc.cols() == nc && p.pp.cols() == np, "CC and PP blocks must be square");
    require(p.cp.rows() == nc && p.cp.cols() == np, "CP block must be |C| x |P|");
    require(p.pc.rows() == np && p.pc.cols() == nc, "PC block must be |P| x |C|");
    require(nc >= 1, "pattern needs at least one core bank");
    for (Eigen::Index i = 0; i < nc; ++i)
        require(p.cc(i, i) == 0.0, "CC block has nonzero diagonal at core agent " + std::to_string(i));

    const auto n = nc + np;
    Matrix w(n, n);
    w << p.cc, p.cp, p.pc, p.pp;
    require(w.allFinite() && w.minCoeff() >= 0.0, "block entries must be finite and nonnegative");
    for (Eigen::Index i = 0; i < n; ++i) {
        const double s = w.row(i).sum();
        if (s <= 0.0)
            fail(ErrorKind::InvalidArgument,
                 agent_label(static_cast<std::size_t>(i), static_cast<std::size_t>(nc)) +
                     " has no debtors (all-zero row)");
        w.row(i) /= s;
    }
    return WeightedNetwork(static_cast<std::size_t>(nc), static_cast<std::size_t>(np), std::move(w));
}

Vector tier_vector(const WeightedNetwork& net, double core_value, double periphery_value) {
    Vector v(net.size());
    v.head(net.n_core()).setConstant(core_value);
    v.tail(net.n_periphery()).setConstant(periphery_value);
    return v;
}

Matrix drift_matrix(const WeightedNetwork& net, double theta_core, double theta_periphery) {
    require(theta_core > 0.0 && theta_periphery > 0.0, "friction rates must be positive");
    const auto n = static_cast<Eigen::Index>(net.size());
    Matrix m = net.weights() - Matrix::Identity(n, n);
    return tier_vector(net, theta_core, theta_periphery).asDiagonal() * m;
}

void write_network_csv(std::ostream& out, const WeightedNetwork& net) {
    char buf[64];
    out << "n_core,n_periphery,epsilon\n" << net.n_core() << ',' << net.n_periphery() << ',';
    if (net.epsilon()) {
        std::snprintf(buf, sizeof buf, "%.17g", *net.epsilon());
        out << buf;
    }
    out << '\n';
    const auto& w = net.weights();
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", w(i, j));
            if (j) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

void save_network_csv(const std::string& path, const WeightedNetwork& net) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
    write_network_csv(out, net);
    if (!out) fail(ErrorKind::Io, "write to '" + path + "' failed");
}

RawNetwork read_raw_network_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return true;
        }
        return false;
    };
    if (!next_line() || line != "n_core,n_periphery,epsilon")
        fail(ErrorKind::Io, "network csv: missing header 'n_core,n_periphery,epsilon'");
    if (!next_line()) fail(ErrorKind::Io, "network csv: missing size line");
    auto head = split(line, ',');
    if (head.size() != 3) fail(ErrorKind::Io, "network csv line " + std::to_string(line_no) + ": expected 3 fields");
    const std::size_t nc = parse_count(head[0], line_no);
    const std::size_t np = parse_count(head[1], line_no);
    std::optional<double> eps;
    if (!head[2].empty()) eps = parse_double(head[2], line_no);

    const std::size_t n = nc + np;
    Matrix w(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!next_line()) fail(ErrorKind::Io, "network csv: expected " + std::to_string(n) + " weight rows");
        auto fields = split(line, ',');
        if (fields.size() != n)
            fail(ErrorKind::Io, "network csv line " + std::to_string(line_no) + ": expected " + std::to_string(n) +
                                    " weights, got " + std::to_string(fields.size()));
        for (std::size_t j = 0; j < n; ++j) w(i, j) = parse_double(fields[j], line_no);
    }
    if (next_line()) fail(ErrorKind::Io, "network csv line " + std::to_string(line_no) + ": trailing data");
    return {nc, np, eps, std::move(w)};
}

RawNetwork load_raw_network_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open network file '" + path + "'");
    return read_raw_network_csv(in);
}

WeightedNetwork read_network_csv(std::istream& in) {
    auto raw = read_raw_network_csv(in);
    return WeightedNetwork(raw.n_core, raw.n_periphery, std::move(raw.weights), raw.epsilon);
}

WeightedNetwork load_network_csv(const std::string& path) {
    auto raw = load_raw_network_csv(path);
    return WeightedNetwork(raw.n_core, raw.n_periphery, std::move(raw.weights), raw.epsilon);
}

}  // namespace cpnet
