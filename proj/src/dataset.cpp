#include "smscore/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <string_view>
#include <vector>

#include "smscore/error.hpp"

namespace smscore {

XDist parse_xdist(const std::string& name) {
    if (name == "normal") return XDist::Normal;
    if (name == "t5") return XDist::T5;
    if (name == "laplace") return XDist::Laplace;
    throw ConfigError("dgp", "unknown design '" + name + "'; supported: normal, t5, laplace");
}

std::string xdist_name(XDist xdist) {
    switch (xdist) {
        case XDist::Normal: return "normal";
        case XDist::T5: return "t5";
        case XDist::Laplace: return "laplace";
    }
    return "?";
}

void validate_for_estimation(const Dataset& data) {
    if (data.y.size() != data.x.rows())
        throw ShapeError("dgp", "y has " + std::to_string(data.y.size()) + " entries but x has " +
                                    std::to_string(data.x.rows()) + " rows");
    if (data.d() < 1) throw ShapeError("dgp", "dataset has no regressors");
    if (data.n() < data.d() + 1)
        throw InsufficientDataError("dgp", "need n >= d + 1 observations, got n = " +
                                               std::to_string(data.n()) +
                                               ", d = " + std::to_string(data.d()));
    Eigen::Index ones = 0;
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        if (data.y[i] != 0 && data.y[i] != 1)
            throw DomainError("dgp", "y must be 0 or 1 (observation " + std::to_string(i) + ")");
        ones += data.y[i];
    }
    if (ones == 0 || ones == data.n())
        throw DegenerateDataError("dgp", "only one outcome class is present");
    if (!data.x.allFinite()) throw DomainError("dgp", "x contains non-finite values");
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view s, double& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("dgp", "cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw FormatError("dgp", path.string() + ": missing header");
    const auto header = split_commas(trim(line));
    if (header.size() < 2 || trim(header[0]) != "y")
        throw FormatError("dgp", path.string() + ": missing header 'y,x1,...,xd'");
    for (std::size_t j = 1; j < header.size(); ++j) {
        if (trim(header[j]) != "x" + std::to_string(j))
            throw FormatError("dgp", path.string() + ": header column " + std::to_string(j + 1) +
                                         " should be x" + std::to_string(j));
    }
    const std::size_t d = header.size() - 1;

    std::vector<int> ys;
    std::vector<double> xs;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto row = trim(line);
        if (row.empty()) continue;
        const auto fields = split_commas(row);
        const std::string where = path.string() + " line " + std::to_string(line_no);
        if (fields.size() != d + 1)
            throw FormatError("dgp", where + ": expected " + std::to_string(d + 1) +
                                         " fields, found " + std::to_string(fields.size()));
        double yv = 0.0;
        if (!parse_double(trim(fields[0]), yv) || (yv != 0.0 && yv != 1.0))
            throw DomainError("dgp", where + ": y must be 0 or 1, got '" +
                                         std::string(trim(fields[0])) + "'");
        ys.push_back(static_cast<int>(yv));
        for (std::size_t j = 1; j <= d; ++j) {
            double v = 0.0;
            if (!parse_double(trim(fields[j]), v) || !std::isfinite(v))
                throw DomainError("dgp", where + ": x" + std::to_string(j) +
                                             " is not a finite number: '" +
                                             std::string(trim(fields[j])) + "'");
            xs.push_back(v);
        }
    }

    const auto n = static_cast<Eigen::Index>(ys.size());
    // n = d still loads; estimation itself needs n >= d + 1.
    if (n < static_cast<Eigen::Index>(d) || n == 0)
        throw InsufficientDataError("dgp", path.string() + ": " + std::to_string(n) +
                                               " observations for d = " + std::to_string(d));
    Dataset data;
    data.y = Eigen::Map<const Eigen::VectorXi>(ys.data(), n);
    data.x = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        xs.data(), n, static_cast<Eigen::Index>(d));
    data.source = FileSource{path};
    return data;
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
    if (data.y.size() != data.x.rows()) throw ShapeError("dgp", "y and x row counts differ");
    std::ofstream out(path);
    if (!out) throw FormatError("dgp", "cannot write " + path.string());
    out << 'y';
    for (Eigen::Index j = 0; j < data.d(); ++j) out << ",x" << j + 1;
    out << '\n';
    char buf[64];
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        out << data.y[i];
        for (Eigen::Index j = 0; j < data.d(); ++j) {
            const auto res = std::to_chars(buf, buf + sizeof buf, data.x(i, j));
            out << ',' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
        }
        out << '\n';
    }
    if (!out) throw FormatError("dgp", "write failed for " + path.string());
}

}  // namespace smscore
