#include "qfboot/sample.hpp"

#include "qfboot/errors.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qfboot {

Sample::Sample(Eigen::MatrixXd values) : values_(std::move(values)) {
    if (values_.rows() < 1 || values_.cols() < 1) {
        throw InvalidInputError("sample must have n >= 1 rows and d >= 1 columns");
    }
    if (!values_.allFinite()) {
        throw InvalidInputError("sample contains non-finite entries");
    }
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view field) {
    field = trim(field);
    if (!field.empty() && field.front() == '+') {
        field.remove_prefix(1);
    }
    double value = 0.0;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc() || ptr != end || field.empty()) {
        return std::nullopt;
    }
    return value;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

}  // namespace

Sample read_csv_sample(std::istream& in) {
    std::vector<double> cells;
    std::size_t cols = 0;
    std::size_t rows = 0;
    std::size_t line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view view = trim(line);
        if (view.empty()) {
            continue;
        }
        const auto fields = split(view);
        if (rows == 0 && cols == 0 && !parse_number(fields.front())) {
            continue;  // header
        }
        if (cols == 0) {
            cols = fields.size();
        } else if (fields.size() != cols) {
            throw DimensionError("csv line " + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                                 " fields, got " + std::to_string(fields.size()));
        }
        for (const auto field : fields) {
            const auto value = parse_number(field);
            if (!value) {
                throw InvalidInputError("csv line " + std::to_string(line_no) + ": cannot parse '" +
                                        std::string(field) + "'");
            }
            cells.push_back(*value);
        }
        ++rows;
    }
    if (rows == 0) {
        throw InvalidInputError("csv contains no data rows");
    }
    Eigen::MatrixXd values(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cells[i * cols + j];
        }
    }
    return Sample(std::move(values));
}

Sample read_csv_sample(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInputError("cannot open " + path.string());
    }
    return read_csv_sample(in);
}

}  // namespace qfboot
