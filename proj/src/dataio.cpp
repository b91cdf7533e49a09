#include <gdbn/dataio.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace gdbn {

TimeSeriesData::TimeSeriesData(Matrix values, std::vector<int> experiment_starts, std::vector<std::string> names)
    : values_(std::move(values)), starts_(std::move(experiment_starts)), names_(std::move(names)) {
    if (starts_.empty() || starts_.front() != 0)
        throw std::invalid_argument("experiment boundaries must start at row 0");
    for (std::size_t k = 1; k < starts_.size(); ++k)
        if (starts_[k] <= starts_[k - 1]) throw std::invalid_argument("experiment boundaries must be strictly increasing");
    if (values_.rows() > 0 && starts_.back() >= values_.rows())
        throw std::invalid_argument("experiment boundary beyond the last row");
    if (values_.rows() == 0 && starts_.size() > 1) throw std::invalid_argument("experiment boundaries on empty data");
    if (names_.empty()) {
        for (int i = 0; i < num_nodes(); ++i) names_.push_back("X" + std::to_string(i + 1));
    } else if (static_cast<int>(names_.size()) != num_nodes()) {
        throw std::invalid_argument("column name count does not match the data");
    }
    std::size_t k = 0;
    for (int t = 1; t < num_rows(); ++t) {
        while (k + 1 < starts_.size() && starts_[k + 1] <= t) ++k;
        if (t != starts_[k]) transitions_.push_back(t);
    }
}

AugmentedData AugmentedData::without_row(int row) const {
    if (row < 0 || row >= num_rows()) throw std::out_of_range("without_row: row out of range");
    AugmentedData out{Matrix(z.rows() - 1, z.cols()), slice_size};
    out.z.topRows(row) = z.topRows(row);
    out.z.bottomRows(z.rows() - 1 - row) = z.bottomRows(z.rows() - 1 - row);
    return out;
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t");
        const auto e = cell.find_last_not_of(" \t");
        cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_cell(const std::string& cell, int line, const std::string& column) {
    if (cell.empty()) throw CsvError("missing value in column '" + column + "'", line);
    double v = 0.0;
    const char* begin = cell.data();
    if (*begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v))
        throw CsvError("non-numeric value '" + cell + "' in column '" + column + "'", line);
    return v;
}

long parse_id(const std::string& cell, int line) {
    long v = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size())
        throw CsvError("experiment id '" + cell + "' is not an integer", line);
    return v;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

TimeSeriesData read_csv(std::istream& in, const DatasetSpec& spec) {
    std::string line;
    int line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        header = split_row(line);
        break;
    }
    if (header.empty()) throw CsvError("missing header row", 0);

    int exp_col = -1;
    std::vector<int> keep;
    std::vector<std::string> names;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c].empty()) throw CsvError("empty column name", line_no);
        if (std::count(header.begin(), header.end(), header[c]) > 1)
            throw CsvError("duplicate column name '" + header[c] + "'", line_no);
        if (!spec.experiment_column.empty() && header[c] == spec.experiment_column) exp_col = static_cast<int>(c);
    }
    if (spec.columns.empty()) {
        for (std::size_t c = 0; c < header.size(); ++c)
            if (static_cast<int>(c) != exp_col) keep.push_back(static_cast<int>(c));
    } else {
        for (const auto& name : spec.columns) {
            auto it = std::find(header.begin(), header.end(), name);
            if (it == header.end()) throw CsvError("no column named '" + name + "'", line_no);
            keep.push_back(static_cast<int>(it - header.begin()));
        }
    }
    if (keep.empty()) throw CsvError("no data columns", line_no);
    for (int c : keep) names.push_back(header[c]);

    std::vector<std::vector<double>> rows;
    std::vector<int> starts;
    std::vector<long> seen_ids;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto cells = split_row(line);
        if (cells.size() != header.size())
            throw CsvError("expected " + std::to_string(header.size()) + " cells, found " + std::to_string(cells.size()),
                           line_no);
        std::vector<double> row;
        row.reserve(keep.size());
        for (int c : keep) row.push_back(parse_cell(cells[c], line_no, header[c]));
        // Non-selected columns must still be numeric so a damaged file never loads silently.
        for (std::size_t c = 0; c < cells.size(); ++c)
            if (static_cast<int>(c) != exp_col && std::find(keep.begin(), keep.end(), c) == keep.end())
                parse_cell(cells[c], line_no, header[c]);
        if (exp_col >= 0) {
            const long id = parse_id(cells[exp_col], line_no);
            if (seen_ids.empty() || seen_ids.back() != id) {
                if (std::find(seen_ids.begin(), seen_ids.end(), id) != seen_ids.end())
                    throw CsvError("experiment " + std::to_string(id) + " is not contiguous", line_no);
                seen_ids.push_back(id);
                starts.push_back(static_cast<int>(rows.size()));
            }
        }
        rows.push_back(std::move(row));
    }
    if (starts.empty()) starts.push_back(0);

    Matrix values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < keep.size(); ++c) values(r, c) = rows[r][c];
    TimeSeriesData data(std::move(values), std::move(starts), std::move(names));
    return spec.standardize ? standardize(data) : data;
}

TimeSeriesData load_csv(const DatasetSpec& spec) {
    std::ifstream in(spec.path);
    if (!in) throw std::runtime_error("cannot open data file '" + spec.path + "'");
    try {
        return read_csv(in, spec);
    } catch (const CsvError& e) {
        throw CsvError(spec.path + ": " + e.what(), e.line());
    }
}

void write_csv(std::ostream& out, const TimeSeriesData& data) {
    const bool with_ids = data.num_experiments() > 1;
    if (with_ids) out << "experiment,";
    for (int i = 0; i < data.num_nodes(); ++i) out << (i ? "," : "") << data.names()[i];
    out << '\n';
    std::size_t k = 0;
    const auto& starts = data.experiment_starts();
    for (int t = 0; t < data.num_rows(); ++t) {
        while (k + 1 < starts.size() && starts[k + 1] <= t) ++k;
        if (with_ids) out << k + 1 << ',';
        for (int i = 0; i < data.num_nodes(); ++i) out << (i ? "," : "") << format_double(data.values()(t, i));
        out << '\n';
    }
}

AugmentedData to_augmented(const TimeSeriesData& data) {
    const int n = data.num_nodes();
    const auto& rows = data.transition_rows();
    if (rows.empty()) throw std::invalid_argument("to_augmented: the data contain no transitions");
    AugmentedData out{Matrix(static_cast<Eigen::Index>(rows.size()), 2 * n), n};
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out.z.row(r).head(n) = data.values().row(rows[r]);
        out.z.row(r).tail(n) = data.values().row(rows[r] - 1);
    }
    return out;
}

AugmentedData external_parent_mode(const Matrix& targets, const Matrix& externals) {
    if (targets.rows() != externals.rows())
        throw std::invalid_argument("external_parent_mode: targets and externals differ in row count");
    if (targets.cols() != externals.cols())
        throw std::invalid_argument("external_parent_mode: externals must have one column per target");
    AugmentedData out{Matrix(targets.rows(), 2 * targets.cols()), static_cast<int>(targets.cols())};
    out.z << targets, externals;
    return out;
}

Matrix standardize_columns(const Matrix& values) {
    if (values.rows() < 2) throw std::invalid_argument("standardize: need at least two rows");
    Matrix out(values.rows(), values.cols());
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
        if (!values.col(c).allFinite()) throw std::invalid_argument("standardize: column " + std::to_string(c + 1) + " has non-finite values");
        // Divide by the largest magnitude first so explosive series do not overflow when squared.
        const double scale = values.col(c).cwiseAbs().maxCoeff();
        if (scale == 0.0) throw std::invalid_argument("standardize: column " + std::to_string(c + 1) + " is constant");
        const Vector y = values.col(c) / scale;
        const Vector centered = y.array() - y.mean();
        const double var = centered.squaredNorm() / static_cast<double>(values.rows() - 1);
        if (!(var > 1e-28)) throw std::invalid_argument("standardize: column " + std::to_string(c + 1) + " is constant");
        out.col(c) = centered / std::sqrt(var);
    }
    return out;
}

TimeSeriesData standardize(const TimeSeriesData& data) {
    return TimeSeriesData(standardize_columns(data.values()), data.experiment_starts(), data.names());
}

TimeSeriesData concatenate(const std::vector<TimeSeriesData>& parts) {
    if (parts.empty()) throw std::invalid_argument("concatenate: nothing to concatenate");
    const int n = parts.front().num_nodes();
    Eigen::Index total = 0;
    for (const auto& p : parts) {
        if (p.num_nodes() != n) throw std::invalid_argument("concatenate: series differ in variable count");
        total += p.num_rows();
    }
    Matrix values(total, n);
    std::vector<int> starts;
    Eigen::Index row = 0;
    for (const auto& p : parts) {
        if (p.num_rows() == 0) continue;
        for (int s : p.experiment_starts()) starts.push_back(static_cast<int>(row) + s);
        values.middleRows(row, p.num_rows()) = p.values();
        row += p.num_rows();
    }
    if (starts.empty()) starts.push_back(0);
    return TimeSeriesData(std::move(values), std::move(starts), parts.front().names());
}

}  // namespace gdbn
