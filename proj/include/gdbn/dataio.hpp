#ifndef GDBN_DATAIO_HPP
#define GDBN_DATAIO_HPP

#include <gdbn/linalg.hpp>

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace gdbn {

/// One or more concatenated time series over the same n variables.
///
/// Rows are time points. `experiment_starts` holds the first row of every
/// experiment (always beginning with 0); a transition (t-1, t) exists only
/// when both rows belong to the same experiment, so the effective sample
/// size is T* = sum_k (T_k - 1).
class TimeSeriesData {
public:
    TimeSeriesData() = default;
    explicit TimeSeriesData(Matrix values, std::vector<int> experiment_starts = {0},
                            std::vector<std::string> names = {});

    const Matrix& values() const { return values_; }
    int num_nodes() const { return static_cast<int>(values_.cols()); }
    int num_rows() const { return static_cast<int>(values_.rows()); }
    int num_experiments() const { return static_cast<int>(starts_.size()); }
    const std::vector<int>& experiment_starts() const { return starts_; }
    const std::vector<std::string>& names() const { return names_; }

    /// Row indices t whose predecessor t-1 lies in the same experiment.
    const std::vector<int>& transition_rows() const { return transitions_; }
    int effective_size() const { return static_cast<int>(transitions_.size()); }

private:
    Matrix values_;
    std::vector<int> starts_{0};
    std::vector<std::string> names_;
    std::vector<int> transitions_;
};

/// Paired observations z = (x_current, x_lagged), one row per usable
/// transition. Columns 0..n-1 hold the current slice and n..2n-1 the
/// lagged slice (or external parents, see external_parent_mode).
struct AugmentedData {
    Matrix z;
    int slice_size = 0;

    int num_rows() const { return static_cast<int>(z.rows()); }
    auto current() const { return z.leftCols(slice_size); }
    auto lagged() const { return z.rightCols(slice_size); }
    /// Copy without row `row` (leave-one-out).
    AugmentedData without_row(int row) const;
};

class CsvError : public std::runtime_error {
public:
    CsvError(const std::string& what, int line)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

struct DatasetSpec {
    std::string path;
    /// Variables to keep, by header name; empty keeps every non-experiment column.
    std::vector<std::string> columns;
    /// Integer column whose value changes mark experiment boundaries.
    std::string experiment_column = "experiment";
    bool standardize = false;
};

/// Comma-separated, header row required, '.' decimal separator. Empty
/// cells, non-numeric or non-finite cells and ragged rows are rejected with
/// the offending line number. Experiment ids must form contiguous blocks.
TimeSeriesData read_csv(std::istream& in, const DatasetSpec& spec = {});
TimeSeriesData load_csv(const DatasetSpec& spec);

/// Shortest round-trip decimal representation; an `experiment` column is
/// written first when there is more than one experiment.
void write_csv(std::ostream& out, const TimeSeriesData& data);

AugmentedData to_augmented(const TimeSeriesData& data);

/// Pairs row t of `targets` with row t of `externals`; every row is usable.
AugmentedData external_parent_mode(const Matrix& targets, const Matrix& externals);

/// Each column rescaled to sample mean 0 and unbiased sample variance 1.
/// Throws std::invalid_argument for a constant or non-finite column, or
/// fewer than two rows.
TimeSeriesData standardize(const TimeSeriesData& data);
Matrix standardize_columns(const Matrix& values);

/// Stacks the series and records their boundaries.
TimeSeriesData concatenate(const std::vector<TimeSeriesData>& parts);

}  // namespace gdbn

#endif  // GDBN_DATAIO_HPP
