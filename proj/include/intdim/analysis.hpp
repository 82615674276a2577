#ifndef INTDIM_ANALYSIS_HPP
#define INTDIM_ANALYSIS_HPP

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace intdim {

enum class DomainTag { Radiological, Natural, Other };

std::string_view domain_tag_name(DomainTag tag) noexcept;
std::optional<DomainTag> parse_domain_tag(std::string_view name) noexcept;

/// One trained-classifier result: generalization ability measured on a dataset of known ID.
struct ExperimentRecord {
    std::string dataset;
    DomainTag domain = DomainTag::Other;
    double intrinsic_dim = 0.0;
    double generalization_ability = 0.0;
    std::size_t n_train = 1;
    std::string model;
};

/// Throws Error(MalformedResults) if a record breaks its field invariants.
void validate(const ExperimentRecord& record);

/// Reads `dataset,domain,intrinsic_dim,generalization_ability,n_train,model`.
std::vector<ExperimentRecord> load_records(const std::filesystem::path& csv);
std::vector<ExperimentRecord> parse_records(std::string_view text);

struct RegressionFit {
    double intercept = 0.0;
    double slope_id = 0.0;
    /// Coefficient on ln(n_train); present for the multiple fit only.
    std::optional<double> slope_logn;
    double r_squared = 0.0;
    /// Set when the response is constant; r_squared is then reported as 0.
    bool degenerate_response = false;
    std::size_t n_records = 0;
    /// y - fitted, in record order.
    std::vector<double> residuals;
};

/**
 * Ordinary least squares on an arbitrary design with an intercept column.
 *
 * Solves the normal equations of the mean-centered predictors. `predictors`
 * is column-major: predictors[c][r]. Returns intercept first, then one slope
 * per column.
 */
struct OlsResult {
    std::vector<double> coefficients;
    std::vector<double> residuals;
    double r_squared = 0.0;
    bool degenerate_response = false;
};
OlsResult ordinary_least_squares(const std::vector<std::vector<double>>& predictors,
                                 const std::vector<double>& response);

/// GA = b + a * ID.
RegressionFit fit_simple(const std::vector<ExperimentRecord>& records);

/// GA = b + a1 * ID + a2 * ln(n_train).
RegressionFit fit_multiple(const std::vector<ExperimentRecord>& records);

enum class FitMode { Simple, Multiple };
enum class GroupBy { None, Domain, ModelAndNTrain };

std::optional<FitMode> parse_fit_mode(std::string_view name) noexcept;
std::optional<GroupBy> parse_group_by(std::string_view name) noexcept;
std::string_view fit_mode_name(FitMode mode) noexcept;
std::string_view group_by_name(GroupBy group_by) noexcept;

struct FitSummary {
    std::size_t n_groups = 0;
    double r_squared_mean = 0.0;
    /// Sample standard deviation (n-1); 0 for a single group.
    double r_squared_std = 0.0;
    double slope_id_mean = 0.0;
    double slope_id_std = 0.0;
};

struct GroupedFits {
    /// Keyed and ordered by group label.
    std::map<std::string, RegressionFit> fits;
    /// Record indices per group, ascending.
    std::map<std::string, std::vector<std::size_t>> members;
    FitSummary summary;
};

std::string group_key(const ExperimentRecord& record, GroupBy group_by);

/// Fits each group separately and summarizes R^2 and slope across groups, unweighted.
/// Per-group failures are rethrown with the group label in the message.
GroupedFits group_fits(const std::vector<ExperimentRecord>& records, GroupBy group_by,
                       FitMode mode = FitMode::Simple);

/// Mean and sample standard deviation; std is 0 when fewer than two values.
std::pair<double, double> mean_and_sample_std(const std::vector<double>& values);

} // namespace intdim

#endif
