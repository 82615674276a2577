#include "intdim/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>

#include "intdim/error.hpp"
#include "intdim/ingest.hpp"

namespace intdim {

namespace {

// Minimum LDLT pivot of the predictor correlation matrix below which the design is
// treated as rank deficient.
constexpr double collinearity_tolerance = 1e-12;

std::string results_error(std::size_t line, const std::string& what) {
    return "results line " + std::to_string(line) + ": " + what;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
    s = trim(s);
    T value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return value;
}

RegressionFit to_fit(OlsResult ols, std::size_t n_records, bool with_logn) {
    RegressionFit fit;
    fit.intercept = ols.coefficients[0];
    fit.slope_id = ols.coefficients[1];
    if (with_logn) {
        fit.slope_logn = ols.coefficients[2];
    }
    fit.r_squared = ols.r_squared;
    fit.degenerate_response = ols.degenerate_response;
    fit.n_records = n_records;
    fit.residuals = std::move(ols.residuals);
    return fit;
}

} // namespace

std::string_view domain_tag_name(DomainTag tag) noexcept {
    switch (tag) {
    case DomainTag::Radiological: return "radiological";
    case DomainTag::Natural: return "natural";
    case DomainTag::Other: return "other";
    }
    return "unknown";
}

std::optional<DomainTag> parse_domain_tag(std::string_view name) noexcept {
    for (auto tag : {DomainTag::Radiological, DomainTag::Natural, DomainTag::Other}) {
        if (domain_tag_name(tag) == name) {
            return tag;
        }
    }
    return std::nullopt;
}

void validate(const ExperimentRecord& record) {
    if (!(record.intrinsic_dim > 0.0) || !std::isfinite(record.intrinsic_dim)) {
        throw Error(ErrorCode::MalformedResults, "intrinsic_dim must be a positive finite number");
    }
    if (!(record.generalization_ability >= 0.0 && record.generalization_ability <= 1.0)) {
        throw Error(ErrorCode::MalformedResults, "generalization_ability must lie in [0, 1]");
    }
    if (record.n_train < 1) {
        throw Error(ErrorCode::MalformedResults, "n_train must be at least 1");
    }
}

std::vector<ExperimentRecord> parse_records(std::string_view text) {
    static constexpr std::string_view columns[] = {"dataset", "domain", "intrinsic_dim",
                                                   "generalization_ability", "n_train", "model"};
    std::vector<ExperimentRecord> records;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) {
            eol = text.size();
        }
        const std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        const auto fields = split_csv_line(line);
        if (!header_seen) {
            bool ok = fields.size() == 6;
            for (std::size_t c = 0; ok && c < 6; ++c) {
                ok = trim(fields[c]) == columns[c];
            }
            if (!ok) {
                throw Error(ErrorCode::MalformedResults,
                            results_error(line_no, "expected header "
                                                   "'dataset,domain,intrinsic_dim,generalization_ability,n_train,model'"));
            }
            header_seen = true;
            continue;
        }
        if (trim(line).empty()) {
            continue;
        }
        if (fields.size() != 6) {
            throw Error(ErrorCode::MalformedResults, results_error(line_no, "expected 6 fields"));
        }
        ExperimentRecord r;
        r.dataset = std::string(trim(fields[0]));
        const auto domain = parse_domain_tag(trim(fields[1]));
        const auto id = parse_number<double>(fields[2]);
        const auto ga = parse_number<double>(fields[3]);
        const auto n_train = parse_number<std::size_t>(fields[4]);
        r.model = std::string(trim(fields[5]));
        if (!domain) {
            throw Error(ErrorCode::MalformedResults,
                        results_error(line_no, "domain must be radiological, natural or other"));
        }
        if (!id || !ga || !n_train) {
            throw Error(ErrorCode::MalformedResults, results_error(line_no, "unparseable number"));
        }
        r.domain = *domain;
        r.intrinsic_dim = *id;
        r.generalization_ability = *ga;
        r.n_train = *n_train;
        try {
            validate(r);
        } catch (const Error& e) {
            throw Error(ErrorCode::MalformedResults, results_error(line_no, e.what()));
        }
        records.push_back(std::move(r));
    }
    if (!header_seen) {
        throw Error(ErrorCode::MalformedResults, results_error(1, "missing header"));
    }
    return records;
}

std::vector<ExperimentRecord> load_records(const std::filesystem::path& csv) {
    std::ifstream in(csv, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open results " + csv.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_records(buffer.str());
}

OlsResult ordinary_least_squares(const std::vector<std::vector<double>>& predictors,
                                 const std::vector<double>& response) {
    const std::size_t n = response.size();
    const std::size_t p = predictors.size();
    if (n < p + 1) {
        throw Error(ErrorCode::TooFewRecords, std::to_string(n) + " record(s) cannot determine " +
                                                  std::to_string(p + 1) + " coefficients");
    }
    for (const auto& column : predictors) {
        if (column.size() != n) {
            throw Error(ErrorCode::InvalidArgument, "predictor and response lengths differ");
        }
        if (std::all_of(column.begin(), column.end(), [&](double v) { return v == column.front(); })) {
            throw Error(ErrorCode::DegenerateDesign, "a predictor is constant, so it is collinear with the intercept");
        }
    }

    const Eigen::Index rows = static_cast<Eigen::Index>(n);
    const Eigen::Index cols = static_cast<Eigen::Index>(p);
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(response.data(), rows);
    const double y_mean = y.mean();

    Eigen::MatrixXd centered(rows, cols);
    Eigen::VectorXd means(cols), scales(cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        const Eigen::Map<const Eigen::VectorXd> x(predictors[static_cast<std::size_t>(c)].data(), rows);
        means(c) = x.mean();
        centered.col(c) = x.array() - means(c);
        scales(c) = centered.col(c).norm();
        centered.col(c) /= scales(c);
    }

    // Normal equations of the standardized predictors.
    const Eigen::MatrixXd gram = centered.transpose() * centered;
    const Eigen::VectorXd rhs = centered.transpose() * (y.array() - y_mean).matrix();
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() < collinearity_tolerance) {
        throw Error(ErrorCode::DegenerateDesign, "predictors are collinear; the design matrix is rank deficient");
    }
    const Eigen::VectorXd standardized = ldlt.solve(rhs);

    OlsResult out;
    out.coefficients.assign(p + 1, 0.0);
    double intercept = y_mean;
    for (Eigen::Index c = 0; c < cols; ++c) {
        const double slope = standardized(c) / scales(c);
        out.coefficients[static_cast<std::size_t>(c) + 1] = slope;
        intercept -= slope * means(c);
    }
    out.coefficients[0] = intercept;

    out.residuals.resize(n);
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        double fitted = intercept;
        for (std::size_t c = 0; c < p; ++c) {
            fitted += out.coefficients[c + 1] * predictors[c][r];
        }
        out.residuals[r] = response[r] - fitted;
        ss_res += out.residuals[r] * out.residuals[r];
        ss_tot += (response[r] - y_mean) * (response[r] - y_mean);
    }
    out.degenerate_response =
        std::all_of(response.begin(), response.end(), [&](double v) { return v == response.front(); });
    out.r_squared = out.degenerate_response ? 0.0 : std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
    return out;
}

RegressionFit fit_simple(const std::vector<ExperimentRecord>& records) {
    if (records.size() < 2) {
        throw Error(ErrorCode::TooFewRecords, "a simple fit needs at least 2 records");
    }
    std::vector<double> id, ga;
    for (const auto& r : records) {
        id.push_back(r.intrinsic_dim);
        ga.push_back(r.generalization_ability);
    }
    return to_fit(ordinary_least_squares({id}, ga), records.size(), false);
}

RegressionFit fit_multiple(const std::vector<ExperimentRecord>& records) {
    if (records.size() < 3) {
        throw Error(ErrorCode::TooFewRecords, "a multiple fit needs at least 3 records");
    }
    std::vector<double> id, log_n, ga;
    for (const auto& r : records) {
        id.push_back(r.intrinsic_dim);
        log_n.push_back(std::log(static_cast<double>(r.n_train)));
        ga.push_back(r.generalization_ability);
    }
    return to_fit(ordinary_least_squares({id, log_n}, ga), records.size(), true);
}

std::optional<FitMode> parse_fit_mode(std::string_view name) noexcept {
    if (name == "simple") {
        return FitMode::Simple;
    }
    if (name == "multi" || name == "multiple") {
        return FitMode::Multiple;
    }
    return std::nullopt;
}

std::optional<GroupBy> parse_group_by(std::string_view name) noexcept {
    if (name == "none") {
        return GroupBy::None;
    }
    if (name == "domain") {
        return GroupBy::Domain;
    }
    if (name == "model_ntrain") {
        return GroupBy::ModelAndNTrain;
    }
    return std::nullopt;
}

std::string_view fit_mode_name(FitMode mode) noexcept { return mode == FitMode::Simple ? "simple" : "multi"; }

std::string_view group_by_name(GroupBy group_by) noexcept {
    switch (group_by) {
    case GroupBy::None: return "none";
    case GroupBy::Domain: return "domain";
    case GroupBy::ModelAndNTrain: return "model_ntrain";
    }
    return "unknown";
}

std::string group_key(const ExperimentRecord& record, GroupBy group_by) {
    switch (group_by) {
    case GroupBy::None: return "all";
    case GroupBy::Domain: return std::string(domain_tag_name(record.domain));
    case GroupBy::ModelAndNTrain: return record.model + "/n_train=" + std::to_string(record.n_train);
    }
    return "all";
}

std::pair<double, double> mean_and_sample_std(const std::vector<double>& values) {
    if (values.empty()) {
        return {0.0, 0.0};
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    const double mean = sum / static_cast<double>(values.size());
    if (values.size() < 2) {
        return {mean, 0.0};
    }
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

GroupedFits group_fits(const std::vector<ExperimentRecord>& records, GroupBy group_by, FitMode mode) {
    GroupedFits out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        out.members[group_key(records[i], group_by)].push_back(i);
    }
    if (out.members.empty()) {
        throw Error(ErrorCode::TooFewRecords, "no records to fit");
    }
    std::vector<double> r2, slopes;
    for (const auto& [key, indices] : out.members) {
        std::vector<ExperimentRecord> subset;
        subset.reserve(indices.size());
        for (std::size_t i : indices) {
            subset.push_back(records[i]);
        }
        try {
            auto fit = mode == FitMode::Simple ? fit_simple(subset) : fit_multiple(subset);
            r2.push_back(fit.r_squared);
            slopes.push_back(fit.slope_id);
            out.fits.emplace(key, std::move(fit));
        } catch (const Error& e) {
            throw Error(e.code(), "group '" + key + "': " + e.what());
        }
    }
    out.summary.n_groups = out.fits.size();
    std::tie(out.summary.r_squared_mean, out.summary.r_squared_std) = mean_and_sample_std(r2);
    std::tie(out.summary.slope_id_mean, out.summary.slope_id_std) = mean_and_sample_std(slopes);
    return out;
}

} // namespace intdim
