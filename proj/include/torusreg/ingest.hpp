#pragma once

#include <chrono>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "torusreg/angle.hpp"
#include "torusreg/dataset.hpp"

namespace torusreg {

// One minute of OHLCV data. Timestamps are UTC seconds.
struct MinuteBar {
  long long unix_ts = 0;
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
  double volume_asset = 0.0;
  double volume_base = 0.0;
  std::string symbol;
};

// Row that failed validation; row_number is the 1-based file line
// (the header is line 1).
struct RejectedRow {
  std::size_t row_number = 0;
  std::string reason;
};

struct ParseResult {
  std::vector<MinuteBar> bars;
  std::vector<RejectedRow> rejects;
};

// Logical field -> column name. Recognized keys: unix, date, symbol, open,
// high, low, close, volume_asset, volume_base. Unspecified keys use the
// stock layout: identically-named columns, plus the first two columns whose
// name contains "volume" (case-insensitive) for the volume pair.
using SchemaMap = std::map<std::string, std::string>;

// Parse a per-minute OHLCV CSV. Invalid rows land in the reject list with
// their line numbers; |input rows| = |bars| + |rejects| always. The unix
// column may be in seconds or milliseconds (auto-detected at 1e11); the date
// column is only cross-checked against unix, and disagreement rejects the
// row.
ParseResult parse_minute_csv(std::istream& in, const SchemaMap& schema = {});

// One calendar day's aggregate. theta_* locate the extreme-price minute on
// the day circle: 2*pi*minute_of_day/1440. predictor_x is absent exactly
// when excluded_reason is set.
struct DailyRecord {
  std::chrono::year_month_day date{};
  Angle theta_high;
  Angle theta_low;
  double day_open = 0.0;
  double day_high = 0.0;
  double day_low = 0.0;
  double day_close = 0.0;
  std::optional<double> predictor_x;
  std::string excluded_reason;
};

// Group bars by UTC day and reduce each day to a DailyRecord. Price-extreme
// ties resolve to the earliest minute. Days missing more than 20% of their
// 1440 minutes are excluded as "sparse-day"; days with day_close == day_open
// as "zero-open-close-spread" (sparse-day takes precedence).
std::vector<DailyRecord> daily_aggregate(const std::vector<MinuteBar>& bars);

// Inclusive filter by UTC date, order preserved.
std::vector<DailyRecord> select_range(const std::vector<DailyRecord>& records,
                                      std::chrono::year_month_day start,
                                      std::chrono::year_month_day end);

std::chrono::year_month_day parse_date(const std::string& yyyy_mm_dd);
std::string format_date(std::chrono::year_month_day date);

// Daily-record CSV: header
// date,theta_high,theta_low,day_open,day_high,day_low,day_close,predictor_x,excluded_reason
// with angles printed to 12 significant digits.
void write_daily_csv(const std::vector<DailyRecord>& records, std::ostream& out);
std::vector<DailyRecord> read_daily_csv(std::istream& in);

enum class Response { theta_high, theta_low };

// (predictor_x, chosen theta) pairs over the non-excluded records.
Dataset dataset_from_daily(const std::vector<DailyRecord>& records, Response response);

}  // namespace torusreg
