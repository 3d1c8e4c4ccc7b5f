#include "torusreg/ingest.hpp"

#include <algorithm>
#include <array>
#include <bitset>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "torusreg/errors.hpp"

namespace torusreg {

namespace {

constexpr long long seconds_per_day = 86400;
constexpr long long ms_threshold = 100000000000LL;  // 1e11: beyond this, unix is in ms

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (std::isspace(static_cast<unsigned char>(s[b])) != 0)) ++b;
  while (e > b && (std::isspace(static_cast<unsigned char>(s[e - 1])) != 0)) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(current);
      current.clear();
    } else if (ch != '\r') {
      current += ch;
    }
  }
  fields.push_back(current);
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const char* begin = t.data();
  const char* end = begin + t.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end && std::isfinite(out);
}

bool parse_longlong(const std::string& s, long long& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const char* begin = t.data();
  const char* end = begin + t.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

// Epoch seconds of a "YYYY-MM-DD HH:MM:SS" (or date-only) stamp, UTC.
bool parse_datetime_epoch(const std::string& s, long long& out) {
  int y = 0;
  int mo = 0;
  int d = 0;
  int h = 0;
  int mi = 0;
  int se = 0;
  const std::string t = trim(s);
  const int got = std::sscanf(t.c_str(), "%d-%d-%d %d:%d:%d", &y, &mo, &d, &h, &mi, &se);
  if (got != 3 && got != 6) return false;
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(mo)},
                                        std::chrono::day{unsigned(d)}};
  if (!ymd.ok()) return false;
  const auto days = std::chrono::sys_days(ymd).time_since_epoch().count();
  out = static_cast<long long>(days) * seconds_per_day + h * 3600LL + mi * 60LL + se;
  return true;
}

struct ColumnIndices {
  std::size_t unix_col = 0;  // not `unix`: that's a predefined macro under GNU dialects
  std::size_t date = 0;
  std::size_t symbol = 0;
  std::size_t open = 0;
  std::size_t high = 0;
  std::size_t low = 0;
  std::size_t close = 0;
  std::size_t volume_asset = 0;
  std::size_t volume_base = 0;
};

ColumnIndices resolve_schema(const std::vector<std::string>& header, const SchemaMap& schema) {
  std::map<std::string, std::size_t> by_name;  // lowercased, trimmed
  for (std::size_t i = 0; i < header.size(); ++i) {
    by_name.emplace(lower(trim(header[i])), i);
  }

  const auto find_required = [&](const std::string& logical,
                                 const std::string& fallback) -> std::size_t {
    const auto it = schema.find(logical);
    const std::string name = lower(trim(it != schema.end() ? it->second : fallback));
    const auto col = by_name.find(name);
    if (col == by_name.end()) {
      throw SchemaError("required column for '" + logical + "' not found: " + name);
    }
    return col->second;
  };

  ColumnIndices idx;
  idx.unix_col = find_required("unix", "unix");
  idx.date = find_required("date", "date");
  idx.symbol = find_required("symbol", "symbol");
  idx.open = find_required("open", "open");
  idx.high = find_required("high", "high");
  idx.low = find_required("low", "low");
  idx.close = find_required("close", "close");

  // The two volume columns carry the asset ticker in their names, so by
  // default they are located by the word "volume" rather than an exact name.
  std::vector<std::size_t> volume_columns;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (lower(trim(header[i])).find("volume") != std::string::npos) {
      volume_columns.push_back(i);
    }
  }
  const auto volume_slot = [&](const std::string& logical, std::size_t order) -> std::size_t {
    const auto it = schema.find(logical);
    if (it != schema.end()) {
      const auto col = by_name.find(lower(trim(it->second)));
      if (col == by_name.end()) {
        throw SchemaError("required column for '" + logical + "' not found: " + it->second);
      }
      return col->second;
    }
    if (order >= volume_columns.size()) {
      throw SchemaError("required column for '" + logical + "' not found: no column name contains 'volume'");
    }
    return volume_columns[order];
  };
  idx.volume_asset = volume_slot("volume_asset", 0);
  idx.volume_base = volume_slot("volume_base", 1);
  return idx;
}

std::string format_angle(double v) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.12g", v);
  return buf.data();
}

std::string format_value(double v) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

}  // namespace

ParseResult parse_minute_csv(std::istream& in, const SchemaMap& schema) {
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("empty input: no header row");
  }
  const std::vector<std::string> header = split_csv_line(line);
  const ColumnIndices idx = resolve_schema(header, schema);
  const std::size_t max_index =
      std::max({idx.unix_col, idx.date, idx.symbol, idx.open, idx.high, idx.low, idx.close,
                idx.volume_asset, idx.volume_base});

  ParseResult result;
  std::size_t line_number = 1;
  bool any_rows = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    any_rows = true;

    const std::vector<std::string> fields = split_csv_line(line);
    const auto reject = [&](const std::string& reason) {
      result.rejects.push_back({line_number, reason});
    };
    if (fields.size() <= max_index) {
      reject("wrong field count");
      continue;
    }

    MinuteBar bar;
    if (!parse_longlong(fields[idx.unix_col], bar.unix_ts) || bar.unix_ts < 0) {
      reject("unparseable unix timestamp");
      continue;
    }
    if (bar.unix_ts > ms_threshold) bar.unix_ts /= 1000;

    if (!parse_double(fields[idx.open], bar.open) || !parse_double(fields[idx.high], bar.high) ||
        !parse_double(fields[idx.low], bar.low) || !parse_double(fields[idx.close], bar.close) ||
        !parse_double(fields[idx.volume_asset], bar.volume_asset) ||
        !parse_double(fields[idx.volume_base], bar.volume_base)) {
      reject("unparseable numeric field");
      continue;
    }
    bar.symbol = trim(fields[idx.symbol]);

    if (!(bar.open > 0.0 && bar.high > 0.0 && bar.low > 0.0 && bar.close > 0.0)) {
      reject("non-positive price");
      continue;
    }
    if (!(bar.low <= std::min(bar.open, bar.close) &&
          std::max(bar.open, bar.close) <= bar.high)) {
      reject("price invariant violated (low <= open,close <= high)");
      continue;
    }

    long long stamp = 0;
    if (!parse_datetime_epoch(fields[idx.date], stamp)) {
      reject("unparseable date field");
      continue;
    }
    if (std::llabs(stamp - bar.unix_ts) >= 60) {
      reject("date disagrees with unix timestamp");
      continue;
    }

    result.bars.push_back(std::move(bar));
  }
  if (!any_rows) {
    throw DataError("no data rows after the header");
  }
  return result;
}

std::vector<DailyRecord> daily_aggregate(const std::vector<MinuteBar>& bars) {
  if (bars.empty()) {
    throw EmptySampleError("daily aggregation of an empty bar list");
  }

  struct DayAccumulator {
    long long first_ts = 0;
    long long last_ts = 0;
    double open = 0.0;
    double close = 0.0;
    double high = 0.0;
    double low = 0.0;
    int high_minute = 0;
    int low_minute = 0;
    std::bitset<1440> minutes_present;
    bool started = false;
  };

  std::map<long long, DayAccumulator> days;  // key: days since epoch (UTC)
  for (const MinuteBar& bar : bars) {
    const long long day_key = bar.unix_ts / seconds_per_day;
    const int minute = static_cast<int>((bar.unix_ts % seconds_per_day) / 60);
    DayAccumulator& acc = days[day_key];
    if (!acc.started) {
      acc.started = true;
      acc.first_ts = acc.last_ts = bar.unix_ts;
      acc.open = bar.open;
      acc.close = bar.close;
      acc.high = bar.high;
      acc.low = bar.low;
      acc.high_minute = minute;
      acc.low_minute = minute;
    } else {
      if (bar.unix_ts < acc.first_ts) {
        acc.first_ts = bar.unix_ts;
        acc.open = bar.open;
      }
      if (bar.unix_ts > acc.last_ts) {
        acc.last_ts = bar.unix_ts;
        acc.close = bar.close;
      }
      // Strict inequality on ties plus the minute comparison keeps the
      // earliest extreme minute regardless of row order.
      if (bar.high > acc.high || (bar.high == acc.high && minute < acc.high_minute)) {
        acc.high = bar.high;
        acc.high_minute = minute;
      }
      if (bar.low < acc.low || (bar.low == acc.low && minute < acc.low_minute)) {
        acc.low = bar.low;
        acc.low_minute = minute;
      }
    }
    acc.minutes_present.set(static_cast<std::size_t>(minute));
  }

  std::vector<DailyRecord> records;
  records.reserve(days.size());
  for (const auto& [day_key, acc] : days) {
    DailyRecord rec;
    rec.date = std::chrono::year_month_day(
        std::chrono::sys_days(std::chrono::days(day_key)));
    rec.theta_high = Angle(two_pi * (static_cast<double>(acc.high_minute) / 1440.0));
    rec.theta_low = Angle(two_pi * (static_cast<double>(acc.low_minute) / 1440.0));
    rec.day_open = acc.open;
    rec.day_close = acc.close;
    rec.day_high = acc.high;
    rec.day_low = acc.low;

    const std::size_t missing = 1440 - acc.minutes_present.count();
    if (missing > 288) {  // more than 20% of the day absent
      rec.excluded_reason = "sparse-day";
    } else if (acc.close == acc.open) {
      rec.excluded_reason = "zero-open-close-spread";
    } else {
      rec.predictor_x = (acc.low / acc.high) / (acc.close - acc.open);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<DailyRecord> select_range(const std::vector<DailyRecord>& records,
                                      std::chrono::year_month_day start,
                                      std::chrono::year_month_day end) {
  const auto lo = std::chrono::sys_days(start);
  const auto hi = std::chrono::sys_days(end);
  if (lo > hi) {
    throw InvalidInputError("date range start is after its end");
  }
  std::vector<DailyRecord> out;
  for (const DailyRecord& rec : records) {
    const auto d = std::chrono::sys_days(rec.date);
    if (d >= lo && d <= hi) out.push_back(rec);
  }
  return out;
}

std::chrono::year_month_day parse_date(const std::string& yyyy_mm_dd) {
  const std::string t = trim(yyyy_mm_dd);
  const bool shaped = t.size() == 10 && t[4] == '-' && t[7] == '-' &&
                      std::all_of(t.begin(), t.end(), [](char c) {
                        return c == '-' || (c >= '0' && c <= '9');
                      });
  int y = 0;
  int m = 0;
  int d = 0;
  if (!shaped || std::sscanf(t.c_str(), "%4d-%2d-%2d", &y, &m, &d) != 3) {
    throw InvalidInputError("expected date in YYYY-MM-DD form: " + yyyy_mm_dd);
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                        std::chrono::day{unsigned(d)}};
  if (!ymd.ok()) {
    throw InvalidInputError("not a calendar date: " + yyyy_mm_dd);
  }
  return ymd;
}

std::string format_date(std::chrono::year_month_day date) {
  std::array<char, 16> buf{};
  std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf.data();
}

void write_daily_csv(const std::vector<DailyRecord>& records, std::ostream& out) {
  out << "date,theta_high,theta_low,day_open,day_high,day_low,day_close,"
         "predictor_x,excluded_reason\n";
  for (const DailyRecord& rec : records) {
    out << format_date(rec.date) << ',' << format_angle(rec.theta_high.value()) << ','
        << format_angle(rec.theta_low.value()) << ',' << format_value(rec.day_open) << ','
        << format_value(rec.day_high) << ',' << format_value(rec.day_low) << ','
        << format_value(rec.day_close) << ',';
    if (rec.predictor_x) out << format_value(*rec.predictor_x);
    out << ',' << rec.excluded_reason << '\n';
  }
}

std::vector<DailyRecord> read_daily_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("empty input: no header row");
  }
  const std::vector<std::string> header = split_csv_line(line);
  const std::vector<std::string> expected = {
      "date",     "theta_high", "theta_low",   "day_open",       "day_high",
      "day_low",  "day_close",  "predictor_x", "excluded_reason"};
  if (header.size() != expected.size()) {
    throw SchemaError("daily CSV header has unexpected column count");
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (lower(trim(header[i])) != expected[i]) {
      throw SchemaError("daily CSV header mismatch at column '" + header[i] + "'");
    }
  }

  std::vector<DailyRecord> records;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != expected.size()) {
      throw DataError("daily CSV line " + std::to_string(line_number) +
                      ": wrong field count");
    }
    DailyRecord rec;
    rec.date = parse_date(fields[0]);
    double th = 0.0;
    double tl = 0.0;
    if (!parse_double(fields[1], th) || !parse_double(fields[2], tl) ||
        !parse_double(fields[3], rec.day_open) || !parse_double(fields[4], rec.day_high) ||
        !parse_double(fields[5], rec.day_low) || !parse_double(fields[6], rec.day_close)) {
      throw DataError("daily CSV line " + std::to_string(line_number) +
                      ": unparseable numeric field");
    }
    rec.theta_high = Angle(th);
    rec.theta_low = Angle(tl);
    rec.excluded_reason = trim(fields[8]);
    const std::string pred = trim(fields[7]);
    if (!pred.empty()) {
      double x = 0.0;
      if (!parse_double(pred, x)) {
        throw DataError("daily CSV line " + std::to_string(line_number) +
                        ": unparseable predictor");
      }
      rec.predictor_x = x;
    }
    if (rec.predictor_x.has_value() == !rec.excluded_reason.empty()) {
      throw DataError("daily CSV line " + std::to_string(line_number) +
                      ": predictor and exclusion flags are inconsistent");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

Dataset dataset_from_daily(const std::vector<DailyRecord>& records, Response response) {
  std::vector<double> xs;
  AngleSample thetas;
  for (const DailyRecord& rec : records) {
    if (!rec.predictor_x) continue;
    xs.push_back(*rec.predictor_x);
    thetas.push_back(response == Response::theta_high ? rec.theta_high : rec.theta_low);
  }
  return Dataset(std::move(xs), std::move(thetas));
}

}  // namespace torusreg
