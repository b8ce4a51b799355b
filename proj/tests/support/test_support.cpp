#include "test_support.hpp"

#include <fstream>
#include <unistd.h>

namespace tsf::testing {

long TempDir::process_id() { return static_cast<long>(::getpid()); }

void write_series_csv(const std::filesystem::path& path, const TimeSeries& ts, const std::string& date_column,
                      const std::string& value_column) {
    std::ofstream out(path);
    out << date_column << "," << value_column << "\n";
    out.precision(17);
    for (std::size_t i = 0; i < ts.size(); ++i) out << ts.month_at(i).to_string() << "," << ts[i] << "\n";
}

} // namespace tsf::testing
