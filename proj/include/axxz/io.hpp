#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "axxz/params.hpp"
#include "axxz/spectra.hpp"

namespace axxz {

// bump on any change that invalidates cached artifacts or output layouts
inline constexpr const char* kVersion = "0.1.0";

using ojson = nlohmann::ordered_json;

ojson params_json(const ModelParams& p);
ModelParams params_from_json(const ojson& j);

ojson rootset_json(const RootSet& rs);
RootSet rootset_from_json(const ojson& j);

ojson fit_json(const FitResult& f);

// numbers rendered with 17 significant digits, '.' decimal point
std::string csv_num(double v);

// comma-delimited, LF line endings, no trailing delimiter
void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// write via temp file in the same directory, then rename into place
void atomic_write_text(const std::string& path, const std::string& content);

}  // namespace axxz
