#pragma once

#include <string_view>

// Embedded copies of the files under data/, generated at configure time.
namespace concept_align::builtin {

extern const std::string_view kBaselineConcepts;
extern const std::string_view kTrustConcepts;
extern const std::string_view kTrustModels;
extern const std::string_view kTrustModelsUndirected;
extern const std::string_view kContext;

}  // namespace concept_align::builtin
