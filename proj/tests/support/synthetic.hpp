#pragma once

#include <cstdint>
#include <string>

namespace readmit::testing {

/// A fake encounter file in the public dataset's column layout. Readmission
/// depends mainly on inpatient visits, discharge disposition and admission type;
/// short- versus long-term readmission on lab procedures and discharge
/// disposition. About 2% of races and 1% of diagnoses are "?".
std::string synthetic_dataset_csv(std::size_t rows, std::uint64_t seed);

/// Mapping file in the published sectioned layout.
std::string synthetic_id_mappings_csv();

}  // namespace readmit::testing
