#pragma once

#include <map>
#include <set>
#include <string>

#include "mrhet/ivw.hpp"

namespace mrhet {

// Common shape for the reference outlier detectors.
struct OutlierReport {
  std::string method_label;
  std::set<std::string> flagged;
  std::map<std::string, double> per_snp_p;
  std::map<std::string, double> per_snp_stat;  // the method's per-SNP statistic
  std::string threshold_description;
  CausalEstimate refit;  // full-model estimate when nothing is flagged
};

}  // namespace mrhet
