#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace sollab {

// Interaction and scaling estimates between rescaled profiles.
//   estim1a  ||(LambdaW)_[l]||_{L^2_R}                              ~ min(1, l/R)
//   estim1b  ||W_[l]||_{L^2_R}                                      ~ min(1, l/R)
//   estim1c  |int_{|x|>R} (LambdaW)_[l] (LambdaW)_[m]|               <~ l/m
//   estim2   || |LW_(l) W_(m)| + |LW_(m) W_(l)| + W_(l) W_(m) ||_{L^1L^2(|x|>|t|)} <~ (l/m)^2 <log(m/l)>
//   estim3a  || t (LambdaW)_[l] W_(m) ||_{L^1L^2(|x|>|t|)}          <~ l/m
//   estim3b  || t (LambdaW)_[m] W_(l) ||_{L^1L^2(|x|>|t|)}          <~ (l/m)^2
//   estim4   || t (LambdaW)_[m] W_(l) ||_{L^1L^2(|x|>R+|t|)}        <~ l^2 m / R^3   (l < m < R)
//   estim5   || W_(l) 1{R+|t|<|x|<R'+|t|} ||_{L^2L^4}               <~ ((R'-R)/l)^(1/4)  (R < R' < l)
//   estim6   || W 1{max(|t|,R)<|x|} ||_{L^2L^4}                     <~ R^-2  (R >= 1)
// Norms are over R^6 x R_t (both time directions).
enum class Estimate { estim1a, estim1b, estim1c, estim2, estim3a, estim3b, estim4, estim5, estim6 };

std::string to_string(Estimate e);
Estimate estimate_from_string(const std::string& s);
std::vector<Estimate> all_estimates();

struct EstimateParams {
    double lambda = 0.0;
    double mu = 1.0;
    double R = 0.0;
    double R_prime = 0.0;
};

struct EstimateSample {
    Estimate which{};
    EstimateParams params;
    double measured = 0.0;
    double bound = 0.0;
    double ratio = 0.0;
    nlohmann::json to_json() const;
};

// Throws std::invalid_argument on violated preconditions (e.g. lambda = mu).
EstimateSample verify_appendix_b(Estimate which, const EstimateParams& p, double nodes_per_decade = 96.0);

struct EstimateScan {
    Estimate which{};
    std::vector<EstimateSample> samples;
    double ratio_max = 0.0;
    double ratio_min = 0.0;
    double spread() const { return ratio_max / ratio_min; }
    nlohmann::json to_json() const;
};

// Three-decade scan of the governing parameter in the regime where the
// claimed power law is asymptotically sharp.
std::vector<EstimateParams> default_scan(Estimate which, int points_per_decade = 2);
EstimateScan scan_appendix_b(Estimate which, int points_per_decade = 2, double nodes_per_decade = 96.0);

} // namespace sollab
