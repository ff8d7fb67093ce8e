#pragma once

#include <string>

#include "json.hpp"
#include "ncmetric/domains.hpp"
#include "ncmetric/freeprob.hpp"
#include "ncmetric/matrix.hpp"
#include "ncmetric/metric.hpp"
#include "ncmetric/ncfunc.hpp"
#include "ncmetric/ncpoint.hpp"

namespace ncm::io {

using json = nlohmann::json;

/// Malformed documents raise NcError(InvalidSpec).
json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// A complex number as [re, im]; plain numbers are accepted on input.
json complex_to_json(cplx z);
cplx complex_from_json(const json& j);

/// Finite numbers as-is, ±inf as the strings "inf"/"-inf", NaN as "nan".
json number_to_json(double v);

json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const json& j);

json point_to_json(const NcPoint& p);
NcPoint point_from_json(const json& j);

json direction_to_json(const NcDirection& b);
NcDirection direction_from_json(const json& j);

json function_to_json(const NcFunctionSpec& f);
NcFunctionSpec function_from_json(const json& j);

json kernel_to_json(const KernelSpec& k);
KernelSpec kernel_from_json(const json& j);

json domain_to_json(const DomainSpec& d);
DomainSpec domain_from_json(const json& j);

json model_to_json(const OperatorValuedModel& m);
OperatorValuedModel model_from_json(const json& j);

json cpmap_to_json(const CpMapSpec& r);
CpMapSpec cpmap_from_json(const json& j);

json delta_to_json(const DeltaResult& r);
json trace_to_json(const SolveTrace& t);

/// printf("%.17g") with "inf"/"-inf"/"nan" spelled out; stable across runs.
std::string format_double(double v);

}  // namespace ncm::io
