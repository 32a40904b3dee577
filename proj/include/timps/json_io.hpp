#pragma once
// JSON (de)serialization: complex numbers as [re, im], matrices as row-major
// nested arrays, deterministic output (keys in insertion order, values rounded
// at 1e-12 before printing).
#include <timps/mps.hpp>
#include <timps/types.hpp>

#include "json.hpp"

#include <string>

namespace timps {

using json = nlohmann::ordered_json;

double round12(double v);
json cplx_to_json(const cplx& z);
cplx cplx_from_json(const json& j);
json mat_to_json(const CMat& m);
CMat mat_from_json(const json& j);
json vec_to_json(const CVec& v);
json tensor_to_json(const MpsTensor& t);
MpsTensor tensor_from_json(const json& j);
json state_to_json(const StateVector& s);

// load a json value from an inline string or, for arguments of the form
// @path, from the named file
json load_json_arg(const std::string& arg);

std::string dump_report(const json& j);

}  // namespace timps
