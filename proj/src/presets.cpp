#include <timps/presets.hpp>

#include <cmath>

namespace timps {

namespace {

CMat m3(std::initializer_list<cplx> e) {
  CMat m(3, 3);
  int i = 0;
  for (const cplx& z : e) {
    m(i / 3, i % 3) = z;
    ++i;
  }
  return m;
}

std::vector<Preset> build_presets() {
  const cplx w = omega, w2 = omega2, i1(0, 1);
  std::vector<Preset> out;
  auto add = [&out](const std::string& name, ClassLabel cls, const CMat& b,
                    const std::string& desc) {
    out.push_back({name, cls, b, tensor_from_b(cls, b), desc});
  };
  add("1G", ClassLabel::Momega, m3({0, 1, 1, w, 0, w, w2, w2, 0}),
      "generic three-eigenvalue member: global Z6 symmetry group");
  add("1GD3", ClassLabel::Momega, m3({1, 1, w, w2, w, w, w2, 1, w2}),
      "three-eigenvalue member with an extra 3-cycle family at N = 0 mod 3");
  add("1GD26", ClassLabel::Momega, m3({1, 1, w, w2, 1, w2, w2, w, w}),
      "three-eigenvalue member whose symmetry group depends on N mod 6");
  add("1D3", ClassLabel::Momega, m3({0, 1, 1, -w, -w, w, w2, -w2, w2}),
      "three-eigenvalue member with 3-cycle symmetries only");
  add("2Ginf", ClassLabel::LLT, m3({0, 0, 1, 0, -1, -1, 1, 0, 1}),
      "singular-pencil member with a one-parameter global unipotent family (all N)");
  {
    cplx s = std::exp(cplx(0, kPi / 6.0));
    add("2Dminf", ClassLabel::LLT, m3({0, 0, s, 0, -1.0 / s, 0, 1, 0, 1}),
        "singular-pencil member with a one-parameter 6-cycle family at N = 0 mod 6");
  }
  add("2GD2inf", ClassLabel::LLT, m3({0, 0, i1, 0, i1, 0, 1, 1, 1}),
      "singular-pencil member with a 2-cycle family at even N and one global element");
  add("majumdar-ghosh-plus", ClassLabel::LLT, m3({0, 0, 1, 0, -1, 0, 1, 0, 0}),
      "dimer superposition with + sign; every det-1 g is a global symmetry at even N");
  add("majumdar-ghosh-minus", ClassLabel::LLT, m3({0, 0, i1, 0, i1, 0, 1, 0, 0}),
      "dimer superposition with - sign; generic g enters through alternating 2-cycles at even N");
  return out;
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> p = build_presets();
  return p;
}

}  // namespace

std::optional<Preset> preset(const std::string& name) {
  for (const Preset& p : presets())
    if (p.name == name) return p;
  return std::nullopt;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const Preset& p : presets()) out.push_back(p.name);
  return out;
}

}  // namespace timps
