#include "amb/checks.hpp"

namespace amb {

CalibrationRecord calibrate_convention(int K, std::vector<int> candidates) {
  CalibrationRecord rec;
  rec.candidates = candidates;
  struct Family {
    std::string name;
    MetricMeasure mm;
    int kind;  // 0 soliton, 1 flat, 2 einstein
    Q mu;
  };
  std::vector<Family> fams = {
      {"gaussian-soliton(3,1/2)", gaussian_soliton(3, Q(1, 2)), 0, 0},
      {"flat-phi-poly(1/3)", flat_phi_poly(Q(1, 3)), 1, 0},
      {"einstein-sphere(3,1)", einstein_sphere(3, Q(1)), 2, 1},
  };
  for (int shift : candidates) {
    bool all = true;
    for (const auto& f : fams) {
      auto spec = ambient_spec(f.mm.n(), K, 2 * K + 2, CoeffMode::Rational);
      auto b = to_jets<Q>(f.mm, spec);
      auto e = solve_ambient(b, K, AmbientConvention{shift});
      ClosedForm<Q> c = f.kind == 0 ? soliton_closed_form(b, K)
                        : f.kind == 1 ? flat_closed_form(b, K)
                                      : einstein_closed_form(b, f.mu, K);
      CalibrationRow row{f.name, shift, closed_form_deviation(e, c)};
      all = all && row.deviation == 0;
      rec.rows.push_back(row);
    }
    if (all) rec.chosen = rec.chosen < 0 ? shift : -1;
  }
  return rec;
}

}  // namespace amb
