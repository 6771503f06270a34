#include "amb/flow.hpp"

namespace amb {

static Q einstein_v(int n, const Q& mu, int k) {
  Q v = 1;
  for (int j = 0; j < k; ++j) v *= mu * (n - 4 * j) / Q(j + 1);
  return v;
}

std::vector<EinsteinRow> einstein_sign_table(int n, const Q& mu, int k_max) {
  if (n < 3 || sgn(mu) <= 0) throw std::invalid_argument("einstein_sign_table: n >= 3 and mu > 0");
  const int j = (n + 3) / 4;  // 4(j-1) < n <= 4j
  std::vector<EinsteinRow> rows;
  Q fact = 1;
  for (int k = 1; k <= k_max; ++k) {
    fact *= k;
    EinsteinRow r;
    r.n = n;
    r.k = k;
    r.v_k = einstein_v(n, mu, k);
    int s = 1;
    for (int i = 0; i < k; ++i) s *= (n - 4 * i > 0) - (n - 4 * i < 0);
    r.sign_product = s;
    Q p1 = einstein_v(n, mu, 1), pk = fact * r.v_k, pk1 = fact * (k + 1) * einstein_v(n, mu, k + 1);
    r.rate = (-pk1 + p1 * pk) / fact;
    if (n == 4 * j)
      r.predicted = k <= j ? 1 : 0;
    else
      r.predicted = k <= j ? 1 : ((k - j) % 2 == 0 ? 1 : -1);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace amb
