// Walks one target profile through the library: classify it, plan the
// insertions, materialize a prefix of the constructed point and compare its
// return times and recurrence rates with the plan.

#include <iostream>

#include "recurrencelab/recurrencelab.hpp"

using namespace recurrencelab;

int main()
{
  const auto phi = parse_phi("log(n)");
  const ExtReal alpha = 1.2, beta = 1.2;

  const auto c = classify(phi, alpha, beta);
  std::cout << "phi = " << describe(phi) << ", gamma = " << c.gamma.str() << ", delta = " << c.delta.str()
            << ", dimension " << c.dimension << ", case " << (c.case_tag ? case_name(*c.case_tag) : "-") << '\n';

  const auto plan = plan_full_dimension(phi, alpha, beta, 10);
  for (const auto& t : plan.terms) std::cout << "  i = " << t.i << "  n = " << t.n << "  ell = " << t.ell << '\n';
  const auto conditions = check_plan_conditions(plan, 0.01);
  std::cout << "spacing ok: " << conditions.condition_i_ok() << ", density ratio " << conditions.final_ratio << '\n';

  // Free F_3 symbols from a seed; the prefix covers the third insertion.
  const auto seq = apply_insertions(FpBase{plan.p, SymbolStream::seeded(1)}, plan, 500'000);
  const auto& t3 = plan.terms[2];
  const auto length = to_u64(t3.ell + t3.n + 3);
  const auto word = seq.prefix(length);
  const auto R = return_times_all(word);

  std::size_t agree = 0, total = 0;
  for (auto n = to_u64(plan.terms[1].n) + 1; n <= to_u64(t3.n); ++n, ++total)
    if (R[n - 1].is_exact() && BigInt(R[n - 1].value) == t3.ell) ++agree;
  std::cout << "R_n = " << t3.ell << " for " << agree << " of " << total << " n in (" << plan.terms[1].n << ", " << t3.n
            << "]\n";

  const auto rates = running_extremes(rate_trajectory(plan, phi), 0.5);
  std::cout << "rate estimates: alpha_hat " << rates.alpha_hat << ", beta_hat " << rates.beta_hat << '\n';

  const double dim = fp_box_dimension(plan.p, plan.m, depth_range(30, 600, 30)).slope;
  std::cout << "box dimension of F_3: " << dim << " (expected 1/3)\n";
  return agree == total && std::abs(dim - 1.0 / 3.0) < 0.02 ? 0 : 1;
}
