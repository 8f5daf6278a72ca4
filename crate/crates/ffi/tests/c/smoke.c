#include <math.h>
#include <stdio.h>
#include <string.h>

#include "regretlab.h"

#define CHECK(cond)                                                   \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond);      \
      return 1;                                                       \
    }                                                                 \
  } while (0)

int main(void) {
  RlDist *d = NULL;
  const char *two_point =
      "{\"components\":[{\"atom\":{\"at\":-1,\"w\":0.5}},{\"atom\":{\"at\":1,\"w\":0.5}}]}";
  CHECK(rl_dist_from_json(two_point, &d) == RL_STATUS_OK);

  RlOffsetProfile prof;
  CHECK(rl_theta(d, &prof) == RL_STATUS_OK);
  CHECK(prof.theta == 0.0);

  RlBoundReport rep;
  CHECK(rl_opt_lower_bound_binary(d, &rep) == RL_STATUS_OK);
  CHECK(fabs(rep.bound - 3.0 / 32.0) < 1e-12);
  CHECK(rep.ratio_ok);

  RlPolicy *p = NULL;
  const char *lin =
      "{\"binary\":{\"segments\":[{\"to\":-1,\"a\":0,\"b\":0},"
      "{\"from\":-1,\"to\":1,\"a\":0.5,\"b\":0.5},{\"from\":1,\"a\":0,\"b\":1}]}}";
  CHECK(rl_policy_from_json(lin, &p) == RL_STATUS_OK);
  double regret = 0, worst_v = 0;
  CHECK(rl_binary_worstcase(d, p, &regret, &worst_v) == RL_STATUS_OK);
  CHECK(fabs(regret - 0.25) < 1e-12);

  RlDist *bad = NULL;
  CHECK(rl_dist_from_json("{\"components\":[]}", &bad) != RL_STATUS_OK);
  CHECK(bad == NULL);
  CHECK(rl_last_error_message() != NULL);

  rl_policy_free(p);
  rl_dist_free(d);
  printf("ok\n");
  return 0;
}
