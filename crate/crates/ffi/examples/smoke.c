/* See README.md for the build command. */
#include <stdio.h>
#include "stepprod.h"

int main(void) {
  StepprodParams *p = NULL;
  if (stepprod_params_new(1.0, 1.0, &p) != STEPPROD_STATUS_OK) {
    fprintf(stderr, "%s\n", stepprod_last_error_message());
    return 1;
  }
  double v = 0.0;
  stepprod_product(p, STEPPROD_FORM_GAMMA, 10, &v);
  printf("gamma(1,1,10) = %.17g\n", v);

  StepprodConstants c;
  if (stepprod_constants(p, &c) == STEPPROD_STATUS_OK) {
    printf("A = %.17g  B = %.17g  C = %.17g\n", c.a, c.b, c.c);
  }

  if (stepprod_product(p, STEPPROD_FORM_GAMMA, 500, &v) == STEPPROD_STATUS_RANGE) {
    printf("overflow: %s\n", stepprod_last_error_message());
  }
  stepprod_params_free(p);
  return 0;
}
