#include <math.h>
#include <stdio.h>
#include <string.h>

#include "ising_storage.h"

#define CHECK(cond)                                              \
  do {                                                           \
    if (!(cond)) {                                               \
      fprintf(stderr, "check failed at line %d: %s\n", __LINE__, \
              #cond);                                            \
      return 1;                                                  \
    }                                                            \
  } while (0)

int main(void) {
  IsCodec *codec = NULL;
  CHECK(is_codec_from_json("{\"scheme\":\"stripe\",\"k\":8}", &codec) ==
        IS_STATUS_OK);
  CHECK(is_codec_capacity(codec) == 4);

  const uint8_t msg[4] = {1, 0, 0, 1};
  IsConfig *cfg = NULL;
  CHECK(is_codec_encode(codec, msg, 4, &cfg) == IS_STATUS_OK);
  CHECK(is_config_plus_count(cfg) == 32);

  IsDynamics zero = {INFINITY, 0, false, false};
  CHECK(is_run_discrete(cfg, 1000000, &zero, 42) == IS_STATUS_OK);
  uint8_t out[4] = {0};
  CHECK(is_codec_decode(codec, cfg, out, 4) == IS_STATUS_OK);
  CHECK(memcmp(out, msg, 4) == 0);

  IsLattice *bad = NULL;
  CHECK(is_lattice_square(0, IS_BOUNDARY_FREE, &bad) ==
        IS_STATUS_INVALID_ARGUMENT);
  CHECK(is_last_error_message() != NULL);

  char *json = is_config_to_json(cfg);
  CHECK(json != NULL && strstr(json, "spins_hex") != NULL);
  is_string_free(json);

  is_config_free(cfg);
  is_codec_free(codec);
  puts("ok");
  return 0;
}
